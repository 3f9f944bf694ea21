"""Substitutability: when a donkey counts as a horse, and when it does not.

Exchangeability inside a resource class is empirical, so it is scenario
data: a policy declares which kind may stand in for which, per context.
Coverage counting then matches requirements against usable holdings, and
the coverage classification mode sees through surplus that cannot actually
satisfy anything.

Run:  python demos/substitutes_and_coverage.py
"""

from sasim import (
    Agent,
    Multiset,
    Requirement,
    ResourceClass,
    ResourceItem,
    SubstitutionEntry,
    SubstitutionPolicy,
    classify_agent,
    coverage_count,
    satisfies,
)

GOODS = ResourceClass.GOODS


def goods(kind, quality=()):
    return ResourceItem(GOODS, kind, frozenset(quality))


# --- a context-tagged policy ---------------------------------------------------
# For getting around, a donkey or camel will do; as a wedding gift, only the
# white horse carries the right meaning.

policy = SubstitutionPolicy(
    [
        SubstitutionEntry(GOODS, "horse", "donkey", "transport"),
        SubstitutionEntry(GOODS, "horse", "camel", "transport"),
    ]
)

print("donkey satisfies horse (transport):", satisfies(goods("donkey"), goods("horse"), policy, "transport"))
print("donkey satisfies horse (wedding):  ", satisfies(goods("donkey"), goods("horse"), policy, "wedding-gift"))
print("black horse satisfies horse:       ", satisfies(goods("horse", ["black"]), goods("horse"), policy, "wedding-gift"))

# --- coverage counting -----------------------------------------------------------
# One horse required, a donkey and a camel in the stable: one requirement
# covered, one usable animal to spare.

available = Multiset({goods("donkey"): 1, goods("camel"): 1})
required = Multiset({goods("horse"): 1})
print("\ncoverage:", coverage_count(available, required, policy, "transport"))

# --- raw vs coverage classification ------------------------------------------------
# Raw cardinalities call two tractors an abundance against one required
# horse; coverage counting calls the unmet transport requirement scarcity.

rider = Agent(
    id="rider",
    resources=Multiset({goods("tractor"): 2}),
    requirements={GOODS: Requirement(items=required)},
)
print("\nraw mode:     ", classify_agent(rider, policy, mode="raw")[GOODS].value)
print("coverage mode:", classify_agent(rider, policy, mode="coverage")[GOODS].value)

# One usable substitute for one requirement reads as sufficiency; the extra
# camel above would tip the same requirement into abundance.
stabled = Agent(
    id="stabled",
    resources=Multiset({goods("donkey"): 1}),
    requirements={GOODS: Requirement(items=required)},
)
print(
    "one donkey, coverage mode:",
    classify_agent(stabled, policy, mode="coverage", context="transport")[GOODS].value,
)
