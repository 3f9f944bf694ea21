"""A kingdom for a horse: bags, classification, and one exchange.

A king requires a horse (and holds none) while holding a kingship nobody
requires of him: scarcity in goods, abundance in status. One legitimate
trade later, both relations sit at sufficiency.

Run:  python demos/kingdom_for_a_horse.py
"""

from sasim import (
    Multiset,
    ResourceClass,
    ResourceItem,
    SasState,
    classify,
    richard_iii,
    run,
    snapshot_states,
)

# --- bags and cardinalities -------------------------------------------------
# Requirement and resource sets are multisets: elements carry multiplicities
# and the cardinality counts occurrences.

horse = ResourceItem(ResourceClass.GOODS, "horse")
kingship = ResourceItem(ResourceClass.STATUS, "kingship")

required_goods = Multiset({horse: 1})
held_goods = Multiset()
held_status = Multiset({kingship: 1})

print("|R_goods| =", required_goods.cardinality, " |A_goods| =", held_goods.cardinality)
print("goods relation:", classify(required_goods.cardinality, held_goods.cardinality).value)
print("status relation:", classify(0, held_status.cardinality).value)
assert classify(1, 0) is SasState.SCARCITY
assert classify(0, 1) is SasState.ABUNDANCE

# --- the full scenario -------------------------------------------------------
# The built-in fixture declares the king, a horseman holding one horse, and
# the kingdom-for-horse trade rule.

scenario = richard_iii()
pop = scenario.build_population()

snapshot = snapshot_states(pop)
print("\npre-exchange states for the king:")
for resource_class, state in snapshot.agents["richard"].items():
    if state.sas is not SasState.UNDEFINED:
        print(f"  {resource_class.value}: {state.sas.value} ({state.cross.value})")

# One tick: the king's scarcity-coping strategy proposes the trade, the
# entitlement engine evaluates it, and the transfer commits.
report = run(pop, scenario.config, scenario.policy, scenario.name)

print("\npost-exchange states for the king:")
for row in report.rows:
    if row.agent_id == "richard" and row.sas is not SasState.UNDEFINED:
        print(f"  {row.resource_class.value}: {row.sas.value} ({row.e_status})")

print("\noutcome counts:", dict(report.outcome_counts))
print("conservation audit ok:", report.audit_ok)
print("\nfinal holdings:")
for holder, items in report.final_holdings.items():
    print(f"  {holder}:", ", ".join(f"{i['kind']} x{i['count']}" for i in items) or "(nothing)")
