"""Built-in scenarios used as canonical test vectors.

Three classic situations ship with the package:

* ``richard_iii`` - a king scarce in transport and abundant in status offers
  his kingship for a horse; one tick makes both relations sufficient.
* ``protestant`` - a frugal holder of surplus silk invests it with a merchant
  against a promise of twice the silk later. The ``variant`` toggles the
  system-level silk supply so the same individual abundance reads as absolute
  (system also abundant) or quasi (system scarce).
* ``famine`` - ten villagers each require one food ration while the system
  holds sixteen (a 60% overshoot); purchase is gated on cash, which the one
  destitute villager lacks, so their entitlement fails amid abundance. An
  optional food-coupon gift rule, disabled by default, flips that failure to
  success without changing total supply.
"""

from __future__ import annotations

from dataclasses import replace

from .classify import SasState
from .engine import SimConfig
from .entitlement import EntitlementRule, EntitlementType, PartyMatch, TransferSpec
from .multiset import Multiset
from .population import RESERVOIR_ID, Agent, Requirement, make_reservoir
from .resources import ResourceClass, ResourceItem
from .scenario import Scenario
from .strategy import Invest, Stance, StrategyProfile

GOODS = ResourceClass.GOODS
MONEY = ResourceClass.MONEY
STATUS = ResourceClass.STATUS

PROTESTANT_VARIANTS = ("system-abundance", "system-scarcity")


def _bag(*entries: tuple[ResourceClass, str, int]) -> Multiset:
    bag = Multiset()
    for resource_class, kind, count in entries:
        bag = bag.add(ResourceItem(resource_class, kind), count)
    return bag


def richard_iii() -> Scenario:
    richard = Agent(
        id="richard",
        attributes={"rank": "king"},
        resources=_bag((STATUS, "kingship", 1)),
        requirements={
            GOODS: Requirement(items=_bag((GOODS, "horse", 1))),
            STATUS: Requirement(),  # declared empty: no status required
        },
        strategy=StrategyProfile(
            stance=Stance.DEFENSIVE, respond_to=frozenset({SasState.SCARCITY})
        ),
    )
    horseman = Agent(id="horseman", resources=_bag((GOODS, "horse", 1)))
    trade = EntitlementRule(
        id="kingdom_for_horse",
        etype=EntitlementType.TRADE,
        giver_match=PartyMatch(ids=frozenset({"horseman"})),
        receiver_match=PartyMatch(ids=frozenset({"richard"})),
        give=TransferSpec(STATUS, "kingship", 1),
        receive=TransferSpec(GOODS, "horse", 1),
    )
    return Scenario(
        name="richard_iii",
        description="A kingdom offered for a horse: scarcity and abundance traded into double sufficiency.",
        config=SimConfig(ticks=1, seed=0),
        agents=(richard, horseman),
        rules=(trade,),
    )


def protestant(variant: str = "system-abundance") -> Scenario:
    if variant not in PROTESTANT_VARIANTS:
        raise ValueError(f"variant must be one of {PROTESTANT_VARIANTS}, got {variant!r}")
    investor = Agent(
        id="protestant",
        resources=_bag((GOODS, "porcelain", 1), (GOODS, "copper", 1), (GOODS, "silk", 1)),
        requirements={
            GOODS: Requirement(items=_bag((GOODS, "porcelain", 1), (GOODS, "copper", 1)))
        },
        strategy=StrategyProfile(
            stance=Stance.CREATIVE,
            respond_to=frozenset({SasState.ABUNDANCE}),
            cell_effects={
                (Stance.CREATIVE, SasState.ABUNDANCE): (
                    Invest(
                        give=TransferSpec(GOODS, "silk", 1),
                        receive=TransferSpec(GOODS, "silk", 2),
                        maturity=3,
                        counterparty="merchant",
                    ),
                )
            },
        ),
    )
    merchant = Agent(
        id="merchant",
        resources=_bag((GOODS, "silk", 1)),
        requirements={GOODS: Requirement(items=_bag((GOODS, "silk", 3)))},
    )
    reservoir = (
        make_reservoir(_bag((GOODS, "silk", 2))) if variant == "system-abundance" else None
    )
    return Scenario(
        name="protestant",
        description=(
            "Surplus silk invested with a merchant against a promised larger return; "
            f"silk is {'abundant' if reservoir else 'scarce'} at the system level."
        ),
        config=SimConfig(ticks=1, seed=0),
        agents=(investor, merchant),
        reservoir=reservoir,
    )


def famine(food_coupons: bool = False) -> Scenario:
    villagers = tuple(
        Agent(
            id=f"villager_{i}",
            attributes={"wealth": 1},
            resources=_bag((GOODS, "food", 1), (MONEY, "cash", 1)),
            requirements={GOODS: Requirement(items=_bag((GOODS, "food", 1)))},
        )
        for i in range(1, 9)
    )
    wealthy = Agent(
        id="wealthy",
        attributes={"wealth": 2},
        resources=_bag((GOODS, "food", 2), (MONEY, "cash", 3)),
        requirements={GOODS: Requirement(items=_bag((GOODS, "food", 1)))},
    )
    destitute = Agent(
        id="destitute",
        attributes={"wealth": 0},
        requirements={GOODS: Requirement(items=_bag((GOODS, "food", 1)))},
        strategy=StrategyProfile(
            stance=Stance.DEFENSIVE, respond_to=frozenset({SasState.SCARCITY})
        ),
    )
    buy_food = EntitlementRule(
        id="buy_food",
        etype=EntitlementType.TRADE,
        giver_match=PartyMatch(ids=frozenset({RESERVOIR_ID})),
        give=TransferSpec(MONEY, "cash", 1),
        receive=TransferSpec(GOODS, "food", 1),
    )
    coupons = EntitlementRule(
        id="food_coupons",
        etype=EntitlementType.GIFT,
        giver_match=PartyMatch(ids=frozenset({RESERVOIR_ID})),
        receive=TransferSpec(GOODS, "food", 1),
        enabled=food_coupons,
    )
    return Scenario(
        name="famine",
        description=(
            "Ten villagers each require one ration while the system holds sixteen; "
            "purchase is cash-gated, so the destitute villager's entitlement fails "
            "amid abundance unless food coupons are enabled."
        ),
        config=SimConfig(ticks=1, seed=0),
        agents=villagers + (wealthy, destitute),
        reservoir=make_reservoir(_bag((GOODS, "food", 6))),
        rules=(buy_food, coupons),
    )


FIXTURES = {
    "richard_iii": richard_iii,
    "protestant": protestant,
    "famine": famine,
}


def fixture_names() -> list[str]:
    return sorted(FIXTURES)


def build_fixture(name: str, variant: str | None = None, enable_rules: tuple[str, ...] = ()) -> Scenario:
    """Build a named fixture, applying the generic CLI toggles."""
    if name not in FIXTURES:
        raise KeyError(name)
    if name == "protestant":
        scenario = protestant(variant) if variant else protestant()
    elif variant is not None:
        raise ValueError(f"fixture {name!r} has no variants")
    else:
        scenario = FIXTURES[name]()
    if enable_rules:
        known = {rule.id for rule in scenario.rules}
        missing = [r for r in enable_rules if r not in known]
        if missing:
            raise ValueError(f"fixture {name!r} has no rule named {missing[0]!r}")
        rules = tuple(
            replace(rule, enabled=True) if rule.id in enable_rules else rule
            for rule in scenario.rules
        )
        scenario = replace(scenario, rules=rules)
    return scenario
