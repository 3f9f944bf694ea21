"""Investing surplus silk: abundance as a motivation of its own.

An investor holds porcelain, copper and silk but requires only the first
two: an abundance of goods. Whether that abundance is absolute or quasi
depends on the system around it, which the two fixture variants toggle by
changing the silk supply. Either way the investor's creative strategy trades
the surplus silk for a promise of twice the silk at maturity.

Run:  python demos/silk_investment.py
"""

from dataclasses import replace

from sasim import (
    NonConservingEvent,
    OutcomeCommitted,
    ResourceClass,
    protestant,
    run,
    snapshot_states,
)

GOODS = ResourceClass.GOODS

# --- absolute vs quasi abundance ---------------------------------------------
# The individual relation is identical in both variants (2 required < 3
# held); only the aggregate silk supply differs.

for variant in ("system-abundance", "system-scarcity"):
    scenario = protestant(variant)
    snapshot = snapshot_states(scenario.build_population())
    state = snapshot.agents["protestant"][GOODS]
    print(
        f"{variant}: individual={state.sas.value}, system={snapshot.system[GOODS].value}"
        f" -> {state.cross.value}"
    )

# --- the investment lifecycle --------------------------------------------------
# Commitment mints the merchant's promise (a flagged, non-conserving event),
# trades silk for it, and schedules a delivery three ticks out. At maturity
# the promise is traded back for twice the silk and retired.

scenario = protestant("system-abundance")
config = replace(scenario.config, ticks=4)
report = run(scenario.build_population(), config, scenario.policy, scenario.name)

print("\nexchange and promise events:")
for event in report.events:
    if isinstance(event, OutcomeCommitted):
        outcome = event.outcome
        print(f"  tick {event.tick}: {outcome.rule_id} -> {outcome.status.e_label}")
    elif isinstance(event, NonConservingEvent):
        print(f"  tick {event.tick}: {event.reason} ({event.kind} {event.delta:+d})")

goods_by_tick = {
    row.tick: row.sas.value
    for row in report.rows
    if row.agent_id == "protestant" and row.resource_class is GOODS
}
print("\ninvestor goods state per tick:", goods_by_tick)
print("conservation audit ok:", report.audit_ok)
print(
    "investor final holdings:",
    ", ".join(f"{i['kind']} x{i['count']}" for i in report.final_holdings["protestant"]),
)
