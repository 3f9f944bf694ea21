"""Famine amid abundance: failed entitlements, not missing supply.

Ten villagers each require one food ration; the system holds sixteen, a 60%
overshoot. Food is bought with cash, and one villager has none: their
purchase entitlement fails while the aggregate stays abundant. That is
quasi-scarcity, an inequality signal. Enabling a coupon gift rule, without
adding a single ration to the system, flips the failure to success.

Run:  python demos/famine_amid_abundance.py
"""

import tempfile
from pathlib import Path

from sasim import ResourceClass, SasState, aggregate, famine, run

GOODS = ResourceClass.GOODS

# --- the starting position -----------------------------------------------------

scenario = famine()
pop = scenario.build_population()
view = aggregate(pop)
print(
    "system totals: |R_s| =",
    view.aggregate_requirements[GOODS].cardinality,
    " |A_s| =",
    view.aggregate_resources[GOODS].cardinality,
    f"({view.aggregate_resources[GOODS].cardinality / view.aggregate_requirements[GOODS].cardinality:.0%} of requirement)",
)

# --- wealth-gated market only ----------------------------------------------------

report = run(pop, scenario.config, scenario.policy, scenario.name)
print("\nwith the cash-gated market only:")
for row in report.rows:
    if row.resource_class is GOODS and row.sas is not SasState.UNDEFINED:
        marker = " <- starving" if row.e_status == "E-" else ""
        print(f"  {row.agent_id}: {row.sas.value} ({row.cross}) {row.e_status}{marker}")

# --- the policy intervention ------------------------------------------------------
# Coupons are a new entitlement, not new supply: totals stay at sixteen.

with_coupons = famine(food_coupons=True)
report2 = run(
    with_coupons.build_population(), with_coupons.config, with_coupons.policy, with_coupons.name
)
statuses = {
    row.agent_id: row.e_status
    for row in report2.rows
    if row.resource_class is GOODS and row.sas is not SasState.UNDEFINED
}
print("\nwith food coupons enabled:", sorted(set(statuses.values())))
print("system food after intervention:", [s for s in report2.system_rows if s[1] == "goods"])

# --- report files ------------------------------------------------------------------
# Reports serialize deterministically: same scenario and seed, same bytes.

out_dir = Path(tempfile.mkdtemp(prefix="famine_report_"))
(out_dir / "report.json").write_text(report2.to_json(), encoding="utf-8")
(out_dir / "report.csv").write_text(report2.to_csv(), encoding="utf-8")
print("\nwrote", out_dir / "report.json")
print("wrote", out_dir / "report.csv")
print("csv preview:")
for line in report2.to_csv().splitlines()[:5]:
    print(" ", line)
