"""Deterministic discrete-tick simulation loop.

Each tick runs a fixed phase order: matured investment deliveries first, then
one synchronous snapshot that every decision in the tick sees, strategy
selection per agent, proposal resolution in (proposer order, rule id) order
against live holdings, then self-directed mutations, and finally the
post-tick classification recorded in the report. Identical population,
config and seed produce bit-identical reports.

The event log carries full provenance: every committed outcome references a
rule id and both party ids, and every change to system totals appears as a
flagged non-conserving event, which the per-tick conservation audit checks.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from typing import Mapping

from .classify import EXTRAPOLATED_CROSS_STATES, MODES, SasState, SufficiencyBand
from .entitlement import (
    ExchangeOutcome,
    FailureReason,
    NonMatchingParties,
    OutcomeStatus,
    SelfExchange,
    matching_items,
)
from .entitlement import apply as apply_exchange
from .entitlement import evaluate
from .errors import InvalidConfig
from .population import Population, Snapshot, snapshot_states
from .resources import DEFAULT_CONTEXT, EMPTY_POLICY, ResourceClass, ResourceItem, SubstitutionPolicy
from .strategy import (
    DeliveryPlan,
    Destruction,
    Proposal,
    RequirementAdjustment,
    apply_adjustment,
    enact,
    select,
)

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class StopCondition:
    """Stop the run early once every agent reaches `state` for the class."""

    resource_class: ResourceClass
    state: SasState

    def met(self, snapshot: Snapshot) -> bool:
        return all(
            states[self.resource_class].sas is self.state for states in snapshot.agents.values()
        )


@dataclass(frozen=True)
class SimConfig:
    ticks: int = 1
    seed: int = 0
    mode: str = "raw"
    partial_commit: bool = False
    context: str = DEFAULT_CONTEXT
    stop_conditions: tuple[StopCondition, ...] = ()
    system_bands: Mapping[ResourceClass, SufficiencyBand] = field(default_factory=dict)

    def __post_init__(self):
        if self.ticks < 1:
            raise InvalidConfig(f"ticks must be >= 1, got {self.ticks}")
        if not 0 <= self.seed <= MAX_SEED:
            raise InvalidConfig(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.mode not in MODES:
            raise InvalidConfig(f"mode must be one of {MODES}, got {self.mode!r}")

    def to_dict(self) -> dict:
        return {
            "ticks": self.ticks,
            "seed": self.seed,
            "mode": self.mode,
            "partial_commit": self.partial_commit,
            "context": self.context,
            "stop_conditions": [
                {"all_agents": {"class": c.resource_class.value, "state": c.state.value}}
                for c in self.stop_conditions
            ],
            "system_bands": {
                c.value: {"lower": b.lower, "upper": b.upper} for c, b in self.system_bands.items()
            },
        }


# --- events -----------------------------------------------------------------


@dataclass(frozen=True)
class TickStart:
    tick: int


@dataclass(frozen=True)
class StateSnapshot:
    tick: int
    system: Mapping[str, str]
    agents: Mapping[str, Mapping[str, dict]]


@dataclass(frozen=True)
class StrategySelected:
    tick: int
    agent_id: str
    stance: str
    state: str
    resource_class: str
    label: str
    effects: tuple[str, ...]


@dataclass(frozen=True)
class OutcomeCommitted:
    tick: int
    outcome: ExchangeOutcome
    applied: bool


@dataclass(frozen=True)
class NonConservingEvent:
    tick: int
    holder_id: str
    resource_class: str
    kind: str
    delta: int
    reason: str


@dataclass(frozen=True)
class TickEnd:
    tick: int


Event = TickStart | StateSnapshot | StrategySelected | OutcomeCommitted | NonConservingEvent | TickEnd


def event_to_dict(event: Event) -> dict:
    if isinstance(event, TickStart):
        return {"type": "tick_start", "tick": event.tick}
    if isinstance(event, TickEnd):
        return {"type": "tick_end", "tick": event.tick}
    if isinstance(event, StateSnapshot):
        return {
            "type": "state_snapshot",
            "tick": event.tick,
            "system": dict(event.system),
            "agents": {a: dict(states) for a, states in event.agents.items()},
        }
    if isinstance(event, StrategySelected):
        return {
            "type": "strategy_selected",
            "tick": event.tick,
            "agent": event.agent_id,
            "stance": event.stance,
            "state": event.state,
            "class": event.resource_class,
            "label": event.label,
            "effects": list(event.effects),
        }
    if isinstance(event, OutcomeCommitted):
        outcome = event.outcome
        return {
            "type": "outcome",
            "tick": event.tick,
            "rule": outcome.rule_id,
            "giver": outcome.giver_id,
            "receiver": outcome.receiver_id,
            "status": outcome.status.e_label,
            "failure_reason": outcome.failure_reason.value if outcome.failure_reason else None,
            "illegitimate": outcome.illegitimate,
            "applied": event.applied,
            "note": outcome.note,
            "transfers": [
                {
                    "direction": t.direction,
                    "from": t.from_id,
                    "to": t.to_id,
                    "class": t.item.resource_class.value,
                    "kind": t.item.kind,
                    "quality": sorted(t.item.quality_tags),
                    "count": t.count,
                }
                for t in outcome.transfers
            ],
        }
    if isinstance(event, NonConservingEvent):
        return {
            "type": "non_conserving",
            "tick": event.tick,
            "holder": event.holder_id,
            "class": event.resource_class,
            "kind": event.kind,
            "delta": event.delta,
            "reason": event.reason,
        }
    raise TypeError(f"unknown event {event!r}")


# --- report -----------------------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    tick: int
    agent_id: str
    resource_class: ResourceClass
    sas: SasState
    cross: str
    e_status: str
    extrapolated: bool


@dataclass(frozen=True)
class AuditEntry:
    tick: int
    resource_class: str
    kind: str
    delta: int
    flagged: int

    @property
    def ok(self) -> bool:
        return self.delta == self.flagged


@dataclass(frozen=True)
class SimReport:
    scenario: str
    config: SimConfig
    ticks_run: int
    stopped_early: bool
    rows: tuple[ReportRow, ...]
    system_rows: tuple[tuple[int, str, str], ...]
    outcome_counts: Mapping[str, int]
    audit: tuple[AuditEntry, ...]
    events: tuple[Event, ...]
    final_holdings: Mapping[str, tuple]

    @property
    def audit_ok(self) -> bool:
        return all(entry.ok for entry in self.audit)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "scenario": self.scenario,
            "config": self.config.to_dict(),
            "ticks_run": self.ticks_run,
            "stopped_early": self.stopped_early,
            "rows": [
                {
                    "tick": r.tick,
                    "agent": r.agent_id,
                    "class": r.resource_class.value,
                    "state": r.sas.value,
                    "cross_state": r.cross,
                    "e_status": r.e_status,
                    "extrapolated": r.extrapolated,
                }
                for r in self.rows
            ],
            "system_rows": [
                {"tick": t, "class": c, "state": s} for (t, c, s) in self.system_rows
            ],
            "outcome_counts": dict(self.outcome_counts),
            "conservation": {
                "ok": self.audit_ok,
                "entries": [
                    {
                        "tick": e.tick,
                        "class": e.resource_class,
                        "kind": e.kind,
                        "delta": e.delta,
                        "flagged": e.flagged,
                        "ok": e.ok,
                    }
                    for e in self.audit
                ],
            },
            "events": [event_to_dict(e) for e in self.events],
            "final_holdings": {h: list(items) for h, items in self.final_holdings.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        """Flat per-tick state table; system rows use an empty agent field."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["tick", "agent", "class", "state", "cross_state", "e_status", "extrapolated"])
        by_tick: dict[int, list[list]] = {}
        for tick, cls, state in self.system_rows:
            by_tick.setdefault(tick, []).append([tick, "", cls, state, "", "", ""])
        for row in self.rows:
            by_tick.setdefault(row.tick, []).append(
                [
                    row.tick,
                    row.agent_id,
                    row.resource_class.value,
                    row.sas.value,
                    row.cross,
                    row.e_status,
                    str(row.extrapolated).lower(),
                ]
            )
        for tick in sorted(by_tick):
            for line in sorted(by_tick[tick], key=lambda l: (l[1], l[2])):
                writer.writerow(line)
        return buffer.getvalue()


def _e_status(state: SasState) -> str:
    if state is SasState.UNDEFINED:
        return ""
    return "E-" if state is SasState.SCARCITY else "E+"


def _holdings_dict(pop: Population) -> dict[str, tuple]:
    out: dict[str, tuple] = {}
    for holder in pop.holders():
        entries = [
            {
                "class": item.resource_class.value,
                "kind": item.kind,
                "quality": sorted(item.quality_tags),
                "count": count,
            }
            for item, count in sorted(holder.resources.items(), key=lambda p: p[0].sort_key())
        ]
        out[holder.id] = tuple(entries)
    return out


def _totals(pop: Population) -> dict[tuple[str, str], int]:
    totals: dict[tuple[str, str], int] = {}
    for holder in pop.holders():
        for item, count in holder.resources.items():
            key = (item.resource_class.value, item.kind)
            totals[key] = totals.get(key, 0) + count
    return totals


# --- the loop ---------------------------------------------------------------


class Simulation:
    """One deterministic run over a population."""

    def __init__(
        self,
        pop: Population,
        config: SimConfig,
        policy: SubstitutionPolicy = EMPTY_POLICY,
        scenario_name: str = "",
    ):
        self.pop = pop
        self.config = config
        self.policy = policy
        self.scenario_name = scenario_name
        self.rng = random.Random(config.seed)
        self.tick = 0
        self.events: list[Event] = []
        self.rows: list[ReportRow] = []
        self.system_rows: list[tuple[int, str, str]] = []
        self.audit: list[AuditEntry] = []
        self.outcome_counts = {"E+": 0, "E-": 0}
        self._pending: list[tuple[int, int, DeliveryPlan]] = []
        self._pending_seq = 0
        self._stopped_early = False

    # -- public API

    def step(self) -> list[Event]:
        """Run one tick; returns the events of that tick."""
        start = len(self.events)
        self._run_tick()
        return self.events[start:]

    def run(self) -> SimReport:
        for _ in range(self.config.ticks):
            self.step()
            if self._stopped_early:
                break
        return SimReport(
            scenario=self.scenario_name,
            config=self.config,
            ticks_run=self.tick,
            stopped_early=self._stopped_early,
            rows=tuple(self.rows),
            system_rows=tuple(self.system_rows),
            outcome_counts=dict(self.outcome_counts),
            audit=tuple(self.audit),
            events=tuple(self.events),
            final_holdings=_holdings_dict(self.pop),
        )

    # -- phases

    def _run_tick(self) -> None:
        self.tick += 1
        tick = self.tick
        self.events.append(TickStart(tick))
        flagged: dict[tuple[str, str], int] = {}
        totals_before = _totals(self.pop)

        # Matured investment promises are honored (or not) before anything else.
        due = [entry for entry in self._pending if entry[0] <= tick]
        self._pending = [entry for entry in self._pending if entry[0] > tick]
        for _, _, plan in sorted(due, key=lambda entry: (entry[0], entry[1])):
            self._resolve_delivery(plan, flagged)

        snapshot = self._snapshot()
        self.events.append(
            StateSnapshot(
                tick=tick,
                system={c.value: s.value for c, s in snapshot.system.items()},
                agents={
                    agent_id: {
                        c.value: {"state": st.sas.value, "cross": st.cross.value}
                        for c, st in states.items()
                    }
                    for agent_id, states in snapshot.agents.items()
                },
            )
        )

        # All decisions see the same pre-tick snapshot.
        sas_by_agent = {a: snapshot.agent_sas(a) for a in snapshot.agents}
        proposals: list[tuple[int, Proposal]] = []
        mutations: list[RequirementAdjustment | Destruction] = []
        for index, agent in enumerate(self.pop.agents):
            choice = select(agent, sas_by_agent[agent.id], self.rng)
            if choice is None:
                continue
            self.events.append(
                StrategySelected(
                    tick=tick,
                    agent_id=agent.id,
                    stance=choice.cell.stance.value,
                    state=choice.state.value,
                    resource_class=choice.resource_class.value,
                    label=choice.cell.label,
                    effects=tuple(type(e).__name__ for e in choice.cell.effects),
                )
            )
            agent_proposals, agent_mutations = enact(choice, agent, self.pop, sas_by_agent)
            proposals.extend((index, p) for p in agent_proposals)
            mutations.extend(agent_mutations)

        proposals.sort(
            key=lambda entry: (entry[0], entry[1].rule is None, entry[1].rule.id if entry[1].rule else "")
        )
        uses: dict[str, int] = {}
        for _, proposal in proposals:
            self._resolve_proposal(proposal, uses, flagged)

        for mutation in mutations:
            if isinstance(mutation, RequirementAdjustment):
                self.pop = apply_adjustment(self.pop, mutation)
            else:
                self._destroy(mutation, flagged)

        post = self._snapshot()
        self._record_rows(post)
        self._record_audit(totals_before, flagged)
        if any(condition.met(post) for condition in self.config.stop_conditions):
            self._stopped_early = True
        self.events.append(TickEnd(tick))

    def _snapshot(self) -> Snapshot:
        return snapshot_states(
            self.pop,
            policy=self.policy,
            mode=self.config.mode,
            context=self.config.context,
            system_bands=self.config.system_bands,
        )

    # -- resolution helpers

    def _log_outcome(self, outcome: ExchangeOutcome, applied: bool) -> None:
        self.outcome_counts[outcome.status.e_label] += 1
        self.events.append(OutcomeCommitted(tick=self.tick, outcome=outcome, applied=applied))

    def _mint(self, holder_id: str, item: ResourceItem, count: int, reason: str,
              flagged: dict[tuple[str, str], int]) -> None:
        holder = self.pop.holder(holder_id)
        self.pop = self.pop.replace_holder(holder.with_resources(holder.resources.add(item, count)))
        key = (item.resource_class.value, item.kind)
        flagged[key] = flagged.get(key, 0) + count
        self.events.append(
            NonConservingEvent(
                tick=self.tick,
                holder_id=holder_id,
                resource_class=item.resource_class.value,
                kind=item.kind,
                delta=count,
                reason=reason,
            )
        )

    def _burn(self, holder_id: str, item: ResourceItem, count: int, reason: str,
              flagged: dict[tuple[str, str], int]) -> None:
        holder = self.pop.holder(holder_id)
        available = holder.resources.count(item)
        count = min(count, available)
        if count == 0:
            return
        self.pop = self.pop.replace_holder(
            holder.with_resources(holder.resources.remove(item, count))
        )
        key = (item.resource_class.value, item.kind)
        flagged[key] = flagged.get(key, 0) - count
        self.events.append(
            NonConservingEvent(
                tick=self.tick,
                holder_id=holder_id,
                resource_class=item.resource_class.value,
                kind=item.kind,
                delta=-count,
                reason=reason,
            )
        )

    def _resolve_proposal(self, proposal: Proposal, uses: dict[str, int],
                          flagged: dict[tuple[str, str], int]) -> None:
        if proposal.rule is None:
            self._log_outcome(
                ExchangeOutcome(
                    rule_id=None,
                    giver_id=proposal.giver_id,
                    receiver_id=proposal.receiver_id or proposal.proposer_id,
                    status=OutcomeStatus.FAILURE,
                    failure_reason=FailureReason.NO_APPLICABLE_RULE,
                    note=proposal.note,
                ),
                applied=False,
            )
            return

        rule = proposal.rule
        self.pop = self.pop.with_rule(rule)
        if rule.capacity is not None and uses.get(rule.id, 0) >= rule.capacity:
            self._log_outcome(
                ExchangeOutcome(
                    rule_id=rule.id,
                    giver_id=proposal.giver_id,
                    receiver_id=proposal.receiver_id,
                    status=OutcomeStatus.FAILURE,
                    failure_reason=FailureReason.NO_APPLICABLE_RULE,
                    note="per-tick capacity exhausted",
                ),
                applied=False,
            )
            return

        try:
            giver = self.pop.holder(proposal.giver_id)
            receiver = self.pop.holder(proposal.receiver_id)
        except KeyError as missing:
            self._log_outcome(
                ExchangeOutcome(
                    rule_id=rule.id,
                    giver_id=proposal.giver_id,
                    receiver_id=proposal.receiver_id,
                    status=OutcomeStatus.FAILURE,
                    failure_reason=FailureReason.NO_APPLICABLE_RULE,
                    note=f"unknown party {missing}",
                ),
                applied=False,
            )
            return

        # An investment mints the counterparty's promise before evaluation,
        # but only once the investor's side is feasible.
        if proposal.mint_item is not None and proposal.mint_holder is not None:
            investor_ready = rule.give is None or sum(
                count
                for _, count in matching_items(
                    receiver.resources, rule.give.resource_class, rule.give.kind
                )
            ) >= rule.give.count
            if investor_ready:
                self._mint(proposal.mint_holder, proposal.mint_item, 1, "promise_issued", flagged)
                giver = self.pop.holder(proposal.giver_id)
                receiver = self.pop.holder(proposal.receiver_id)

        try:
            outcome = evaluate(rule, giver, receiver, partial=self.config.partial_commit)
        except (SelfExchange, NonMatchingParties) as error:
            self._log_outcome(
                ExchangeOutcome(
                    rule_id=rule.id,
                    giver_id=proposal.giver_id,
                    receiver_id=proposal.receiver_id,
                    status=OutcomeStatus.FAILURE,
                    failure_reason=FailureReason.NO_APPLICABLE_RULE,
                    note=str(error),
                ),
                applied=False,
            )
            return

        applied = False
        if outcome.succeeded or (self.config.partial_commit and outcome.transfers):
            self.pop = apply_exchange(outcome, self.pop, allow_failure=not outcome.succeeded)
            uses[rule.id] = uses.get(rule.id, 0) + 1
            applied = True
        self._log_outcome(outcome, applied)

        if outcome.succeeded and proposal.schedule is not None:
            self._pending_seq += 1
            self._pending.append(
                (self.tick + proposal.schedule.delay, self._pending_seq, proposal.schedule)
            )

    def _resolve_delivery(self, plan: DeliveryPlan, flagged: dict[tuple[str, str], int]) -> None:
        self.pop = self.pop.with_rule(plan.rule)
        try:
            giver = self.pop.holder(plan.giver_id)
            receiver = self.pop.holder(plan.receiver_id)
            outcome = evaluate(plan.rule, giver, receiver, partial=self.config.partial_commit)
        except (SelfExchange, NonMatchingParties, KeyError) as error:
            self._log_outcome(
                ExchangeOutcome(
                    rule_id=plan.rule.id,
                    giver_id=plan.giver_id,
                    receiver_id=plan.receiver_id,
                    status=OutcomeStatus.FAILURE,
                    failure_reason=FailureReason.NO_APPLICABLE_RULE,
                    note=str(error),
                ),
                applied=False,
            )
            return
        applied = False
        if outcome.succeeded or (self.config.partial_commit and outcome.transfers):
            self.pop = apply_exchange(outcome, self.pop, allow_failure=not outcome.succeeded)
            applied = True
        self._log_outcome(outcome, applied)
        if outcome.succeeded and plan.retire_item is not None:
            # The honored promise returns to its issuer and is retired.
            self._burn(plan.giver_id, plan.retire_item, 1, "promise_retired", flagged)

    def _destroy(self, mutation: Destruction, flagged: dict[tuple[str, str], int]) -> None:
        agent = self.pop.agent(mutation.agent_id)
        remaining = mutation.count
        for item, count in matching_items(agent.resources, mutation.resource_class, mutation.kind):
            if remaining == 0:
                break
            take = min(count, remaining)
            self._burn(agent.id, item, take, "destroyed", flagged)
            remaining -= take

    # -- recording

    def _record_rows(self, snapshot: Snapshot) -> None:
        for resource_class in sorted(ResourceClass, key=lambda c: c.value):
            self.system_rows.append(
                (self.tick, resource_class.value, snapshot.system[resource_class].value)
            )
        for agent_id in sorted(snapshot.agents):
            for resource_class in sorted(ResourceClass, key=lambda c: c.value):
                state = snapshot.agents[agent_id][resource_class]
                self.rows.append(
                    ReportRow(
                        tick=self.tick,
                        agent_id=agent_id,
                        resource_class=resource_class,
                        sas=state.sas,
                        cross=state.cross.value,
                        e_status=_e_status(state.sas),
                        extrapolated=state.cross in EXTRAPOLATED_CROSS_STATES,
                    )
                )

    def _record_audit(self, totals_before: dict[tuple[str, str], int],
                      flagged: dict[tuple[str, str], int]) -> None:
        totals_after = _totals(self.pop)
        keys = set(totals_before) | set(totals_after) | set(flagged)
        for key in sorted(keys):
            delta = totals_after.get(key, 0) - totals_before.get(key, 0)
            marked = flagged.get(key, 0)
            if delta or marked:
                self.audit.append(
                    AuditEntry(
                        tick=self.tick,
                        resource_class=key[0],
                        kind=key[1],
                        delta=delta,
                        flagged=marked,
                    )
                )


def step(
    pop: Population,
    config: SimConfig,
    rng_state: random.Random | None = None,
    policy: SubstitutionPolicy = EMPTY_POLICY,
) -> tuple[Population, list[Event], random.Random]:
    """Execute a single tick and return the updated population, its events,
    and the RNG to thread into the next call."""
    sim = Simulation(pop, config, policy)
    if rng_state is not None:
        sim.rng = rng_state
    events = sim.step()
    return sim.pop, events, sim.rng


def run(
    pop: Population,
    config: SimConfig,
    policy: SubstitutionPolicy = EMPTY_POLICY,
    scenario_name: str = "",
) -> SimReport:
    """Run the configured number of ticks (or until a stop condition holds)."""
    return Simulation(pop, config, policy, scenario_name).run()
