"""Agents, the closed system they form, and per-snapshot classification.

Each agent holds a requirement bag per class (optionally with a sufficiency
band) and one resource bag. The system level is the aggregate of everyone
inside the closed system: requirement and resource bags summed over agents.
An optional reservoir pseudo-agent stands for the generalized counterparty
(a market pool, a welfare state); it holds resources that count toward the
system totals but has no requirements of its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterator, Mapping

from .classify import (
    CrossState,
    RAW,
    SasState,
    SufficiencyBand,
    classify,
    classify_agent,
    classify_coverage,
    cross_classify,
)
from .multiset import EMPTY, Multiset
from .resources import (
    DEFAULT_CONTEXT,
    EMPTY_POLICY,
    ResourceClass,
    ResourceItem,
    SubstitutionPolicy,
    coverage_count,
)

if TYPE_CHECKING:
    from .entitlement import EntitlementRule
    from .strategy import StrategyProfile

RESERVOIR_ID = "reservoir"


@dataclass(frozen=True)
class Requirement:
    """A declared requirement relation for one class: items plus optional band."""

    items: Multiset = EMPTY
    band: SufficiencyBand | None = None


@dataclass(frozen=True)
class Agent:
    id: str
    requirements: Mapping[ResourceClass, Requirement] = field(default_factory=dict)
    resources: Multiset = EMPTY
    strategy: "StrategyProfile | None" = None
    attributes: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise ValueError("agent id must be non-empty")
        for item in self.resources:
            if not isinstance(item, ResourceItem):
                raise ValueError(f"resources must contain ResourceItems, got {item!r}")
        for resource_class, requirement in self.requirements.items():
            for item in requirement.items:
                if not isinstance(item, ResourceItem):
                    raise ValueError(f"requirements must contain ResourceItems, got {item!r}")
                if item.resource_class is not resource_class:
                    raise ValueError(
                        f"requirement for {resource_class.value} contains {item} of another class"
                    )

    def resources_in(self, resource_class: ResourceClass) -> Multiset:
        return self.resources.filter(lambda item: item.resource_class is resource_class)

    def requirement_cardinality(self, resource_class: ResourceClass) -> int:
        requirement = self.requirements.get(resource_class)
        return requirement.items.cardinality if requirement else 0

    def with_resources(self, resources: Multiset) -> Agent:
        return replace(self, resources=resources)

    def with_requirement(self, resource_class: ResourceClass, requirement: Requirement) -> Agent:
        updated = dict(self.requirements)
        updated[resource_class] = requirement
        return replace(self, requirements=updated)


def make_reservoir(resources: Multiset) -> Agent:
    return Agent(id=RESERVOIR_ID, resources=resources)


@dataclass(frozen=True)
class Population:
    """All agents of the closed system, the exchange rules, and the reservoir."""

    agents: tuple[Agent, ...]
    rules: tuple["EntitlementRule", ...] = ()
    reservoir: Agent | None = None

    def __post_init__(self):
        if not self.agents:
            raise ValueError("a population needs at least one agent")
        seen: set[str] = set()
        for agent in self.agents:
            if agent.id == RESERVOIR_ID:
                raise ValueError(f"agent id {RESERVOIR_ID!r} is reserved for the reservoir")
            if agent.id in seen:
                raise ValueError(f"duplicate agent id {agent.id!r}")
            seen.add(agent.id)
        if self.reservoir is not None:
            if self.reservoir.id != RESERVOIR_ID:
                raise ValueError(f"reservoir must use the reserved id {RESERVOIR_ID!r}")
            if self.reservoir.requirements:
                raise ValueError("the reservoir has no requirements of its own")

    def holders(self) -> Iterator[Agent]:
        """Agents plus the reservoir, in deterministic order."""
        yield from self.agents
        if self.reservoir is not None:
            yield self.reservoir

    def holder(self, holder_id: str) -> Agent:
        if holder_id == RESERVOIR_ID:
            if self.reservoir is None:
                raise KeyError(holder_id)
            return self.reservoir
        return self.agent(holder_id)

    def agent(self, agent_id: str) -> Agent:
        for agent in self.agents:
            if agent.id == agent_id:
                return agent
        raise KeyError(agent_id)

    def replace_holder(self, updated: Agent) -> Population:
        if updated.id == RESERVOIR_ID:
            return replace(self, reservoir=updated)
        agents = tuple(updated if a.id == updated.id else a for a in self.agents)
        return replace(self, agents=agents)

    def rule(self, rule_id: str) -> "EntitlementRule":
        for rule in self.rules:
            if rule.id == rule_id:
                return rule
        raise KeyError(rule_id)

    def with_rule(self, rule: "EntitlementRule") -> Population:
        if any(r.id == rule.id for r in self.rules):
            return self
        return replace(self, rules=self.rules + (rule,))


@dataclass(frozen=True)
class SystemView:
    """The aggregates R_s and A_s at one instant, split per class."""

    aggregate_requirements: Mapping[ResourceClass, Multiset]
    aggregate_resources: Mapping[ResourceClass, Multiset]
    declared_classes: frozenset[ResourceClass]


def aggregate(pop: Population) -> SystemView:
    """Bag-sum every agent's bags per class; the reservoir counts toward
    resources only."""
    requirements: dict[ResourceClass, Multiset] = {c: EMPTY for c in ResourceClass}
    resources: dict[ResourceClass, Multiset] = {c: EMPTY for c in ResourceClass}
    declared: set[ResourceClass] = set()
    for agent in pop.agents:
        for resource_class, requirement in agent.requirements.items():
            declared.add(resource_class)
            requirements[resource_class] = requirements[resource_class] + requirement.items
    for holder in pop.holders():
        for resource_class in ResourceClass:
            resources[resource_class] = resources[resource_class] + holder.resources_in(resource_class)
    return SystemView(
        aggregate_requirements=requirements,
        aggregate_resources=resources,
        declared_classes=frozenset(declared),
    )


@dataclass(frozen=True)
class AgentClassState:
    sas: SasState
    cross: CrossState


@dataclass(frozen=True)
class Snapshot:
    system: Mapping[ResourceClass, SasState]
    agents: Mapping[str, Mapping[ResourceClass, AgentClassState]]
    view: SystemView

    def agent_sas(self, agent_id: str) -> dict[ResourceClass, SasState]:
        return {c: s.sas for c, s in self.agents[agent_id].items()}


def _aggregate_band(pop: Population, resource_class: ResourceClass) -> SufficiencyBand:
    """Sum the declared optimal ranges for a class across agents.

    Agents without an explicit band contribute their degenerate range
    (requirement cardinality on both bounds), so band-free populations
    reduce to the plain exact-equality comparison of R_s against A_s. An
    unbounded upper anywhere makes the system upper unbounded.
    """
    lower = 0
    upper: int | None = 0
    for agent in pop.agents:
        requirement = agent.requirements.get(resource_class)
        if requirement is None:
            continue
        band = requirement.band or SufficiencyBand.exact(requirement.items.cardinality)
        lower += band.lower
        upper = None if (upper is None or band.upper is None) else upper + band.upper
    return SufficiencyBand(lower, upper)


def snapshot_states(
    pop: Population,
    policy: SubstitutionPolicy = EMPTY_POLICY,
    mode: str = RAW,
    context: str = DEFAULT_CONTEXT,
    system_bands: Mapping[ResourceClass, SufficiencyBand] | None = None,
) -> Snapshot:
    """Classify every agent and the system, then cross the two levels.

    The system holds no entitlements of its own: its state compares the
    plain aggregates R_s and A_s. The comparison point is the sum of the
    agents' declared optimal ranges (exact equality when no agent declares
    a band), so a one-agent system always mirrors its agent and can never
    read as quasi anything. A scenario-declared system band overrides the
    aggregated one.
    """
    view = aggregate(pop)
    system: dict[ResourceClass, SasState] = {}
    for resource_class in ResourceClass:
        if resource_class not in view.declared_classes:
            system[resource_class] = SasState.UNDEFINED
            continue
        band = (system_bands or {}).get(resource_class) or _aggregate_band(pop, resource_class)
        if mode == RAW:
            system[resource_class] = classify(
                view.aggregate_requirements[resource_class].cardinality,
                view.aggregate_resources[resource_class].cardinality,
                band,
            )
        else:
            covered, surplus = coverage_count(
                view.aggregate_resources[resource_class],
                view.aggregate_requirements[resource_class],
                policy,
                context,
            )
            system[resource_class] = classify_coverage(covered, surplus, band)

    agents: dict[str, dict[ResourceClass, AgentClassState]] = {}
    for agent in pop.agents:
        individual = classify_agent(agent, policy, mode, context)
        agents[agent.id] = {
            resource_class: AgentClassState(
                sas=individual[resource_class],
                cross=cross_classify(individual[resource_class], system[resource_class]),
            )
            for resource_class in ResourceClass
        }
    return Snapshot(system=system, agents=agents, view=view)
