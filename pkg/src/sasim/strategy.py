"""Coping strategies: the four-stance grid over the three resource states.

Four stances toward a resource state (avoid it, reduce it, embrace it,
inflate it) crossed with scarcity, abundance and sufficiency give twelve
cells. The cell labels are indicative names, not algorithms, so each label
is bound to a default effect recipe in a catalog; scenarios override
per-cell effects through the agent's profile. Some labels (homophily,
speculation) have no operational reading in an exchange model and default
to log-only annotations.

Enactment never touches another agent's holdings directly: every movement
between holders is expressed as an exchange proposal for the entitlement
engine, which keeps all transfers traceable to a rule.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Union

from .classify import SasState, SufficiencyBand
from .entitlement import (
    EntitlementRule,
    EntitlementType,
    PartyMatch,
    TransferSpec,
    held_count,
)
from .population import Agent, Population, Requirement
from .resources import CLASS_ORDER, ResourceClass, ResourceItem


class Stance(str, Enum):
    DEFENSIVE = "defensive"
    REACTIVE = "reactive"
    ADAPTIVE = "adaptive"
    CREATIVE = "creative"


ACQUIRE = "acquire"
DISPOSE = "dispose"


@dataclass(frozen=True)
class AdjustRequirement:
    """Shift or replace the sufficiency band of a class; holdings untouched."""

    resource_class: ResourceClass | None = None
    delta: int | None = None
    band: SufficiencyBand | None = None


@dataclass(frozen=True)
class DestroyResources:
    """Remove own holdings from the system; the one non-conserving effect."""

    resource_class: ResourceClass | None = None
    kind: str | None = None
    count: int = 1


@dataclass(frozen=True)
class HoardResources:
    """Keep holdings as they are; a log-only marker of deliberate retention."""

    resource_class: ResourceClass | None = None


@dataclass(frozen=True)
class ProposeExchange:
    """Propose an exchange acquiring (or disposing of) the salient class.

    With no rule id, the first applicable declared rule is used, preferring
    one whose transfers are feasible in the current snapshot.
    """

    mode: str = ACQUIRE
    rule_id: str | None = None


@dataclass(frozen=True)
class Invest:
    """Give resources now against a promise of a larger future return.

    Commitment trades `give` for a service-class promise item; at maturity a
    scheduled delivery trades the promise back for `receive`, succeeding only
    if the counterparty can honor it.
    """

    give: TransferSpec
    receive: TransferSpec
    maturity: int
    counterparty: str | None = None


@dataclass(frozen=True)
class GiveAway:
    """Gift own holdings to an agent in scarcity of the class."""

    resource_class: ResourceClass | None = None
    kind: str | None = None
    count: int = 1
    recipient: str | None = None


EffectPrimitive = Union[
    AdjustRequirement, DestroyResources, HoardResources, ProposeExchange, Invest, GiveAway
]


@dataclass(frozen=True)
class StrategyCell:
    stance: Stance
    state: SasState
    label: str
    effects: tuple[EffectPrimitive, ...] = ()


def _cell(stance: Stance, state: SasState, label: str, *effects: EffectPrimitive) -> StrategyCell:
    return StrategyCell(stance=stance, state=state, label=label, effects=tuple(effects))


DEFAULT_CATALOG: dict[tuple[Stance, SasState], StrategyCell] = {
    (c.stance, c.state): c
    for c in (
        _cell(Stance.DEFENSIVE, SasState.SCARCITY, "debt", ProposeExchange(mode=ACQUIRE)),
        _cell(Stance.DEFENSIVE, SasState.ABUNDANCE, "market_efficiency", ProposeExchange(mode=DISPOSE)),
        _cell(Stance.DEFENSIVE, SasState.SUFFICIENCY, "greed", ProposeExchange(mode=ACQUIRE)),
        _cell(Stance.REACTIVE, SasState.SCARCITY, "austerity", AdjustRequirement(delta=-1)),
        _cell(Stance.REACTIVE, SasState.ABUNDANCE, "homophily"),
        _cell(Stance.REACTIVE, SasState.SUFFICIENCY, "opulence", DestroyResources(count=1)),
        _cell(Stance.ADAPTIVE, SasState.SCARCITY, "innovation"),
        _cell(Stance.ADAPTIVE, SasState.ABUNDANCE, "serialism", HoardResources()),
        _cell(Stance.ADAPTIVE, SasState.SUFFICIENCY, "frugality"),
        _cell(Stance.CREATIVE, SasState.SCARCITY, "speculation"),
        _cell(Stance.CREATIVE, SasState.ABUNDANCE, "lavishness"),
        _cell(Stance.CREATIVE, SasState.SUFFICIENCY, "generosity", GiveAway(count=1)),
    )
}

STATE_SALIENCE = (SasState.SCARCITY, SasState.ABUNDANCE, SasState.SUFFICIENCY)


@dataclass(frozen=True)
class StrategyProfile:
    """An agent's stance preferences and per-cell effect overrides.

    `stance=None` with no per-state stances is the do-nothing profile.
    `stance_weights` makes the stance draw stochastic (seeded by the engine);
    everything else is deterministic.
    """

    stance: Stance | None = None
    stance_by_state: Mapping[SasState, Stance] = field(default_factory=dict)
    stance_weights: Mapping[Stance, float] | None = None
    respond_to: frozenset[SasState] = frozenset({SasState.SCARCITY, SasState.ABUNDANCE})
    salience_classes: tuple[ResourceClass, ...] = CLASS_ORDER
    cell_effects: Mapping[tuple[Stance, SasState], tuple[EffectPrimitive, ...]] = field(
        default_factory=dict
    )


PASSIVE = StrategyProfile()


@dataclass(frozen=True)
class StrategyChoice:
    cell: StrategyCell
    resource_class: ResourceClass
    state: SasState


def select(
    agent: Agent,
    class_states: Mapping[ResourceClass, SasState],
    rng: random.Random | None = None,
) -> StrategyChoice | None:
    """Pick the cell for the most salient (class, state) pair, or nothing.

    Salience orders scarcity before abundance before sufficiency, breaking
    ties by the profile's class order. Undefined relations and states the
    profile does not respond to are skipped.
    """
    profile = agent.strategy
    if profile is None:
        return None

    salient: tuple[ResourceClass, SasState] | None = None
    for state in STATE_SALIENCE:
        if state not in profile.respond_to:
            continue
        for resource_class in profile.salience_classes:
            if class_states.get(resource_class) is state:
                salient = (resource_class, state)
                break
        if salient:
            break
    if salient is None:
        return None
    resource_class, state = salient

    if profile.stance_weights:
        stances = sorted(profile.stance_weights, key=lambda s: s.value)
        weights = [profile.stance_weights[s] for s in stances]
        stance = (rng or random.Random(0)).choices(stances, weights=weights)[0]
    else:
        stance = profile.stance_by_state.get(state, profile.stance)
    if stance is None:
        return None

    cell = DEFAULT_CATALOG[(stance, state)]
    override = profile.cell_effects.get((stance, state))
    if override is not None:
        cell = replace(cell, effects=tuple(override))
    return StrategyChoice(cell=cell, resource_class=resource_class, state=state)


@dataclass(frozen=True)
class DeliveryPlan:
    """A future entitlement evaluation scheduled by an investment."""

    delay: int
    rule: EntitlementRule
    giver_id: str
    receiver_id: str
    retire_item: ResourceItem | None = None


@dataclass(frozen=True)
class Proposal:
    """One exchange the engine should evaluate, in proposer order."""

    proposer_id: str
    rule: EntitlementRule | None
    giver_id: str | None = None
    receiver_id: str | None = None
    synthetic: bool = False
    mint_item: ResourceItem | None = None
    mint_holder: str | None = None
    schedule: DeliveryPlan | None = None
    note: str | None = None


@dataclass(frozen=True)
class RequirementAdjustment:
    agent_id: str
    resource_class: ResourceClass
    band: SufficiencyBand


@dataclass(frozen=True)
class Destruction:
    agent_id: str
    resource_class: ResourceClass
    kind: str
    count: int


Mutation = Union[RequirementAdjustment, Destruction]


def enact(
    choice: StrategyChoice,
    agent: Agent,
    pop: Population,
    class_states_by_agent: Mapping[str, Mapping[ResourceClass, SasState]],
) -> tuple[list[Proposal], list[Mutation]]:
    """Turn a selected cell into exchange proposals and self-directed mutations."""
    proposals: list[Proposal] = []
    mutations: list[Mutation] = []
    for effect in choice.cell.effects:
        if isinstance(effect, ProposeExchange):
            proposals.append(_propose(effect, agent, pop, choice.resource_class))
        elif isinstance(effect, Invest):
            proposals.append(_invest(effect, agent, pop))
        elif isinstance(effect, GiveAway):
            proposal = _give_away(effect, agent, choice.resource_class, class_states_by_agent)
            if proposal is not None:
                proposals.append(proposal)
        elif isinstance(effect, AdjustRequirement):
            adjustment = _adjust(effect, agent, choice.resource_class)
            if adjustment is not None:
                mutations.append(adjustment)
        elif isinstance(effect, DestroyResources):
            destruction = _destroy(effect, agent, choice.resource_class)
            if destruction is not None:
                mutations.append(destruction)
        # HoardResources: retention only; the selection event already records it.
    return proposals, mutations


def _applicable(rule: EntitlementRule, agent: Agent, mode: str, target: ResourceClass) -> bool:
    if not rule.enabled or rule.etype is EntitlementType.OWNERSHIP:
        return False
    if not rule.receiver_match.matches(agent):
        return False
    if mode == ACQUIRE:
        return rule.receive is not None and rule.receive.resource_class is target
    return rule.give is not None and rule.give.resource_class is target


def _counterparties(rule: EntitlementRule, agent: Agent, pop: Population) -> list[Agent]:
    parties = [a for a in pop.agents if a.id != agent.id and rule.giver_match.matches(a)]
    if pop.reservoir is not None and rule.giver_match.matches(pop.reservoir):
        parties.append(pop.reservoir)
    return parties


def _feasible(rule: EntitlementRule, agent: Agent, counterparty: Agent) -> bool:
    if rule.give and held_count(agent.resources, rule.give.resource_class, rule.give.kind) < rule.give.count:
        return False
    if rule.receive and held_count(
        counterparty.resources, rule.receive.resource_class, rule.receive.kind
    ) < rule.receive.count:
        return False
    return True


def _propose(effect: ProposeExchange, agent: Agent, pop: Population, target: ResourceClass) -> Proposal:
    if effect.rule_id is not None:
        try:
            candidates = [pop.rule(effect.rule_id)]
        except KeyError:
            return Proposal(
                proposer_id=agent.id, rule=None, note=f"rule {effect.rule_id!r} not declared"
            )
    else:
        candidates = [r for r in pop.rules if _applicable(r, agent, effect.mode, target)]

    fallback: Proposal | None = None
    for rule in candidates:
        for counterparty in _counterparties(rule, agent, pop):
            proposal = Proposal(
                proposer_id=agent.id,
                rule=rule,
                giver_id=counterparty.id,
                receiver_id=agent.id,
            )
            if _feasible(rule, agent, counterparty):
                return proposal
            if fallback is None:
                fallback = proposal
    if fallback is not None:
        return fallback
    return Proposal(
        proposer_id=agent.id,
        rule=None,
        receiver_id=agent.id,
        note=f"no applicable rule to {effect.mode} {target.value}",
    )


def _invest(effect: Invest, agent: Agent, pop: Population) -> Proposal:
    if effect.counterparty is not None:
        counterparty_id = effect.counterparty
    elif pop.reservoir is not None:
        counterparty_id = pop.reservoir.id
    else:
        others = [a.id for a in pop.agents if a.id != agent.id]
        if not others:
            return Proposal(proposer_id=agent.id, rule=None, note="no investment counterparty")
        counterparty_id = others[0]

    promise = ResourceItem(
        ResourceClass.SERVICE, "promise", frozenset({f"invest:{agent.id}"})
    )
    commitment = EntitlementRule(
        id=f"invest:{agent.id}",
        etype=EntitlementType.TRADE,
        giver_match=PartyMatch(ids=frozenset({counterparty_id})),
        receiver_match=PartyMatch(ids=frozenset({agent.id})),
        give=effect.give,
        receive=TransferSpec(ResourceClass.SERVICE, "promise", 1),
    )
    delivery = EntitlementRule(
        id=f"invest-delivery:{agent.id}",
        etype=EntitlementType.TRADE,
        giver_match=PartyMatch(ids=frozenset({counterparty_id})),
        receiver_match=PartyMatch(ids=frozenset({agent.id})),
        give=TransferSpec(ResourceClass.SERVICE, "promise", 1),
        receive=effect.receive,
    )
    return Proposal(
        proposer_id=agent.id,
        rule=commitment,
        giver_id=counterparty_id,
        receiver_id=agent.id,
        synthetic=True,
        mint_item=promise,
        mint_holder=counterparty_id,
        schedule=DeliveryPlan(
            delay=effect.maturity,
            rule=delivery,
            giver_id=counterparty_id,
            receiver_id=agent.id,
            retire_item=promise,
        ),
    )


def _give_away(
    effect: GiveAway,
    agent: Agent,
    salient: ResourceClass,
    class_states_by_agent: Mapping[str, Mapping[ResourceClass, SasState]],
) -> Proposal | None:
    resource_class = effect.resource_class or salient
    if effect.recipient is not None:
        recipient = effect.recipient
    else:
        recipient = next(
            (
                other_id
                for other_id, states in class_states_by_agent.items()
                if other_id != agent.id and states.get(resource_class) is SasState.SCARCITY
            ),
            None,
        )
    if recipient is None:
        return None

    kind = effect.kind or _most_held_kind(agent, resource_class)
    if kind is None:
        return None
    count = min(effect.count, held_count(agent.resources, resource_class, kind))
    if count == 0:
        return None

    rule = EntitlementRule(
        id=f"giveaway:{agent.id}:{recipient}:{resource_class.value}:{kind}",
        etype=EntitlementType.GIFT,
        giver_match=PartyMatch(ids=frozenset({agent.id})),
        receiver_match=PartyMatch(ids=frozenset({recipient})),
        receive=TransferSpec(resource_class, kind, count),
    )
    return Proposal(
        proposer_id=agent.id,
        rule=rule,
        giver_id=agent.id,
        receiver_id=recipient,
        synthetic=True,
    )


def _most_held_kind(agent: Agent, resource_class: ResourceClass) -> str | None:
    holdings: dict[str, int] = {}
    for item, count in agent.resources_in(resource_class).items():
        holdings[item.kind] = holdings.get(item.kind, 0) + count
    if not holdings:
        return None
    return min(holdings, key=lambda kind: (-holdings[kind], kind))


def _adjust(
    effect: AdjustRequirement, agent: Agent, salient: ResourceClass
) -> RequirementAdjustment | None:
    resource_class = effect.resource_class or salient
    requirement = agent.requirements.get(resource_class)
    if requirement is None:
        return None
    if effect.band is not None:
        return RequirementAdjustment(agent.id, resource_class, effect.band)
    if effect.delta is None:
        return None
    current = requirement.band or SufficiencyBand.exact(requirement.items.cardinality)
    lower = max(0, current.lower + effect.delta)
    upper = None if current.upper is None else max(lower, current.upper + effect.delta)
    return RequirementAdjustment(agent.id, resource_class, SufficiencyBand(lower, upper))


def _destroy(effect: DestroyResources, agent: Agent, salient: ResourceClass) -> Destruction | None:
    resource_class = effect.resource_class or salient
    kind = effect.kind or _most_held_kind(agent, resource_class)
    if kind is None:
        return None
    count = min(effect.count, held_count(agent.resources, resource_class, kind))
    if count == 0:
        return None
    return Destruction(agent.id, resource_class, kind, count)


def apply_adjustment(pop: Population, adjustment: RequirementAdjustment) -> Population:
    agent = pop.agent(adjustment.agent_id)
    requirement = agent.requirements.get(adjustment.resource_class)
    if requirement is None:
        requirement = Requirement()
    return pop.replace_holder(
        agent.with_requirement(
            adjustment.resource_class, Requirement(items=requirement.items, band=adjustment.band)
        )
    )
