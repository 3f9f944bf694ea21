"""Entitlement rules and their evaluation into success/failure outcomes.

A rule declares the socially accepted conditions under which two parties may
exchange: what the receiver (the beneficiary) surrenders and what the giver
(the counterparty) supplies. Rules come in the four classic entitlement
relations: ownership, trade, gift, extraction. Evaluating a rule yields an
outcome whose status encodes E+ (the exchange made enough of the requested
class available to meet the receiver's requirement) or E- (it did not),
with a reason distinguishing a missing counterparty, missing holdings, a
rule that worked as designed yet fell short, and illegitimate-rule use.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping

from .errors import NonMatchingParties, NoReservoir, SelfExchange, StaleOutcome
from .multiset import Multiset
from .population import Agent, Population
from .resources import ResourceClass, ResourceItem


class EntitlementType(str, Enum):
    OWNERSHIP = "ownership"
    TRADE = "trade"
    GIFT = "gift"
    EXTRACTION = "extraction"


class OutcomeStatus(str, Enum):
    SUCCESS = "success"
    FAILURE = "failure"

    @property
    def e_label(self) -> str:
        return "E+" if self is OutcomeStatus.SUCCESS else "E-"


class FailureReason(str, Enum):
    DESIGN_FLAW = "design_flaw"
    RULE_VIOLATION = "rule_violation"
    INSUFFICIENT_HOLDINGS = "insufficient_holdings"
    NO_APPLICABLE_RULE = "no_applicable_rule"


GIVER_TO_RECEIVER = "giver_to_receiver"
RECEIVER_TO_GIVER = "receiver_to_giver"


@dataclass(frozen=True)
class TransferSpec:
    """(class, kind, count) of resources one side must move per execution."""

    resource_class: ResourceClass
    kind: str
    count: int

    def __post_init__(self):
        if self.count <= 0:
            raise ValueError("transfer count must be positive")
        if not self.kind:
            raise ValueError("transfer kind must be non-empty")


@dataclass(frozen=True)
class PartyMatch:
    """Predicate over a party: by id set and/or attribute constraints.

    An empty match accepts anyone, reservoir included.
    """

    ids: frozenset[str] | None = None
    attrs_equal: Mapping[str, object] | None = None
    attrs_min: Mapping[str, float] | None = None

    def matches(self, agent: Agent) -> bool:
        if self.ids is not None and agent.id not in self.ids:
            return False
        if self.attrs_equal:
            for key, expected in self.attrs_equal.items():
                if agent.attributes.get(key) != expected:
                    return False
        if self.attrs_min:
            for key, minimum in self.attrs_min.items():
                value = agent.attributes.get(key)
                if not isinstance(value, (int, float)) or value < minimum:
                    return False
        return True


ANYONE = PartyMatch()


@dataclass(frozen=True)
class EntitlementRule:
    """One legitimate exchange relation.

    `give` is what the receiver surrenders to the giver; `receive` is what
    the receiver obtains from the giver. Trade needs both; a gift moves
    only `receive` (the receiver surrenders nothing); an extraction moves
    only `give` (the taking, with nothing in return); ownership moves
    nothing and merely asserts that a holding is legitimate.
    """

    id: str
    etype: EntitlementType
    giver_match: PartyMatch = ANYONE
    receiver_match: PartyMatch = ANYONE
    give: TransferSpec | None = None
    receive: TransferSpec | None = None
    legitimate: bool = True
    capacity: int | None = None
    enabled: bool = True

    def __post_init__(self):
        if not self.id:
            raise ValueError("rule id must be non-empty")
        if self.capacity is not None and self.capacity < 1:
            raise ValueError("capacity must be positive when set")
        shape = (self.give is not None, self.receive is not None)
        expected = {
            EntitlementType.TRADE: (True, True),
            EntitlementType.GIFT: (False, True),
            EntitlementType.EXTRACTION: (True, False),
            EntitlementType.OWNERSHIP: (False, False),
        }[self.etype]
        if shape != expected:
            raise ValueError(
                f"{self.etype.value} rule {self.id!r} has wrong give/receive shape {shape}"
            )


@dataclass(frozen=True)
class Transfer:
    """One concrete movement of tagged items between two holders."""

    direction: str
    from_id: str
    to_id: str
    item: ResourceItem
    count: int


@dataclass(frozen=True)
class ExchangeOutcome:
    rule_id: str | None
    giver_id: str | None
    receiver_id: str | None
    transfers: tuple[Transfer, ...] = ()
    status: OutcomeStatus = OutcomeStatus.FAILURE
    failure_reason: FailureReason | None = None
    illegitimate: bool = False
    note: str | None = None

    @property
    def succeeded(self) -> bool:
        return self.status is OutcomeStatus.SUCCESS


def matching_items(
    holdings: Multiset, resource_class: ResourceClass, kind: str
) -> list[tuple[ResourceItem, int]]:
    """Concrete (item, count) entries of one class and kind, in deterministic
    tag order. Quality tags never gate a transfer; they ride along with the
    items that move."""
    matches = [
        (item, count)
        for item, count in holdings.items()
        if isinstance(item, ResourceItem)
        and item.resource_class is resource_class
        and item.kind == kind
    ]
    matches.sort(key=lambda pair: pair[0].sort_key())
    return matches


def held_count(holdings: Multiset, resource_class: ResourceClass, kind: str) -> int:
    return sum(count for _, count in matching_items(holdings, resource_class, kind))


def _held(holdings: Multiset, spec: TransferSpec) -> int:
    return held_count(holdings, spec.resource_class, spec.kind)


def _plan_side(
    holder: Agent, spec: TransferSpec, moved: int, direction: str, to_id: str
) -> list[Transfer]:
    transfers: list[Transfer] = []
    remaining = moved
    for item, count in matching_items(holder.resources, spec.resource_class, spec.kind):
        if remaining == 0:
            break
        take = min(count, remaining)
        transfers.append(
            Transfer(direction=direction, from_id=holder.id, to_id=to_id, item=item, count=take)
        )
        remaining -= take
    return transfers


def evaluate(
    rule: EntitlementRule,
    giver: Agent,
    receiver: Agent,
    *,
    partial: bool = False,
) -> ExchangeOutcome:
    """Evaluate a rule between two parties without mutating anything.

    Success means every specified transfer is feasible in full and the
    receiver's post-exchange availability in the requested class covers the
    receiver's requirement cardinality for that class. With `partial`, an
    under-resourced exchange lists the proportionally feasible transfers
    (still a failure) so a scenario may commit them.
    """
    if rule.etype is EntitlementType.OWNERSHIP:
        if not rule.receiver_match.matches(receiver):
            raise NonMatchingParties(f"rule {rule.id!r} does not cover {receiver.id!r}")
        return ExchangeOutcome(
            rule_id=rule.id,
            giver_id=giver.id,
            receiver_id=receiver.id,
            status=OutcomeStatus.SUCCESS,
            illegitimate=not rule.legitimate,
            note="ownership asserted",
        )

    if giver.id == receiver.id:
        raise SelfExchange(f"{giver.id!r} cannot exchange with itself")
    if not rule.giver_match.matches(giver):
        raise NonMatchingParties(f"rule {rule.id!r} giver predicate rejects {giver.id!r}")
    if not rule.receiver_match.matches(receiver):
        raise NonMatchingParties(f"rule {rule.id!r} receiver predicate rejects {receiver.id!r}")

    give_held = _held(receiver.resources, rule.give) if rule.give else 0
    receive_held = _held(giver.resources, rule.receive) if rule.receive else 0

    # Exact rational ratio of the binding side, so partial transfers scale
    # both sides of the exchange rate without float drift.
    ratio = Fraction(1)
    if rule.give:
        ratio = min(ratio, Fraction(give_held, rule.give.count))
    if rule.receive:
        ratio = min(ratio, Fraction(receive_held, rule.receive.count))
    full = ratio >= 1

    give_moved = 0
    if rule.give:
        give_moved = rule.give.count if full else int(rule.give.count * ratio)
    receive_moved = 0
    if rule.receive:
        receive_moved = rule.receive.count if full else int(rule.receive.count * ratio)

    transfers: list[Transfer] = []
    if full or partial:
        if rule.give and give_moved:
            transfers.extend(
                _plan_side(receiver, rule.give, give_moved, RECEIVER_TO_GIVER, giver.id)
            )
        if rule.receive and receive_moved:
            transfers.extend(
                _plan_side(giver, rule.receive, receive_moved, GIVER_TO_RECEIVER, receiver.id)
            )

    if not full:
        return ExchangeOutcome(
            rule_id=rule.id,
            giver_id=giver.id,
            receiver_id=receiver.id,
            transfers=tuple(transfers),
            status=OutcomeStatus.FAILURE,
            failure_reason=FailureReason.RULE_VIOLATION
            if not rule.legitimate
            else FailureReason.INSUFFICIENT_HOLDINGS,
            illegitimate=not rule.legitimate,
        )

    # Full transfers: success is decided by whether the requested class ends
    # up covering the receiver's requirement.
    if rule.receive:
        requested = rule.receive.resource_class
        post = receiver.resources_in(requested).cardinality + receive_moved
        if rule.give and rule.give.resource_class is requested:
            post -= give_moved
        required = receiver.requirement_cardinality(requested)
        fulfilled = post >= required
    else:
        fulfilled = True

    if fulfilled:
        return ExchangeOutcome(
            rule_id=rule.id,
            giver_id=giver.id,
            receiver_id=receiver.id,
            transfers=tuple(transfers),
            status=OutcomeStatus.SUCCESS,
            illegitimate=not rule.legitimate,
        )
    return ExchangeOutcome(
        rule_id=rule.id,
        giver_id=giver.id,
        receiver_id=receiver.id,
        transfers=tuple(transfers),
        status=OutcomeStatus.FAILURE,
        failure_reason=FailureReason.RULE_VIOLATION
        if not rule.legitimate
        else FailureReason.DESIGN_FLAW,
        illegitimate=not rule.legitimate,
    )


def apply(outcome: ExchangeOutcome, pop: Population, *, allow_failure: bool = False) -> Population:
    """Commit an outcome's transfers, returning the updated population.

    Only successful outcomes commit by default; `allow_failure` lets a
    scenario commit the partial transfers of a failed exchange. Raises
    StaleOutcome when holdings changed since evaluation.
    """
    if not outcome.succeeded and not allow_failure:
        raise StaleOutcome(
            f"outcome of rule {outcome.rule_id!r} is a failure; pass allow_failure to commit"
        )
    for transfer in outcome.transfers:
        try:
            source = pop.holder(transfer.from_id)
        except KeyError:
            raise StaleOutcome(f"holder {transfer.from_id!r} not found")
        if source.resources.count(transfer.item) < transfer.count:
            raise StaleOutcome(
                f"{transfer.from_id!r} no longer holds {transfer.count} x {transfer.item}"
            )
        pop = pop.replace_holder(source.with_resources(source.resources.remove(transfer.item, transfer.count)))
        target = pop.holder(transfer.to_id)
        pop = pop.replace_holder(target.with_resources(target.resources.add(transfer.item, transfer.count)))
    return pop


def evaluate_with_system(
    rule: EntitlementRule,
    agent: Agent,
    pop: Population,
    *,
    partial: bool = False,
) -> ExchangeOutcome:
    """Evaluate a rule with the reservoir as the generalized counterparty."""
    if pop.reservoir is None:
        raise NoReservoir("population has no reservoir to exchange with")
    return evaluate(rule, giver=pop.reservoir, receiver=agent, partial=partial)
