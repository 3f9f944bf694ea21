"""The six resource classes, resource items, and within-class substitutability.

Resource classes sit on two ordinal axes: particularity (how much it matters
who gives the resource; love is maximal, money minimal) and concreteness
(goods and services are the most tangible, information and status the least,
money and love in between). Substitution between kinds inside a class is
scenario data, not a built-in: usability is context-relative, so a policy
declares which kind stands in for which, per context tag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple

from .errors import MixedClasses
from .multiset import Multiset

DEFAULT_CONTEXT = "default"


class ResourceClass(str, Enum):
    LOVE = "love"
    STATUS = "status"
    INFORMATION = "information"
    MONEY = "money"
    GOODS = "goods"
    SERVICE = "service"

    @property
    def particularity(self) -> int:
        return _PARTICULARITY[self]

    @property
    def concreteness(self) -> int:
        return _CONCRETENESS[self]


_PARTICULARITY = {
    ResourceClass.LOVE: 2,
    ResourceClass.STATUS: 1,
    ResourceClass.INFORMATION: 1,
    ResourceClass.GOODS: 1,
    ResourceClass.SERVICE: 1,
    ResourceClass.MONEY: 0,
}

_CONCRETENESS = {
    ResourceClass.GOODS: 2,
    ResourceClass.SERVICE: 2,
    ResourceClass.MONEY: 1,
    ResourceClass.LOVE: 1,
    ResourceClass.INFORMATION: 0,
    ResourceClass.STATUS: 0,
}

# Deterministic tie-break order used by strategy selection and reporting.
CLASS_ORDER = (
    ResourceClass.GOODS,
    ResourceClass.MONEY,
    ResourceClass.SERVICE,
    ResourceClass.INFORMATION,
    ResourceClass.STATUS,
    ResourceClass.LOVE,
)


@dataclass(frozen=True)
class ResourceItem:
    """One element of a requirement or resource bag.

    `kind` names what the item is ("horse", "silk", "food"); `quality_tags`
    carry descriptive qualities ("white", "black") that distinguish otherwise
    identical kinds without affecting kind-level substitution.
    """

    resource_class: ResourceClass
    kind: str
    quality_tags: frozenset[str] = field(default=frozenset())

    def __post_init__(self):
        if not self.kind:
            raise ValueError("ResourceItem.kind must be non-empty")
        object.__setattr__(self, "quality_tags", frozenset(self.quality_tags))

    def __str__(self) -> str:
        tags = f"[{','.join(sorted(self.quality_tags))}]" if self.quality_tags else ""
        return f"{self.resource_class.value}:{self.kind}{tags}"

    def sort_key(self) -> tuple:
        return (self.resource_class.value, self.kind, tuple(sorted(self.quality_tags)))


class SubstitutionEntry(NamedTuple):
    resource_class: ResourceClass
    from_kind: str
    to_kind: str
    context: str


class SubstitutionPolicy:
    """Directional, context-tagged substitution rules within one class.

    An entry (cls, a, b, ctx) declares that kind `b` may satisfy a requirement
    for kind `a` in context `ctx`. Every kind substitutes for itself in every
    context; that reflexive closure is implicit.
    """

    def __init__(self, entries: Iterable[SubstitutionEntry] = ()):
        self._entries = frozenset(SubstitutionEntry(*e) for e in entries)

    def allows(self, resource_class: ResourceClass, from_kind: str, to_kind: str, context: str) -> bool:
        if from_kind == to_kind:
            return True
        return SubstitutionEntry(resource_class, from_kind, to_kind, context) in self._entries

    def entries(self) -> frozenset[SubstitutionEntry]:
        return self._entries

    def __eq__(self, other) -> bool:
        if isinstance(other, SubstitutionPolicy):
            return self._entries == other._entries
        return NotImplemented

    def __repr__(self) -> str:
        return f"SubstitutionPolicy({sorted(self._entries)!r})"


EMPTY_POLICY = SubstitutionPolicy()


def satisfies(
    item: ResourceItem,
    required: ResourceItem,
    policy: SubstitutionPolicy = EMPTY_POLICY,
    context: str = DEFAULT_CONTEXT,
) -> bool:
    """True iff `item` can stand in for `required` in the given context.

    Substitution never crosses resource classes; cross-class conversion only
    happens through exchange.
    """
    if item.resource_class is not required.resource_class:
        return False
    return policy.allows(item.resource_class, required.kind, item.kind, context)


class Coverage(NamedTuple):
    covered: int
    surplus: int


def coverage_count(
    available: Multiset,
    required: Multiset,
    policy: SubstitutionPolicy = EMPTY_POLICY,
    context: str = DEFAULT_CONTEXT,
) -> Coverage:
    """Count how many required items the available bag can satisfy.

    `covered` is the size of a maximum matching between required and available
    items under `satisfies`; `surplus` is the number of available items left
    unmatched. Matching makes the count order-independent when substitution
    makes items interchangeable.
    """
    classes = {e.resource_class for e in available} | {e.resource_class for e in required}
    if len(classes) > 1:
        raise MixedClasses(f"coverage_count inputs span classes {sorted(c.value for c in classes)}")

    required_instances = _instances(required)
    available_instances = _instances(available)

    # Kuhn's augmenting-path matching; instances are small.
    edges: list[list[int]] = []
    for req in required_instances:
        edges.append(
            [j for j, avail in enumerate(available_instances) if satisfies(avail, req, policy, context)]
        )

    match_of_available: dict[int, int] = {}

    def try_assign(i: int, visited: set[int]) -> bool:
        for j in edges[i]:
            if j in visited:
                continue
            visited.add(j)
            if j not in match_of_available or try_assign(match_of_available[j], visited):
                match_of_available[j] = i
                return True
        return False

    covered = sum(1 for i in range(len(required_instances)) if try_assign(i, set()))
    return Coverage(covered=covered, surplus=len(available_instances) - covered)


def _instances(bag: Multiset) -> list[ResourceItem]:
    out: list[ResourceItem] = []
    for element, count in sorted(bag.items(), key=lambda pair: pair[0].sort_key()):
        out.extend([element] * count)
    return out
