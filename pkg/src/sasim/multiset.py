"""Multiset (bag) algebra.

Requirement and resource sets are bags: the same element may occur several
times, and the cardinality counts occurrences, not distinct elements.
Instances are immutable values; every operation returns a new multiset.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Iterator, Mapping

from .errors import InsufficientMultiplicity


class Multiset:
    """An immutable bag of hashable elements with positive integer multiplicities."""

    __slots__ = ("_counts",)

    def __init__(self, counts: Mapping[Hashable, int] | None = None):
        entries: dict[Hashable, int] = {}
        if counts:
            for element, count in counts.items():
                if not isinstance(count, int) or count < 0:
                    raise ValueError(f"multiplicity of {element!r} must be a non-negative int, got {count!r}")
                if count > 0:
                    entries[element] = count
        self._counts = entries

    @classmethod
    def from_elements(cls, elements: Iterable[Hashable]) -> Multiset:
        counts: dict[Hashable, int] = {}
        for element in elements:
            counts[element] = counts.get(element, 0) + 1
        return cls(counts)

    @property
    def cardinality(self) -> int:
        """Total number of occurrences (the |.| of a bag)."""
        return sum(self._counts.values())

    def count(self, element: Hashable) -> int:
        return self._counts.get(element, 0)

    def add(self, element: Hashable, count: int = 1) -> Multiset:
        if count < 0:
            raise ValueError("count must be non-negative")
        if count == 0:
            return self
        merged = dict(self._counts)
        merged[element] = merged.get(element, 0) + count
        return Multiset(merged)

    def remove(self, element: Hashable, count: int = 1) -> Multiset:
        """Remove `count` occurrences of `element`.

        Raises InsufficientMultiplicity if fewer than `count` are held,
        which is how an exchange moving resources the giver does not hold
        surfaces.
        """
        if count < 0:
            raise ValueError("count must be non-negative")
        if count == 0:
            return self
        held = self._counts.get(element, 0)
        if held < count:
            raise InsufficientMultiplicity(element, count, held)
        reduced = dict(self._counts)
        if held == count:
            del reduced[element]
        else:
            reduced[element] = held - count
        return Multiset(reduced)

    def __add__(self, other: Multiset) -> Multiset:
        """Bag sum: multiplicities add elementwise (the additive union)."""
        if not isinstance(other, Multiset):
            return NotImplemented
        merged = dict(self._counts)
        for element, count in other._counts.items():
            merged[element] = merged.get(element, 0) + count
        return Multiset(merged)

    def filter(self, predicate) -> Multiset:
        return Multiset({e: c for e, c in self._counts.items() if predicate(e)})

    def counts(self) -> dict[Hashable, int]:
        """A copy of the element -> multiplicity map."""
        return dict(self._counts)

    def items(self) -> Iterator[tuple[Hashable, int]]:
        return iter(self._counts.items())

    def __iter__(self) -> Iterator[Hashable]:
        """Iterate distinct elements."""
        return iter(self._counts)

    def __contains__(self, element: Hashable) -> bool:
        return element in self._counts

    def __bool__(self) -> bool:
        return bool(self._counts)

    def __eq__(self, other) -> bool:
        if isinstance(other, Multiset):
            return self._counts == other._counts
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{e!r}: {c}" for e, c in self._counts.items())
        return f"Multiset({{{inner}}})"


EMPTY = Multiset()


def bag_sum(*bags: Multiset) -> Multiset:
    """Sum any number of multisets; the empty multiset is the identity."""
    total = EMPTY
    for bag in bags:
        total = total + bag
    return total
