"""Scarcity / abundance / sufficiency classification.

A relation between a requirement bag R and an available bag A is classified
by comparing cardinalities: |R| > |A| is scarcity, |R| < |A| abundance,
|R| = |A| sufficiency. Sufficiency may also be declared as a range (a band):
holdings inside the band are sufficient, below it scarce, above it abundant.
A relation left undeclared is undefined, never guessed.

Crossing an individual state with the system-level state for the same class
distinguishes absolute states (both levels agree) from quasi states (the
individual diverges from the system), the signature of inequality.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .errors import InvalidBand
from .resources import DEFAULT_CONTEXT, EMPTY_POLICY, ResourceClass, SubstitutionPolicy, coverage_count

if TYPE_CHECKING:
    from .population import Agent

RAW = "raw"
COVERAGE = "coverage"
MODES = (RAW, COVERAGE)


class SasState(str, Enum):
    SCARCITY = "scarcity"
    ABUNDANCE = "abundance"
    SUFFICIENCY = "sufficiency"
    UNDEFINED = "undefined"


class CrossState(str, Enum):
    ABSOLUTE_SCARCITY = "absolute_scarcity"
    QUASI_SCARCITY = "quasi_scarcity"
    ABSOLUTE_ABUNDANCE = "absolute_abundance"
    QUASI_ABUNDANCE = "quasi_abundance"
    ABSOLUTE_SUFFICIENCY = "absolute_sufficiency"
    QUASI_SUFFICIENCY = "quasi_sufficiency"
    UNDEFINED = "undefined"


# Quasi-sufficiency is defined here by analogy with the scarcity/abundance
# pairs rather than by an explicit definition; reports mark it as such.
EXTRAPOLATED_CROSS_STATES = frozenset({CrossState.QUASI_SUFFICIENCY})


@dataclass(frozen=True)
class SufficiencyBand:
    """Optimal range for a class: holdings inside it arouse no motivation.

    `upper=None` means unbounded above (an infinite optimal range, as for
    money).
    """

    lower: int
    upper: int | None

    def __post_init__(self):
        if self.lower < 0:
            raise InvalidBand(f"lower bound must be non-negative, got {self.lower}")
        if self.upper is not None and self.upper < self.lower:
            raise InvalidBand(f"band ({self.lower}, {self.upper}) has upper below lower")

    @classmethod
    def exact(cls, n: int) -> SufficiencyBand:
        return cls(lower=n, upper=n)

    def contains(self, value: int) -> bool:
        return value >= self.lower and (self.upper is None or value <= self.upper)


def classify(required_card: int, available_card: int, band: SufficiencyBand | None = None) -> SasState:
    """Classify one requirement/availability pair.

    Without a band the comparison is the plain trichotomy on cardinalities.
    With a band, availability below the lower bound is scarcity, above the
    upper bound abundance, inside it sufficiency; the band stands in for the
    exact-equality point of the requirement.
    """
    if required_card < 0 or available_card < 0:
        raise ValueError("cardinalities must be non-negative")
    if band is None:
        band = SufficiencyBand.exact(required_card)
    if available_card < band.lower:
        return SasState.SCARCITY
    if band.upper is not None and available_card > band.upper:
        return SasState.ABUNDANCE
    return SasState.SUFFICIENCY


def classify_coverage(covered: int, surplus: int, band: SufficiencyBand) -> SasState:
    """Classify a coverage count against a band.

    Coverage below the band's lower bound is scarcity even when raw counts
    look plentiful; total holdings above the upper bound are abundance.
    """
    if covered < band.lower:
        return SasState.SCARCITY
    if band.upper is not None and covered + surplus > band.upper:
        return SasState.ABUNDANCE
    return SasState.SUFFICIENCY


def cross_classify(individual: SasState, system: SasState) -> CrossState:
    """Cross an individual state with the system state for the same class.

    Absolute states need the two levels to agree; quasi states are an
    individual diverging from a system that is not in the same state.
    Any undefined input propagates.
    """
    if individual is SasState.UNDEFINED or system is SasState.UNDEFINED:
        return CrossState.UNDEFINED
    if individual is SasState.SCARCITY:
        if system is SasState.SCARCITY:
            return CrossState.ABSOLUTE_SCARCITY
        return CrossState.QUASI_SCARCITY
    if individual is SasState.ABUNDANCE:
        if system is SasState.ABUNDANCE:
            return CrossState.ABSOLUTE_ABUNDANCE
        return CrossState.QUASI_ABUNDANCE
    if system is SasState.SUFFICIENCY:
        return CrossState.ABSOLUTE_SUFFICIENCY
    return CrossState.QUASI_SUFFICIENCY


def classify_agent(
    agent: "Agent",
    policy: SubstitutionPolicy = EMPTY_POLICY,
    mode: str = RAW,
    context: str = DEFAULT_CONTEXT,
) -> dict[ResourceClass, SasState]:
    """One state per resource class; undefined where no requirement is declared.

    Raw mode compares plain cardinalities. Coverage mode asks how many of the
    required items the holdings can actually satisfy under the substitution
    policy: unmet coverage is scarcity even when raw counts look plentiful,
    and holdings above the band's upper bound are abundance.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    states: dict[ResourceClass, SasState] = {}
    for resource_class in ResourceClass:
        requirement = agent.requirements.get(resource_class)
        if requirement is None:
            states[resource_class] = SasState.UNDEFINED
            continue
        available = agent.resources_in(resource_class)
        if mode == RAW:
            states[resource_class] = classify(
                requirement.items.cardinality, available.cardinality, requirement.band
            )
        else:
            covered, surplus = coverage_count(available, requirement.items, policy, context)
            band = requirement.band or SufficiencyBand.exact(requirement.items.cardinality)
            states[resource_class] = classify_coverage(covered, surplus, band)
    return states
