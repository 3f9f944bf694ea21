"""Exception hierarchy for the simulator."""


class SasimError(Exception):
    """Base class for all simulator errors."""


class InsufficientMultiplicity(SasimError):
    """An element was removed from a multiset more times than it occurs."""

    def __init__(self, element, requested: int, held: int):
        self.element = element
        self.requested = requested
        self.held = held
        super().__init__(
            f"cannot remove {requested} of {element!r}: only {held} held"
        )


class MixedClasses(SasimError):
    """Coverage counting was asked to compare items from different resource classes."""


class InvalidBand(SasimError):
    """A sufficiency band with lower bound above its upper bound."""


class SelfExchange(SasimError):
    """An exchange named the same party as both giver and receiver."""


class NonMatchingParties(SasimError):
    """A rule was evaluated against parties its predicates do not match."""


class StaleOutcome(SasimError):
    """An outcome was applied after the underlying holdings changed."""


class NoReservoir(SasimError):
    """A system-counterparty exchange was requested but no reservoir exists."""


class InvalidConfig(SasimError):
    """A simulation config violates its invariants (e.g. ticks < 1)."""


class ScenarioError(SasimError):
    """Base class for scenario file problems. Carries a locus path like 'agents[2].id'."""

    def __init__(self, locus: str, message: str):
        self.locus = locus
        super().__init__(f"{locus}: {message}")


class SchemaError(ScenarioError):
    """The scenario text does not conform to the schema."""


class DanglingReference(ScenarioError):
    """A rule or profile references an id that is not declared."""


class DuplicateId(ScenarioError):
    """Two agents or two rules share an id."""
