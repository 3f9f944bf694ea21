"""sasim: a deterministic simulator of social resource exchange.

Requirement and resource bags per agent, six resource classes with
scenario-defined substitutability, scarcity/abundance/sufficiency
classification at the individual and system level (including absolute vs
quasi cross-states), entitlement-mediated exchange with explicit success
and failure, and a coping-strategy grid driving agent behavior over
discrete ticks.
"""

from .classify import (
    COVERAGE,
    RAW,
    CrossState,
    SasState,
    SufficiencyBand,
    classify,
    classify_agent,
    cross_classify,
)
from .engine import (
    Event,
    NonConservingEvent,
    OutcomeCommitted,
    SimConfig,
    SimReport,
    Simulation,
    StateSnapshot,
    StopCondition,
    StrategySelected,
    TickEnd,
    TickStart,
    event_to_dict,
    run,
    step,
)
from .entitlement import (
    EntitlementRule,
    EntitlementType,
    ExchangeOutcome,
    FailureReason,
    OutcomeStatus,
    PartyMatch,
    Transfer,
    TransferSpec,
    evaluate,
    evaluate_with_system,
)
from .entitlement import apply as apply_outcome
from .errors import (
    DanglingReference,
    DuplicateId,
    InsufficientMultiplicity,
    InvalidBand,
    InvalidConfig,
    MixedClasses,
    NonMatchingParties,
    NoReservoir,
    SasimError,
    ScenarioError,
    SchemaError,
    SelfExchange,
    StaleOutcome,
)
from .fixtures import build_fixture, famine, fixture_names, protestant, richard_iii
from .multiset import Multiset, bag_sum
from .population import (
    RESERVOIR_ID,
    Agent,
    Population,
    Requirement,
    Snapshot,
    SystemView,
    aggregate,
    make_reservoir,
    snapshot_states,
)
from .resources import (
    CLASS_ORDER,
    DEFAULT_CONTEXT,
    Coverage,
    ResourceClass,
    ResourceItem,
    SubstitutionEntry,
    SubstitutionPolicy,
    coverage_count,
    satisfies,
)
from .scenario import Scenario, emit_scenario, load_scenario, parse_scenario
from .strategy import (
    DEFAULT_CATALOG,
    AdjustRequirement,
    DestroyResources,
    GiveAway,
    HoardResources,
    Invest,
    ProposeExchange,
    Stance,
    StrategyCell,
    StrategyChoice,
    StrategyProfile,
    enact,
    select,
)

__version__ = "0.1.0"
