"""Interface dynamics of one-dimensional voter models with swapping.

The package tracks a single order-disorder interface: configurations that
are all ones far to the left and all zeros far to the right, evolving under
long-range flip (infection) events and exchange (swap) events.  It provides
exact generator computations on interface observables, an event-driven
simulator with reproducible counter-based randomness, the induced
disagreement-point process, a dominating-walk coupling for interface
growth, and batch experiment drivers with flat-file output.
"""

__version__ = "0.1.0"

from .exceptions import (
    CouplingViolation,
    EventBudgetExceeded,
    NonSymmetricKernel,
    NotAnInterface,
    NotSatisfiable,
    ParseError,
    PreconditionViolated,
    SwapVoterError,
    Unreachable,
    ValidationError,
)
from .kernels import (
    RateKernel,
    from_power_law,
    is_irreducible,
    moment,
    symmetrize,
    tail_rates,
    tightness_constant,
)
from .lattice import (
    CanonicalClass,
    InterfaceConfig,
    canonical,
    f_cd,
    flip,
    heaviside,
    interface_counts,
    swap,
    thinned_counts,
    width,
)
from .generator import (
    TransitionEvent,
    TruncationSpec,
    apply_event,
    apply_generator,
    boundary_image_rates,
    enumerate_transitions,
    gfcd_closed_form,
    gs_fcd,
    gv_fcd,
    total_rate,
)
from .simulate import (
    CoupledRecord,
    RecordSchedule,
    SimulationConfig,
    TrajectoryRecord,
    coupled_clock_rates,
    extension_rates,
    plan_transport,
    run,
    run_coupled,
    step,
    stopping_time_tau,
    tau_from_record,
    width_growth,
)
from .boundary import (
    BoundaryConfig,
    BoundaryRecord,
    IntervalEstimate,
    annihilation_probability,
    boost_check,
    boundary,
    generator_rates,
    simulate_boundary,
)
from .analysis import (
    CesaroEstimate,
    CheckpointStats,
    LedgerReport,
    MartingaleReport,
    RecurrenceStats,
    cesaro_fraction,
    contradiction_ledger,
    martingale_residual,
    occupancy_below,
    recurrence_report,
    total_variation,
)
from .harness import (
    ExperimentSpec,
    config_digest,
    parse_config,
    preset_kernels,
    run_experiment,
)

__all__ = [
    "__version__",
    # errors
    "SwapVoterError", "NonSymmetricKernel", "NotSatisfiable", "NotAnInterface",
    "Unreachable", "EventBudgetExceeded", "CouplingViolation",
    "PreconditionViolated", "ParseError", "ValidationError",
    # kernels
    "RateKernel", "from_power_law", "symmetrize", "moment", "tail_rates",
    "is_irreducible", "tightness_constant",
    # states
    "InterfaceConfig", "CanonicalClass", "heaviside", "canonical", "width",
    "flip", "swap", "f_cd", "interface_counts", "thinned_counts",
    # generator
    "TransitionEvent", "TruncationSpec", "apply_event", "enumerate_transitions",
    "total_rate", "apply_generator", "gfcd_closed_form", "gs_fcd", "gv_fcd",
    "boundary_image_rates",
    # simulation
    "SimulationConfig", "RecordSchedule", "TrajectoryRecord", "run", "step",
    "stopping_time_tau", "tau_from_record", "plan_transport",
    "coupled_clock_rates", "extension_rates", "width_growth", "run_coupled",
    "CoupledRecord",
    # boundary process
    "BoundaryConfig", "BoundaryRecord", "boundary", "generator_rates",
    "simulate_boundary", "annihilation_probability", "boost_check",
    "IntervalEstimate",
    # analysis
    "RecurrenceStats", "recurrence_report", "total_variation",
    "CesaroEstimate", "cesaro_fraction", "occupancy_below",
    "MartingaleReport", "CheckpointStats", "martingale_residual",
    "LedgerReport", "contradiction_ledger",
    # harness
    "ExperimentSpec", "parse_config", "run_experiment", "preset_kernels",
    "config_digest",
]
