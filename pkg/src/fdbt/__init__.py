"""Frequency-dependent balanced truncation toolkit.

Model-order reduction for complex LTI systems with computable
finite-frequency error bounds, classical baselines, and an empirical
verification harness.
"""

from .baselines import (
    band_gramians,
    fgbt_reduce,
    fibt_reduce,
    gspa_reduce,
    standard_gramians,
)
from .errors import (
    BranchCutViolation,
    ConvergenceFailure,
    DegenerateMap,
    DimensionMismatch,
    FdbtError,
    IndefiniteGramian,
    InvalidParameters,
    NotHurwitz,
    NotPSD,
    OrderOutOfRange,
    PoleOnGrid,
    SingularReconstruction,
    SingularResidualization,
    SingularShift,
    SingularSubstitution,
    SingularSylvester,
)
from .harness import (
    EXAMPLE_NAMES,
    CellStats,
    ExampleBundle,
    ExampleFixture,
    ExperimentReport,
    ModelCellRecord,
    RandomModelSpec,
    VerificationRecord,
    draw_random_models,
    example_fixture,
    generate_ladder,
    record_dict,
    reproduce_example,
    run_randomized_experiment,
    verify_bound,
    write_bundle,
    write_json,
    write_sweep_csv,
)
from .interval import (
    EtaStep,
    EtaTerms,
    IntervalConfig,
    IntervalExtended,
    IntervalGramians,
    build_interval_extended,
    interval_bound,
    interval_ef_bound,
    interval_eta,
    interval_gramians,
    interval_reduce,
)
from .linalg import (
    balance_gramians,
    hermitize,
    log_principal,
    solve_lyapunov,
    sqrt_principal,
)
from .reduction import (
    GramianPair,
    ReductionResult,
    balanced_realization,
    leading_block,
    pair_gramians,
    partition,
)
from .sf import (
    EpsilonRow,
    SfConfig,
    SfExtended,
    SfGramians,
    build_sf_extended,
    epsilon_sweep,
    invert_sf_extension,
    sf_bound,
    sf_ef_bound,
    sf_gramians,
    sf_reduce,
    stability_epsilon_cap,
)
from .sysmodel import (
    FrequencyGrid,
    Stability,
    StateSpace,
    SweepReport,
    error_system,
    evaluate,
    evaluate_at,
    hinf_estimate,
    is_hurwitz,
    moebius_substitute,
    sigma_max_at,
    sweep,
    symmetric_log_grid,
)

__version__ = "0.1.0"

__all__ = [
    "BranchCutViolation",
    "CellStats",
    "ConvergenceFailure",
    "DegenerateMap",
    "DimensionMismatch",
    "EXAMPLE_NAMES",
    "EpsilonRow",
    "EtaStep",
    "EtaTerms",
    "ExampleBundle",
    "ExampleFixture",
    "ExperimentReport",
    "FdbtError",
    "FrequencyGrid",
    "GramianPair",
    "IndefiniteGramian",
    "IntervalConfig",
    "IntervalExtended",
    "IntervalGramians",
    "InvalidParameters",
    "ModelCellRecord",
    "NotHurwitz",
    "NotPSD",
    "OrderOutOfRange",
    "PoleOnGrid",
    "RandomModelSpec",
    "ReductionResult",
    "SfConfig",
    "SfExtended",
    "SfGramians",
    "SingularReconstruction",
    "SingularResidualization",
    "SingularShift",
    "SingularSubstitution",
    "SingularSylvester",
    "Stability",
    "StateSpace",
    "SweepReport",
    "VerificationRecord",
    "__version__",
    "balance_gramians",
    "balanced_realization",
    "band_gramians",
    "build_interval_extended",
    "build_sf_extended",
    "draw_random_models",
    "epsilon_sweep",
    "error_system",
    "evaluate",
    "evaluate_at",
    "example_fixture",
    "fgbt_reduce",
    "fibt_reduce",
    "generate_ladder",
    "gspa_reduce",
    "hermitize",
    "hinf_estimate",
    "interval_bound",
    "interval_ef_bound",
    "interval_eta",
    "interval_gramians",
    "interval_reduce",
    "invert_sf_extension",
    "is_hurwitz",
    "leading_block",
    "log_principal",
    "moebius_substitute",
    "pair_gramians",
    "partition",
    "record_dict",
    "reproduce_example",
    "run_randomized_experiment",
    "sf_bound",
    "sf_ef_bound",
    "sf_gramians",
    "sf_reduce",
    "sigma_max_at",
    "solve_lyapunov",
    "sqrt_principal",
    "stability_epsilon_cap",
    "standard_gramians",
    "sweep",
    "symmetric_log_grid",
    "verify_bound",
    "write_bundle",
    "write_json",
    "write_sweep_csv",
]
