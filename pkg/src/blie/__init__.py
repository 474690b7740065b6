"""Budget-constrained pure-exploration optimization over the unit cube.

The centerpiece is a batched elimination search on dyadic cubes
(:func:`blie.core.run_blie`) with two edge-length schedules, plus grid,
random, successive-halving, and bracketed baselines, synthetic and
adversarial benchmark instances with known near-optimal scaling, and a
batched executor that also drives external evaluator processes.
"""

from .baselines import (
    BaselineConfig,
    hyperband,
    hyperband_brackets,
    random_search,
    run_baseline,
    successive_halving,
    uniform_search,
)
from .core import (
    BatchRecord,
    BlieConfig,
    Candidate,
    RunTrace,
    arm_budget,
    cleanup,
    eliminate,
    next_grid_point,
    run_blie,
)
from .errors import (
    BatchFailedError,
    BlieError,
    BudgetTooSmallError,
    ConfigError,
    ConstructionInfeasibleError,
    EvalTimeoutError,
    FitFailedError,
    InvalidArgumentError,
    InvalidLossError,
    ProtocolError,
    ResourceLimitError,
    SpawnError,
)
from .executor import (
    EvalRequest,
    EvalResult,
    ExternalEvaluator,
    InProcessBackend,
    external_evaluator,
    in_process_backend,
    run_batch,
)
from .geometry import (
    Cube,
    EdgeLengthSchedule,
    ace_schedule,
    doubling_schedule,
    dyadic_level,
    explicit_schedule,
    level_cubes,
    locate,
    partition,
    sample_point,
)
from .instances import (
    Instance,
    ZoomingStats,
    certified_instance,
    constant_instance,
    fit_zooming_dimension,
    instance_from_descriptor,
    near_optimal_measure,
    toy_instance,
    uniform_search_adversary,
    zooming_number,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig",
    "BatchFailedError",
    "BatchRecord",
    "BlieConfig",
    "BlieError",
    "BudgetTooSmallError",
    "Candidate",
    "ConfigError",
    "ConstructionInfeasibleError",
    "Cube",
    "EdgeLengthSchedule",
    "EvalRequest",
    "EvalResult",
    "EvalTimeoutError",
    "ExternalEvaluator",
    "FitFailedError",
    "InProcessBackend",
    "Instance",
    "InvalidArgumentError",
    "InvalidLossError",
    "ProtocolError",
    "ResourceLimitError",
    "RunTrace",
    "SpawnError",
    "ZoomingStats",
    "ace_schedule",
    "arm_budget",
    "certified_instance",
    "cleanup",
    "constant_instance",
    "doubling_schedule",
    "dyadic_level",
    "eliminate",
    "explicit_schedule",
    "external_evaluator",
    "fit_zooming_dimension",
    "hyperband",
    "hyperband_brackets",
    "in_process_backend",
    "instance_from_descriptor",
    "level_cubes",
    "locate",
    "near_optimal_measure",
    "next_grid_point",
    "partition",
    "random_search",
    "run_baseline",
    "run_batch",
    "run_blie",
    "sample_point",
    "successive_halving",
    "toy_instance",
    "uniform_search",
    "uniform_search_adversary",
    "zooming_number",
]
