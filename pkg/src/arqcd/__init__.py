"""Quickest change detection for AR disturbance signals in Gaussian noise.

Model handling and covariance solvers live in `model`, trajectory simulation
in `simulate`, the recursive likelihood filter in `filtering`, the detectors
in `detect`, and the Monte-Carlo harness in `experiment`. The `arqcd`
console script (module `cli`) fronts the campaign workflows.
"""

from .detect import (
    Alarm,
    BlockedDetector,
    ErgodicCusum,
    OgaCusum,
    StationaryCusum,
    grad_h_hat,
    proj_pd,
    run_detector,
)
from .experiment import (
    CurveRow,
    DetectorConfig,
    ExperimentResult,
    McConfig,
    estimate_arl,
    estimate_delay,
    estimate_k,
    select_threshold,
    wadd_vs_arl_curve,
)
from .filtering import (
    ForwardState,
    StepResult,
    forward_init,
    forward_step,
    joint_log_density_oracle,
    log_p_infty,
    steady_state_log_cond,
)
from .model import (
    ARModel,
    FirstOrderModel,
    InitialStateDist,
    ValidationReport,
    lift_to_first_order,
    load_model,
    save_model,
    stationary_state_cov,
    steady_state_filter_cov,
    validate_model,
)
from .simulate import (
    ChangeConfig,
    Trajectory,
    generate_trajectory,
    replicate_rng,
    stationary_init,
    whiten,
)

__version__ = "0.1.0"

__all__ = [
    "ARModel",
    "Alarm",
    "BlockedDetector",
    "ChangeConfig",
    "CurveRow",
    "DetectorConfig",
    "ErgodicCusum",
    "ExperimentResult",
    "FirstOrderModel",
    "ForwardState",
    "InitialStateDist",
    "McConfig",
    "OgaCusum",
    "StationaryCusum",
    "StepResult",
    "Trajectory",
    "ValidationReport",
    "estimate_arl",
    "estimate_delay",
    "estimate_k",
    "forward_init",
    "forward_step",
    "generate_trajectory",
    "grad_h_hat",
    "joint_log_density_oracle",
    "lift_to_first_order",
    "load_model",
    "log_p_infty",
    "proj_pd",
    "replicate_rng",
    "run_detector",
    "save_model",
    "select_threshold",
    "stationary_init",
    "stationary_state_cov",
    "steady_state_filter_cov",
    "steady_state_log_cond",
    "validate_model",
    "wadd_vs_arl_curve",
    "whiten",
]
