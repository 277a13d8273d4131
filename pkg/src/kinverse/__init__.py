"""kinverse: inverse design of suspension hardpoints.

Given a target vector of kinematic-curve statistics x and a discipline
model g, find hardpoint coordinates y minimizing ||g(y) - x||^2 with
Bayesian optimization, stopping either when the target is met or when the
acquisition maximum shows no further improvement is credible. Ships an
analytic MacPherson-strut kinematics model, baseline optimizers for
convergence comparisons, and a CLI harness emitting traces and figures.
"""

from .acquisition import (
    AcquisitionConfig,
    AcquisitionKind,
    Incumbent,
    ei_value,
    maximize_acquisition,
    mpi_value,
    std_normal_cdf,
    std_normal_pdf,
)
from .baselines import BaselineConfig, BaselineKind, run_baseline
from .errors import (
    ConfigError,
    EvaluationBudgetError,
    EvaluationError,
    KinematicLockError,
    KinverseError,
    SingularModelError,
)
from .external import ExternalModel, external_adapter
from .gp import (
    DomainBounds,
    GPPosterior,
    KernelFamily,
    KernelSpec,
    TrainingSet,
    build_gram,
    fit,
    kernel_eval,
    log_marginal_likelihood,
    optimize_hyperparams,
    predict,
)
from .kinematics import (
    CurveStatistics,
    DesignVariables,
    HardpointSet,
    KinematicCurve,
    KnucklePose,
    SuspensionModel,
    constraint_residuals,
    curve_statistics,
    default_travel_grid,
    evaluate_kinematics,
    load_fixture,
    load_hardpoints,
    nominal_fixture_path,
    solve_suspension_position,
    sweep_poses,
)
from .model import CallableModel, DisciplineModel
from .solver import (
    OptimizationTrace,
    SolverSettings,
    TargetSpec,
    TerminationPolicy,
    TerminationReason,
    initial_design,
    residual_objective,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "AcquisitionConfig",
    "AcquisitionKind",
    "BaselineConfig",
    "BaselineKind",
    "CallableModel",
    "ConfigError",
    "CurveStatistics",
    "DesignVariables",
    "DisciplineModel",
    "DomainBounds",
    "EvaluationBudgetError",
    "EvaluationError",
    "ExternalModel",
    "GPPosterior",
    "HardpointSet",
    "Incumbent",
    "KernelFamily",
    "KernelSpec",
    "KinematicCurve",
    "KinematicLockError",
    "KinverseError",
    "KnucklePose",
    "OptimizationTrace",
    "SingularModelError",
    "SolverSettings",
    "SuspensionModel",
    "TargetSpec",
    "TerminationPolicy",
    "TerminationReason",
    "TrainingSet",
    "build_gram",
    "constraint_residuals",
    "curve_statistics",
    "default_travel_grid",
    "ei_value",
    "evaluate_kinematics",
    "external_adapter",
    "fit",
    "initial_design",
    "kernel_eval",
    "load_fixture",
    "load_hardpoints",
    "log_marginal_likelihood",
    "maximize_acquisition",
    "mpi_value",
    "nominal_fixture_path",
    "optimize_hyperparams",
    "predict",
    "residual_objective",
    "run_baseline",
    "solve",
    "solve_suspension_position",
    "sweep_poses",
    "std_normal_cdf",
    "std_normal_pdf",
]
