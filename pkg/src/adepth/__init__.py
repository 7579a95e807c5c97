"""Active depth estimation for a single tracked 3D point.

A moving camera observes one static point; its inverse depth is estimated
online by a nonlinear observer while the camera's own motion is chosen to
keep the estimator excited, the feature inside the field of view, and the
actuation within speed limits.  The package provides the projected-point
kinematics, the observer, a Lyapunov/excitation monitor, the closed-form
control-allocation solver the control laws reduce to, three camera control
strategies, and a deterministic closed-loop simulator with a CSV logging
contract.
"""

from .allocation import (
    AllocationProblem,
    AllocationSolution,
    is_feasible,
    solve_analytic,
    solve_bruteforce,
)
from .controllers import (
    CameraLimits,
    CircularReference,
    ConstantReference,
    ControlOutput,
    ReferenceSignal,
    STRATEGIES,
    control_baseline_origin,
    control_case_a,
    control_case_b,
    proportional_reference,
    reference_circular,
)
from .errors import (
    AdepthError,
    ConfigError,
    DomainError,
    IntegrationError,
    SingularityError,
)
from .geometry import (
    CameraTwist,
    InteractionJacobians,
    feature_dynamics,
    jacobians,
    optical_flow_matrix,
    point_dynamics_world,
    project,
)
from .observer import (
    CoupledState,
    ErrorState,
    EstimatorState,
    ObserverGains,
    error_rhs,
    estimation_error,
    integrate_step,
    observer_rhs,
)
from .simulation import (
    CameraPose,
    LOG_COLUMNS,
    ScenarioConfig,
    SimLog,
    camera_pose_update,
    depth_convergence_time,
    run_scenario,
    tracking_convergence_time,
    world_to_measurement,
)
from .stability import (
    StabilityReport,
    check_theorem1,
    lyapunov_rate,
    lyapunov_value,
    pe_sigma_squared,
    stability_report,
)

__version__ = "0.1.0"
