"""Motion planning for an 8-DOF underwater vehicle-manipulator system."""

from .errors import (
    AUVMSError, DegeneratePath, InvalidPath, InvalidScenario, OutOfRange, PitchSingular,
    SingularJacobian, SingularPitch,
)
from .kinematics import DHParams, EulerAngles, eef_world_pose, make_config, system_jacobian
from .planner import PlannerParams, PlanResult, plan_rrt_baseline, plan_rrtauvms
from .postprocess import smooth_path, spline_trajectory
from .redundancy import JointLimits, resolve_velocity, system_weights, weighted_pseudo_inverse
from .scenario import load_scenario
from .world import CheckBodySet, Scenario, SphereObstacle, config_free, edge_free, point_free

__version__ = "0.1.0"

__all__ = [
    "AUVMSError", "DegeneratePath", "InvalidPath", "InvalidScenario", "OutOfRange", "PitchSingular",
    "SingularJacobian", "SingularPitch",
    "DHParams", "EulerAngles", "eef_world_pose", "make_config", "system_jacobian",
    "PlannerParams", "PlanResult", "plan_rrt_baseline", "plan_rrtauvms",
    "smooth_path", "spline_trajectory",
    "JointLimits", "resolve_velocity", "system_weights", "weighted_pseudo_inverse",
    "load_scenario",
    "CheckBodySet", "Scenario", "SphereObstacle", "config_free", "edge_free", "point_free",
]
