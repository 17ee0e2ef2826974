"""Robust 1D configuration manifolds for planar balance under hand forces."""

from importlib import resources

from .basis import BernsteinBasis, ManifoldSpec, basis_row, eval_config, eval_config_derivative
from .model import (
    GRAVITY,
    CoordinationMatrix,
    LinkSpec,
    ModelError,
    RobotModel,
    com_position,
    expand_config,
    forward_kinematics,
    hand_position,
)
from .stability import (
    HandWrench,
    StabilityError,
    ZmpResult,
    support_check,
    zmp_dynamic,
    zmp_static_full,
    zmp_static_simplified,
)

__version__ = "0.1.0"


def default_model() -> RobotModel:
    """The packaged five-joint sagittal chain (ankle, knee, hip, shoulder, elbow)."""
    ref = resources.files("stancepath").joinpath("data/planar_biped.json")
    with resources.as_file(ref) as path:
        return RobotModel.load(path)
