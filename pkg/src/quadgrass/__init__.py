"""Quadratic minimization over rank-m orthogonal projectors, with convexified certificates and DMET bath construction."""

from .errors import QuadGrassError
from .linalg import ConvexPoint, GrassmannPoint
from .objective import ProblemInstance, build_instance, eval_J, eval_Jtilde, instance_from_AC

__all__ = [
    "ConvexPoint",
    "GrassmannPoint",
    "ProblemInstance",
    "QuadGrassError",
    "build_instance",
    "eval_J",
    "eval_Jtilde",
    "instance_from_AC",
]
__version__ = "0.1.0"
