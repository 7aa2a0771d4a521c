from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from ..errors import ValidationError

CONVERGED = "converged"
TWO_CYCLE = "two_cycle"
MAX_ITER = "max_iter"
STALLED = "stalled"


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 10000
    residual_tol: float = 1e-10
    gap_tol: float = 1e-8
    # Roothaan-type maps: P_{k+1} counts as a fixed point of P_k below this distance
    fixed_point_tol: float = 1e-8
    cycle_tol: float = 1e-9
    cycle_detection_window: int = 8
    seed: int = 0
    # line search
    armijo_c1: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 60
    # trust region (radii in the Frobenius norm of symmetric tangent matrices)
    tr_initial_radius: float | None = None
    tr_max_radius: float | None = None
    tr_rho_accept: float = 0.1
    tr_rho_expand: float = 0.75
    tr_shrink: float = 0.25
    tr_expand: float = 2.0
    tcg_kappa: float = 0.1
    tcg_theta: float = 1.0
    # convex ODA: plain ODA iterations before switching to accelerated projected gradient
    oda_phase_iter: int = 200
    polish: bool = True
    store_iterates: bool = False

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValidationError("max_iter must be >= 1")
        for name in ("residual_tol", "gap_tol", "fixed_point_tol", "cycle_tol"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")


class TraceRow(NamedTuple):
    iter: int
    objective: float
    residual: float
    step: float


@dataclass
class SolveReport:
    method: str
    status: str
    final_point: Any
    trace: list = field(default_factory=list)
    iterations: int = 0
    warnings: list = field(default_factory=list)
    iterates: list | None = None
    extra: dict = field(default_factory=dict)

    @property
    def objective(self):
        return self.trace[-1].objective

    @property
    def residual(self):
        return self.trace[-1].residual

    def objectives(self):
        return np.array([row.objective for row in self.trace])


def two_cycle_check(history, tol, window):
    """True when the last `window` steps alternate between two distinct points.

    ``history`` holds the most recent iterates (newest last).
    """
    if len(history) < window + 2:
        return False
    recent = history[-(window + 2):]
    for k in range(2, len(recent)):
        if np.linalg.norm(recent[k] - recent[k - 2]) > tol:
            return False
        if np.linalg.norm(recent[k] - recent[k - 1]) <= tol:
            return False
    return True
