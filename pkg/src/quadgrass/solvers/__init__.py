from .certify import Certificate, certify_global
from .common import (
    CONVERGED,
    MAX_ITER,
    STALLED,
    TWO_CYCLE,
    SolveReport,
    SolverOptions,
    TraceRow,
)
from .convex import damping_coefficient, oda_convex
from .multistart import LOCAL_METHODS, multistart, run_local
from .riemannian import riemannian_descent, trust_region
from .scf import oda_J, roothaan, roothaan_tilde
