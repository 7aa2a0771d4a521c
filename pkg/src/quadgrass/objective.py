"""The nonconvex cost J, its convexification J~, and their gradients.

    J(P)  = Tr(B P) - 1/2 Tr(A P A P)
    J~(D) = Tr(C D) + 1/4 ||[A, D]||_F^2,    C = B - A^2 / 2

Both coincide on the Grassmann manifold.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .errors import DimensionError, ValidationError
from .linalg import as_matrix, commutator, project_convex_hull, symmetrize


@dataclass(frozen=True)
class ProblemInstance:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    m: int

    @property
    def M(self):
        return self.A.shape[0]

    @property
    def lipschitz_tilde(self):
        """Lipschitz constant of grad J~: half the squared spread of A's spectrum."""
        w = np.linalg.eigvalsh(self.A)
        return 0.5 * float(w[-1] - w[0]) ** 2


def _check_psd(A, tol):
    w = np.linalg.eigvalsh(A)
    bound = -tol * (1.0 + np.linalg.norm(A))
    if w[0] < bound:
        raise ValidationError(
            f"A is not positive semidefinite: most negative eigenvalue {w[0]:.6e}"
        )


def _check_dims(A, B, m):
    if A.shape != B.shape:
        raise DimensionError(f"A has shape {A.shape} but B has shape {B.shape}")
    M = A.shape[0]
    if not 1 <= m <= M - 1:
        raise ValidationError(f"rank m={m} outside [1, {M - 1}]")


def build_instance(A, B, m, tol=DEFAULT_TOL.feasibility):
    A, B = symmetrize(A), symmetrize(B)
    _check_dims(A, B, m)
    _check_psd(A, tol)
    return ProblemInstance(A, B, symmetrize(B - 0.5 * A @ A), int(m))


def instance_from_AC(A, C, m, tol=DEFAULT_TOL.feasibility):
    """Build an instance from (A, C) with B = C + A^2/2; C is stored as given."""
    A, C = symmetrize(A), symmetrize(C)
    _check_dims(A, C, m)
    _check_psd(A, tol)
    return ProblemInstance(A, symmetrize(C + 0.5 * A @ A), C, int(m))


def eval_J(inst, P):
    P = as_matrix(P)
    AP = inst.A @ P
    return float(np.vdot(inst.B, P) - 0.5 * np.vdot(AP, AP.T))


def eval_Jtilde(inst, D):
    D = as_matrix(D)
    K = commutator(inst.A, D)
    return float(np.vdot(inst.C, D) + 0.25 * np.vdot(K, K))


def grad_G(inst, P):
    """Euclidean gradient G(P) = B - A P A."""
    P = as_matrix(P)
    return inst.B - symmetrize(inst.A @ P @ inst.A)


def grad_Gtilde(inst, D):
    """Euclidean gradient of J~: C - 1/2 [[A, D], A]."""
    D = as_matrix(D)
    K = commutator(inst.A, D)
    return inst.C - 0.5 * symmetrize(K @ inst.A - inst.A @ K)


def residual(inst, P):
    """First-order residual ||[G(P), P]||_F; vanishes exactly at critical points."""
    P = as_matrix(P)
    return float(np.linalg.norm(commutator(grad_G(inst, P), P)))


def convex_residual(inst, D):
    """Natural residual ||D - Proj_K(D - grad J~(D))||_F of the convex problem."""
    D = as_matrix(D)
    return float(np.linalg.norm(D - project_convex_hull(D - grad_Gtilde(inst, D), inst.m)))
