"""Global-optimality certificate from a minimizer of the convexified problem."""

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidCertificateInput, ValidationError
from ..linalg import ConvexPoint, GrassmannPoint, as_matrix, eigh, spectral_projector
from ..objective import convex_residual, eval_J, grad_Gtilde


@dataclass(frozen=True)
class Certificate:
    H_star: np.ndarray
    mu: np.ndarray
    gap: float
    certified: bool
    P_star: GrassmannPoint | None = None
    # orthonormal basis of the eigenspace of mu_m (cluster within gap_tol)
    level_space: np.ndarray | None = None

    def value(self, inst):
        """J(P_star) for a certified certificate; None otherwise."""
        return None if self.P_star is None else eval_J(inst, self.P_star)


def certify_global(inst, D_star, gap_tol=1e-8, opt_tol=1e-8):
    """Certify global optimality on the Grassmann manifold via the gradient of J~ at D_star.

    H_star = grad J~(D_star) is the same for every minimizer of the convex
    problem. If its m-th and (m+1)-th eigenvalues are separated by more than
    ``gap_tol``, the lowest-m spectral projector of H_star is the unique global
    minimizer of J. ``D_star`` must solve the convex problem to ``opt_tol``
    (natural residual), otherwise the statement is meaningless and
    ``InvalidCertificateInput`` is raised.
    """
    D = as_matrix(D_star)
    m = inst.m
    try:
        ConvexPoint(D, m)
    except ValidationError as exc:
        raise InvalidCertificateInput(f"D_star is not in the convex hull: {exc}") from exc
    res = convex_residual(inst, D)
    if res > opt_tol:
        raise InvalidCertificateInput(
            f"D_star does not minimize J~ over the convex hull (natural residual {res:.3e} > {opt_tol:g})"
        )
    H = grad_Gtilde(inst, D)
    S = eigh(H)
    mu = S.eigenvalues
    gap = float(mu[m] - mu[m - 1])
    level = np.abs(mu - mu[m - 1]) <= gap_tol
    level_space = S.eigenvectors[:, level]
    if gap > gap_tol:
        P_star, _ = spectral_projector(S, m)
        return Certificate(H, mu, gap, True, P_star, level_space)
    return Certificate(H, mu, gap, False, None, level_space)
