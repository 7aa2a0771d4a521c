"""Grassmann and Stiefel geometry for J.

Tangent vectors at P are symmetric matrices with vanishing oo/vv blocks in an
eigenbasis of P. The retraction is the spectral one (projector onto the
dominant m-dimensional eigenspace of P + tX); the Stiefel side uses the
embedded metric and a sign-fixed thin QR.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .errors import ContractViolation, RetractionDegenerate, StepTooLarge, ValidationError
from .linalg import GrassmannPoint, as_matrix, commutator, projector_from_basis, symmetrize
from .objective import grad_G


@dataclass(frozen=True)
class TangentVector:
    base: GrassmannPoint
    X: np.ndarray


@dataclass(frozen=True)
class StiefelPoint:
    V: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.V, dtype=float)
        object.__setattr__(self, "V", V)
        err = np.linalg.norm(V.T @ V - np.eye(V.shape[1]))
        if err > DEFAULT_TOL.feasibility:
            raise ValidationError(f"||V^T V - I||_F = {err:.3e}")

    @property
    def m(self):
        return self.V.shape[1]


def tangency_error(P, X):
    P, X = as_matrix(P), as_matrix(X)
    Q = np.eye(P.shape[0]) - P
    return max(np.linalg.norm(P @ X @ P), np.linalg.norm(Q @ X @ Q))


def _proj(P, X):
    # [[X, P], P] = XP + PX - 2PXP, kept symmetric
    PX = P @ X
    return symmetrize(PX + PX.T - 2.0 * PX @ P)


def tangent_project(P, X):
    Pm = as_matrix(P)
    base = P if isinstance(P, GrassmannPoint) else None
    return TangentVector(base, _proj(Pm, symmetrize(as_matrix(X))))


def _vec(X):
    return X.X if isinstance(X, TangentVector) else as_matrix(X)


def riemannian_grad(inst, P):
    return tangent_project(P, grad_G(inst, P))


def _hess(inst, P, G, X):
    A = inst.A
    omega = commutator(commutator(G, X), P)
    curv = _proj(P, symmetrize(A @ X @ A))
    return symmetrize(omega) - curv


def hessian_apply(inst, P, X, tol=1e-8):
    """Riemannian Hessian applied to a tangent direction.

    Hess[X] = [[G(P), X], P] - [[A X A, P], P], both terms tangent at P.
    """
    Pm, Xm = as_matrix(P), symmetrize(_vec(X))
    err = tangency_error(Pm, Xm)
    if err > tol * (1.0 + np.linalg.norm(Xm)):
        raise ContractViolation(f"direction is not tangent at P (off-block norm {err:.3e})")
    base = P if isinstance(P, GrassmannPoint) else None
    return TangentVector(base, _hess(inst, Pm, grad_G(inst, Pm), Xm))


def _retract(P, X, t, m):
    w, V = np.linalg.eigh(P + t * X)
    M = P.shape[0]
    if w[M - m] - w[M - m - 1] <= 1e-14 * max(1.0, abs(w[-1])):
        raise RetractionDegenerate(
            "eigenvalues m and m+1 of P + tX coincide; retry with a smaller step"
        )
    return projector_from_basis(V[:, M - m:])


def retract(P, X, t=1.0):
    """Spectral retraction: projector onto the dominant m-space of P + tX."""
    m = P.m if isinstance(P, GrassmannPoint) else int(round(np.trace(as_matrix(P))))
    Pm, Xm = as_matrix(P), symmetrize(_vec(X))
    if t == 0:
        return GrassmannPoint(Pm, m)
    return GrassmannPoint(_retract(Pm, Xm, t, m), m)


def stiefel_lift(P):
    """Orthonormal basis of Ran(P) (top-m eigenvectors)."""
    Pm = as_matrix(P)
    m = P.m if isinstance(P, GrassmannPoint) else int(round(np.trace(Pm)))
    _, V = np.linalg.eigh(Pm)
    return StiefelPoint(V[:, -m:])


def stiefel_project(V):
    V = V.V if isinstance(V, StiefelPoint) else np.asarray(V, dtype=float)
    return GrassmannPoint(projector_from_basis(V), V.shape[1])


def stiefel_tangent_project(V, Z):
    S = V.T @ Z
    return Z - V @ (0.5 * (S + S.T))


def stiefel_grad(inst, V):
    """Embedded-metric Riemannian gradient of V -> J(V V^T)."""
    V = V.V if isinstance(V, StiefelPoint) else np.asarray(V, dtype=float)
    Z = 2.0 * grad_G(inst, V @ V.T) @ V
    return stiefel_tangent_project(V, Z)


def _stiefel_hess(inst, V, G, xi):
    A = inst.A
    egrad = 2.0 * G @ V
    ehess = 2.0 * G @ xi - 2.0 * A @ (xi @ (V.T @ A @ V) + V @ (xi.T @ A @ V))
    S = V.T @ egrad
    return stiefel_tangent_project(V, ehess - xi @ (0.5 * (S + S.T)))


def stiefel_hessian_apply(inst, V, xi):
    V = V.V if isinstance(V, StiefelPoint) else np.asarray(V, dtype=float)
    return _stiefel_hess(inst, V, grad_G(inst, V @ V.T), xi)


def _qr_pos(Y):
    Q, R = np.linalg.qr(Y)
    d = np.diag(R)
    if np.min(np.abs(d)) <= 1e-12 * max(1.0, np.max(np.abs(d))):
        raise StepTooLarge("V + xi is rank deficient; reduce the step")
    s = np.where(d < 0, -1.0, 1.0)
    return Q * s


def stiefel_retract(V, xi, tol=1e-8):
    """Thin QR of V + xi with positive R diagonal."""
    V = V.V if isinstance(V, StiefelPoint) else np.asarray(V, dtype=float)
    S = V.T @ xi
    if np.linalg.norm(S + S.T) > tol * (1.0 + np.linalg.norm(xi)):
        raise ContractViolation("xi is not tangent to the Stiefel manifold at V")
    return StiefelPoint(_qr_pos(V + xi))
