"""Closed-form solutions and oracles.

* ``solve_commuting``: exact minimizers when [A, B] = 0,
* ``perturb_first_order``: first-order term of the minimizer for a perturbed commuting pair,
* ``bruteforce_angle_2x2``: exhaustive scan of Gr(1, R^2).
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .config import DEFAULT_TOL
from .errors import DimensionError, ExpansionInvalid, NotCommutingError, NumericalError
from .instances import SIGMA_X, SIGMA_Z
from .linalg import GrassmannPoint, commutator, projector_from_basis, symmetrize
from .objective import build_instance, eval_J


def simultaneous_frame(A, C, tol, seed=0, max_tries=10):
    """Orthogonal U diagonalizing both commuting matrices, from eigh(A + tau C).

    tau is drawn at random; the frame is accepted only if both U^T A U and
    U^T C U are diagonal to ``tol`` (relative), otherwise a new tau is drawn.
    """
    rng = np.random.default_rng(seed)
    scale_a = 1.0 + np.linalg.norm(A)
    scale_c = 1.0 + np.linalg.norm(C)
    for _ in range(max_tries):
        tau = rng.uniform(0.5, 2.0) * scale_a / scale_c
        _, U = np.linalg.eigh(A + tau * C)
        Ad, Cd = U.T @ A @ U, U.T @ C @ U
        off_a = np.linalg.norm(Ad - np.diag(np.diag(Ad)))
        off_c = np.linalg.norm(Cd - np.diag(np.diag(Cd)))
        if off_a <= tol * scale_a and off_c <= tol * scale_c:
            return U, np.diag(Ad).copy(), np.diag(Cd).copy()
    raise NumericalError("could not find a common eigenframe; are A and C commuting?")


@dataclass(frozen=True)
class CommutingSolution:
    P_star: GrassmannPoint
    degenerate: bool
    c: np.ndarray  # eigenvalues of C, ascending
    a: np.ndarray  # eigenvalues of A in the same frame
    frame: np.ndarray  # columns ordered like c
    # degenerate description: P = lower + Delta, Delta a projector inside `level_space`
    # commuting with A, of rank m - rank(lower)
    lower: np.ndarray
    level_space: np.ndarray

    @property
    def delta_rank(self):
        return int(round(np.trace(self.P_star.P - self.lower)))


def solve_commuting(inst, tol_commute=1e-10, gap_tol=DEFAULT_TOL.gap):
    """Minimizers of J when A and B commute.

    With c_1 <= ... <= c_M the eigenvalues of C, the minimizers are
    1_{(-inf, c_m)}(C) + Delta with Delta a projector onto an A-invariant
    subspace of Ker(C - c_m). If c_m < c_{m+1} the minimizer is unique.
    ``P_star`` is always a valid minimizer (Delta built from frame vectors,
    which are A-eigenvectors); ``degenerate`` tells whether it is unique.
    """
    A, B, C, m = inst.A, inst.B, inst.C, inst.m
    comm = np.linalg.norm(commutator(A, B))
    bound = tol_commute * np.linalg.norm(A) * np.linalg.norm(B)
    if comm > bound:
        raise NotCommutingError(
            f"||[A, B]||_F = {comm:.3e} exceeds {bound:.3e}; use an iterative solver"
        )
    U, a, c = simultaneous_frame(A, C, tol=1e-9)
    order = np.argsort(c, kind="stable")
    U, a, c = U[:, order], a[order], c[order]
    degenerate = bool(c[m] - c[m - 1] <= gap_tol)
    below = c < c[m - 1] - gap_tol
    level = np.abs(c - c[m - 1]) <= gap_tol
    return CommutingSolution(
        P_star=GrassmannPoint(projector_from_basis(U[:, :m]), m),
        degenerate=degenerate,
        c=c,
        a=a,
        frame=U,
        lower=projector_from_basis(U[:, below]) if below.any() else np.zeros_like(A),
        level_space=U[:, level],
    )


@dataclass(frozen=True)
class PerturbationInstance:
    A0: np.ndarray
    B0: np.ndarray
    A1: np.ndarray
    B1: np.ndarray
    m: int
    U0: np.ndarray
    a0: np.ndarray
    b0: np.ndarray
    c0: np.ndarray

    def instance(self, eps):
        """The perturbed problem with A = A0 + eps A1, B = B0 + eps B1."""
        return build_instance(self.A0 + eps * self.A1, self.B0 + eps * self.B1, self.m)


def perturbation_instance(A0, B0, A1, B1, m, tol_commute=1e-10):
    A0, B0, A1, B1 = map(symmetrize, (A0, B0, A1, B1))
    if A0.shape != B0.shape or A1.shape != A0.shape or B1.shape != A0.shape:
        raise DimensionError("A0, B0, A1, B1 must share one square shape")
    base = build_instance(A0, B0, m)
    sol = solve_commuting(base, tol_commute=tol_commute)
    U0 = sol.frame
    b0 = np.diag(U0.T @ B0 @ U0).copy()
    return PerturbationInstance(A0, B0, A1, B1, m, U0, sol.a, b0, sol.c)


def perturb_first_order(pi, gap_tol=0.0):
    """Zeroth- and first-order terms of the minimizer P(eps) = P0 + eps P1 + O(eps^2).

    In the frame U0, P1 has only ov/vo blocks with

        (P1_ov)_ij = -((B1_ov)_ij - a_i (A1_ov)_ij) / (c_{m+j} - c_i + (a_{m+j} - a_i)^2 / 2).
    """
    m, c, a = pi.m, pi.c0, pi.a0
    if not c[m] - c[m - 1] > gap_tol:
        raise ExpansionInvalid(f"no gap between c_m and c_(m+1): {c[m - 1]!r}, {c[m]!r}")
    U = pi.U0
    A1 = U.T @ pi.A1 @ U
    B1 = U.T @ pi.B1 @ U
    ao, av = a[:m, None], a[None, m:]
    denom = c[None, m:] - c[:m, None] + 0.5 * (av - ao) ** 2
    X = -(B1[:m, m:] - ao * A1[:m, m:]) / denom
    M = U.shape[0]
    P1 = np.zeros((M, M))
    P1[:m, m:] = X
    P1[m:, :m] = X.T
    P0 = projector_from_basis(U[:, :m])
    return GrassmannPoint(P0, m), symmetrize(U @ P1 @ U.T)


@dataclass(frozen=True)
class AngleScan:
    theta_star: float
    J_star: float
    thetas: np.ndarray
    values: np.ndarray
    minima: list  # refined (theta, J) of every local minimum of the grid

    @property
    def P_star(self):
        return angle_projector(self.theta_star)


def angle_projector(theta):
    """P(theta) = (I + cos(theta) sigma_z + sin(theta) sigma_x) / 2."""
    return 0.5 * (np.eye(2) + np.cos(theta) * SIGMA_Z + np.sin(theta) * SIGMA_X)


def _J_on_circle(inst, thetas):
    thetas = np.atleast_1d(thetas)
    cz, sx = np.cos(thetas), np.sin(thetas)
    P = 0.5 * (np.eye(2)[None] + cz[:, None, None] * SIGMA_Z + sx[:, None, None] * SIGMA_X)
    AP = np.einsum("ij,njk->nik", inst.A, P)
    return np.einsum("ij,nji->n", inst.B, P) - 0.5 * np.einsum("nij,nji->n", AP, AP)


def _trig_coefficients(inst):
    """(c0, c1, s1, c2, s2) with J(theta) = c0 + c1 cos + s1 sin + c2 cos 2theta + s2 sin 2theta."""
    t = 2.0 * np.pi * np.arange(5) / 5
    v = _J_on_circle(inst, t)
    c0 = v.mean()
    c1, s1 = 0.4 * v @ np.cos(t), 0.4 * v @ np.sin(t)
    c2, s2 = 0.4 * v @ np.cos(2 * t), 0.4 * v @ np.sin(2 * t)
    return c0, c1, s1, c2, s2


def _newton_polish(coef, theta, radius, steps=8):
    _, c1, s1, c2, s2 = coef
    t0 = theta
    for _ in range(steps):
        d1 = -c1 * np.sin(theta) + s1 * np.cos(theta) - 2 * c2 * np.sin(2 * theta) + 2 * s2 * np.cos(2 * theta)
        d2 = -c1 * np.cos(theta) - s1 * np.sin(theta) - 4 * c2 * np.cos(2 * theta) - 4 * s2 * np.sin(2 * theta)
        if d2 <= 0.0:
            return t0
        theta = theta - d1 / d2
    return theta if abs(theta - t0) <= radius else t0


def bruteforce_angle_2x2(inst, grid_size=100_000, xtol=1e-12):
    """Global minimum of J over Gr(1, R^2) by a uniform angle grid plus golden-section refinement."""
    if inst.M != 2 or inst.m != 1:
        raise DimensionError(f"angle oracle needs M=2, m=1, got M={inst.M}, m={inst.m}")
    thetas = np.linspace(0.0, 2.0 * np.pi, grid_size, endpoint=False)
    values = _J_on_circle(inst, thetas)
    h = thetas[1] - thetas[0]
    left, right = np.roll(values, 1), np.roll(values, -1)
    # strict on the left so a flat stretch yields one candidate, not many
    idx = np.flatnonzero((values < left) & (values <= right))
    if idx.size == 0:  # J constant on the circle
        idx = np.array([int(np.argmin(values))])

    def f(t):
        return float(_J_on_circle(inst, t)[0])

    coef = _trig_coefficients(inst)
    minima = []
    for i in idx:
        t0 = thetas[i]
        if f(t0) < min(f(t0 - h), f(t0 + h)):
            t0 = minimize_scalar(f, bracket=(t0 - h, t0, t0 + h), method="golden", tol=xtol).x
        # golden section stalls near sqrt(eps) in theta; J is a trigonometric polynomial of
        # degree 2, so a few Newton steps on its exact derivative finish the job
        theta = _newton_polish(coef, t0, h)
        theta = float(np.mod(theta, 2.0 * np.pi))
        minima.append((theta, eval_J(inst, angle_projector(theta))))
    theta_star, J_star = min(minima, key=lambda tj: tj[1])
    return AngleScan(theta_star, J_star, thetas, values, minima)
