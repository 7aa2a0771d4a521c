"""Dense symmetric matrix primitives.

Symmetric matrices are plain ``numpy`` arrays; the point types below wrap
arrays together with the invariants of the feasible sets

* ``GrassmannPoint``: rank-m orthogonal projector (P^2 = P = P^T, Tr P = m),
* ``ConvexPoint``: density matrix of the convex hull (0 <= D <= I, Tr D = m).
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .errors import DimensionError, NumericalError, ValidationError


def _square(X, name="matrix"):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {X.shape}")
    return X


def symmetrize(X):
    """Return (X + X^T)/2 for a square matrix."""
    X = _square(X)
    return 0.5 * (X + X.T)


def as_matrix(X):
    """Unwrap point types to their underlying array."""
    if isinstance(X, GrassmannPoint):
        return X.P
    if isinstance(X, ConvexPoint):
        return X.D
    return np.asarray(X, dtype=float)


def commutator(X, Y):
    X, Y = as_matrix(X), as_matrix(Y)
    if X.shape != Y.shape:
        raise DimensionError(f"commutator of shapes {X.shape} and {Y.shape}")
    return X @ Y - Y @ X


def inner(X, Y):
    """Frobenius inner product <X, Y> = Tr(X^T Y)."""
    return float(np.vdot(X, Y))


@dataclass(frozen=True)
class SpectralDecomp:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # column k <-> eigenvalues[k]

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self):
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.T


def eigh(X):
    """Full symmetric eigendecomposition with ascending eigenvalues.

    Ties keep LAPACK's native ordering, which is deterministic for a fixed input.
    """
    X = _square(X)
    try:
        w, V = np.linalg.eigh(X)
    except np.linalg.LinAlgError as exc:
        finite = bool(np.all(np.isfinite(X)))
        norm = float(np.linalg.norm(X)) if finite else float("nan")
        raise NumericalError(
            f"symmetric eigensolver failed (dim={X.shape[0]}, finite={finite}, "
            f"||X||_F={norm:.3e}): {exc}"
        ) from exc
    return SpectralDecomp(w, V)


@dataclass(frozen=True)
class GrassmannPoint:
    P: np.ndarray
    m: int

    def __post_init__(self):
        P = symmetrize(self.P)
        object.__setattr__(self, "P", P)
        M = P.shape[0]
        if not 1 <= self.m <= M - 1:
            raise ValidationError(f"rank m={self.m} outside [1, {M - 1}]")
        tol = DEFAULT_TOL.feasibility
        idem = np.linalg.norm(P @ P - P)
        if idem > tol:
            raise ValidationError(f"||P^2 - P||_F = {idem:.3e} exceeds {tol:g}")
        tr = np.trace(P)
        if abs(tr - self.m) > tol:
            raise ValidationError(f"Tr(P) = {tr!r} differs from m = {self.m}")

    @property
    def dim(self):
        return self.P.shape[0]


@dataclass(frozen=True)
class ConvexPoint:
    D: np.ndarray
    m: int

    def __post_init__(self):
        D = symmetrize(self.D)
        object.__setattr__(self, "D", D)
        tol = DEFAULT_TOL.feasibility
        w = np.linalg.eigvalsh(D)
        if w[0] < -tol or w[-1] > 1 + tol:
            raise ValidationError(
                f"eigenvalues of D in [{w[0]:.3e}, {w[-1]:.3e}], outside [0, 1]"
            )
        tr = np.trace(D)
        if abs(tr - self.m) > tol:
            raise ValidationError(f"Tr(D) = {tr!r} differs from m = {self.m}")

    @property
    def dim(self):
        return self.D.shape[0]

    @classmethod
    def uniform(cls, M, m):
        return cls(np.eye(M) * (m / M), m)


def projector_from_basis(V):
    return symmetrize(V @ V.T)


def spectral_projector(S, m):
    """Projector onto the m lowest eigenvectors of ``S`` and the gap above them.

    Returns ``(GrassmannPoint, gap)`` with ``gap = lambda_{m+1} - lambda_m``.
    """
    M = S.dim
    if not 1 <= m <= M - 1:
        raise ValidationError(f"rank m={m} outside [1, {M - 1}]")
    P = projector_from_basis(S.eigenvectors[:, :m])
    gap = float(S.eigenvalues[m] - S.eigenvalues[m - 1])
    return GrassmannPoint(P, m), gap


def aufbau(X, m):
    """Lowest-m spectral projector of a symmetric matrix as a raw array, plus the gap."""
    w, V = np.linalg.eigh(X)
    return projector_from_basis(V[:, :m]), float(w[m] - w[m - 1])


def random_grassmann(M, m, seed):
    """Haar-distributed rank-m projector, deterministic per seed."""
    if not 1 <= m <= M - 1:
        raise ValidationError(f"rank m={m} outside [1, {M - 1}]")
    rng = np.random.default_rng(seed)
    while True:
        Q, R = np.linalg.qr(rng.standard_normal((M, m)))
        if np.min(np.abs(np.diag(R))) > 1e-12:
            return GrassmannPoint(projector_from_basis(Q), m)


def random_convex(M, m, seed, n_vertices=None):
    """Random interior point of the convex hull: Dirichlet mixture of Haar projectors."""
    rng = np.random.default_rng(seed)
    k = n_vertices or M + 1
    weights = rng.dirichlet(np.ones(k))
    seeds = rng.integers(0, 2**63, size=k)
    D = sum(w * random_grassmann(M, m, int(s)).P for w, s in zip(weights, seeds))
    return ConvexPoint(D, m)


def project_capped_simplex(v, m):
    """Euclidean projection of ``v`` onto {x : 0 <= x <= 1, sum(x) = m}."""
    v = np.asarray(v, dtype=float)
    if not 0 <= m <= v.size:
        raise ValidationError(f"trace target {m} outside [0, {v.size}]")
    # s(t) = sum(clip(v - t, 0, 1)) is piecewise linear and non-increasing in t
    bps = np.unique(np.concatenate([v, v - 1.0]))
    s = np.clip(v[None, :] - bps[:, None], 0.0, 1.0).sum(axis=1)
    j = np.searchsorted(-s, -m, side="left")  # first breakpoint with s <= m
    if j == 0:
        t = bps[0]
    elif j >= bps.size:
        t = bps[-1]
    else:
        t0, t1, s0, s1 = bps[j - 1], bps[j], s[j - 1], s[j]
        t = t1 if s0 == s1 else t0 + (s0 - m) * (t1 - t0) / (s0 - s1)
    return np.clip(v - t, 0.0, 1.0)


def project_convex_hull(X, m):
    """Frobenius projection of a symmetric matrix onto {0 <= D <= I, Tr D = m}."""
    w, V = np.linalg.eigh(symmetrize(X))
    return symmetrize((V * project_capped_simplex(w, m)) @ V.T)
