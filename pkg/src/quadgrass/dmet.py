"""Bath construction for density matrix embedding.

A 1-RDM gamma on R^L is split by a fragment index set of size l into blocks
gamma_frag, gamma_ext and the couplings between them. Choosing an m-dimensional
bath inside the environment ext = R^{L-l} is a projector problem with

    A = gamma_ext,   B = (gamma_ext^2 - gamma_ef gamma_fe) / 2,   C = -gamma_ef gamma_fe / 2,

where gamma_ef = gamma_ext,frag. The cluster cost ||Pi gamma Pi^perp||_F^2 of
the cluster projector Pi = I_frag + P equals 2 J(P) + ||gamma_ef||_F^2.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, ValidationError
from .linalg import as_matrix, projector_from_basis, symmetrize
from .objective import build_instance

PAULI_TOL = 1e-10
SLATER_TOL = 1e-8


@dataclass(frozen=True)
class RdmDiagnostics:
    min_eigenvalue: float
    max_eigenvalue: float
    trace: float
    idempotency: float  # ||gamma^2 - gamma||_F
    slater: bool


def validate_rdm(gamma, expected_trace=None, tol=PAULI_TOL, trace_tol=1e-8):
    """Check 0 <= gamma <= I (and optionally Tr gamma) and report spectral diagnostics."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
        raise DimensionError(f"gamma must be square, got shape {gamma.shape}")
    if np.linalg.norm(gamma - gamma.T) > 1e-12 * (1.0 + np.linalg.norm(gamma)):
        raise ValidationError("gamma is not symmetric")
    w = np.linalg.eigvalsh(gamma)
    if w[0] < -tol or w[-1] > 1.0 + tol:
        raise ValidationError(
            f"gamma violates 0 <= gamma <= I: eigenvalues span [{w[0]:.6e}, {w[-1]:.6e}]"
        )
    tr = float(np.trace(gamma))
    if expected_trace is not None and abs(tr - expected_trace) > trace_tol * max(1.0, abs(expected_trace)):
        raise ValidationError(f"Tr(gamma) = {tr!r}, expected {expected_trace!r}")
    idem = float(np.linalg.norm(gamma @ gamma - gamma))
    return RdmDiagnostics(float(w[0]), float(w[-1]), tr, idem, idem <= SLATER_TOL)


@dataclass(frozen=True)
class BathSpec:
    gamma: np.ndarray
    fragment: np.ndarray  # sorted fragment indices
    environment: np.ndarray  # sorted complement
    diagnostics: RdmDiagnostics

    @property
    def L(self):
        return self.gamma.shape[0]

    @property
    def ell(self):
        return self.fragment.size

    @property
    def M(self):
        return self.environment.size

    @property
    def gamma_frag(self):
        return self.gamma[np.ix_(self.fragment, self.fragment)]

    @property
    def gamma_ext(self):
        return self.gamma[np.ix_(self.environment, self.environment)]

    @property
    def gamma_ef(self):
        """gamma_ext,frag, shape (M, l)."""
        return self.gamma[np.ix_(self.environment, self.fragment)]

    @property
    def offset(self):
        return float(np.linalg.norm(self.gamma_ef) ** 2)

    def embed(self, P):
        """Cluster projector Pi = I_frag + P on R^L for a projector P on the environment."""
        Pi = np.zeros((self.L, self.L))
        Pi[self.fragment, self.fragment] = 1.0
        Pi[np.ix_(self.environment, self.environment)] = P
        return Pi


def bath_spec(gamma, fragment, expected_trace=None):
    gamma = np.asarray(gamma, dtype=float)
    diag = validate_rdm(gamma, expected_trace)
    L = gamma.shape[0]
    frag = np.unique(np.asarray(fragment, dtype=int))
    if frag.size != len(fragment):
        raise ValidationError("fragment indices contain duplicates")
    if frag.size and (frag[0] < 0 or frag[-1] >= L):
        raise ValidationError(f"fragment indices must lie in [0, {L - 1}]")
    if not 1 <= frag.size <= L - 2:
        raise ValidationError(f"fragment size {frag.size} outside [1, {L - 2}]")
    env = np.setdiff1d(np.arange(L), frag)
    return BathSpec(gamma, frag, env, diag)


def build_bath_problem(spec, m):
    """Projector problem for an m-dimensional bath; returns (instance, offset)."""
    if not 1 <= m <= spec.M - 1:
        raise ValidationError(f"bath dimension m={m} outside [1, {spec.M - 1}]")
    g_ext, g_ef = spec.gamma_ext, spec.gamma_ef
    coupling = g_ef @ g_ef.T
    inst = build_instance(g_ext, 0.5 * (g_ext @ g_ext - coupling), m)
    C = -0.5 * symmetrize(coupling)
    if np.linalg.norm(inst.C - C) > 1e-12 * (1.0 + np.linalg.norm(C)):
        raise ValidationError("bath instance: C disagrees with -gamma_ef gamma_fe / 2")
    return inst, spec.offset


def _reduced_cost(spec, P):
    A = spec.gamma_ext
    B = 0.5 * (A @ A - spec.gamma_ef @ spec.gamma_ef.T)
    AP = A @ P
    return 2.0 * float(np.vdot(B, P) - 0.5 * np.vdot(AP, AP.T)) + spec.offset


def cluster_cost_direct(spec, P):
    """||Pi gamma Pi^perp||_F^2 for the cluster built from the environment projector P (any rank)."""
    P = as_matrix(P)
    if P.shape != (spec.M, spec.M):
        raise DimensionError(f"bath projector must be {spec.M}x{spec.M}, got {P.shape}")
    Pi = spec.embed(P)
    return float(np.linalg.norm(Pi @ spec.gamma @ (np.eye(spec.L) - Pi)) ** 2)


def cluster_cost(spec, P, check_tol=1e-11):
    """Cluster cost 2 J(P) + ||gamma_ef||^2, cross-checked against the direct form."""
    P = as_matrix(P)
    direct = cluster_cost_direct(spec, P)
    reduced = _reduced_cost(spec, P)
    scale = max(1.0, spec.offset)
    if abs(direct - reduced) > check_tol * scale:
        raise ValidationError(f"cluster cost mismatch: reduced {reduced!r} vs direct {direct!r}")
    return reduced


def eigenvalue_clusters(w, eig_tol):
    """Split ascending eigenvalues into groups whose consecutive gaps are <= eig_tol."""
    breaks = np.flatnonzero(np.diff(w) > eig_tol) + 1
    return np.split(np.arange(w.size), breaks)


@dataclass(frozen=True)
class BathDimension:
    min_bath: int  # dim X - l
    basis: np.ndarray  # L x dim X orthonormal basis of X
    occupations: list  # (n_i, multiplicity m_i) of the nonzero clusters
    dims: list  # dim P_i H_frag per nonzero cluster

    @property
    def bound_multiplicity(self):
        """sum_i min(m_i, l)."""
        ell = self.basis.shape[1] - self.min_bath
        return int(sum(min(mult, ell) for _, mult in self.occupations))

    @property
    def bound_count(self):
        """s * l with s the number of nonzero occupations."""
        ell = self.basis.shape[1] - self.min_bath
        return len(self.occupations) * ell


def min_bath_dimension(spec, eig_tol=1e-8, frame_tol=None):
    """Smallest m allowing full disentanglement: dim X - l.

    X = H_frag + sum_i P_i H_frag is the smallest gamma-invariant subspace
    containing the fragment, P_i ranging over the spectral projectors of the
    nonzero eigenvalue clusters of gamma. The kernel part is already contained
    in H_frag + sum_i P_i H_frag.
    """
    gamma = spec.gamma
    if frame_tol is None:
        frame_tol = 1e-10 * max(np.linalg.norm(gamma, 2), 1.0)
    w, Q = np.linalg.eigh(gamma)
    E = np.zeros((spec.L, spec.ell))
    E[spec.fragment, np.arange(spec.ell)] = 1.0
    blocks = [E]
    occupations, dims = [], []
    for idx in eigenvalue_clusters(w, eig_tol):
        if np.max(np.abs(w[idx])) <= eig_tol:
            continue
        Qi = Q[:, idx]
        PiE = Qi @ (Qi.T @ E)
        occupations.append((float(np.mean(w[idx])), idx.size))
        dims.append(int(np.sum(np.linalg.svd(PiE, compute_uv=False) > frame_tol)))
        blocks.append(PiE)
    U, s, _ = np.linalg.svd(np.hstack(blocks), full_matrices=False)
    r = int(np.sum(s > frame_tol))
    return BathDimension(r - spec.ell, U[:, :r], occupations, dims)


def slater_bath_qr(spec, frame_tol=None):
    """Cluster basis of H_frag + gamma H_frag for an idempotent gamma, by pivoted QR of gamma_ext,frag.

    Returns an L x (l + r) orthonormal matrix whose first l columns are the
    fragment unit vectors and whose remaining r columns (supported on the
    environment) span Ran(gamma_ext,frag), r its numerical rank.
    """
    if not spec.diagnostics.slater:
        raise ValidationError(
            f"gamma is not idempotent (||gamma^2 - gamma||_F = {spec.diagnostics.idempotency:.3e})"
        )
    g_ef = spec.gamma_ef
    if frame_tol is None:
        frame_tol = 1e-10 * max(np.linalg.norm(spec.gamma, 2), 1.0)
    r = int(np.sum(np.linalg.svd(g_ef, compute_uv=False) > frame_tol))
    Q, _, _ = scipy.linalg.qr(g_ef, mode="economic", pivoting=True)
    basis = np.zeros((spec.L, spec.ell + r))
    basis[spec.fragment, np.arange(spec.ell)] = 1.0
    basis[np.ix_(spec.environment, np.arange(spec.ell, spec.ell + r))] = Q[:, :r]
    return basis


def bath_projector(spec, basis):
    """Environment projector P of the bath part of a cluster basis."""
    V = basis[spec.environment][:, spec.ell :]
    return projector_from_basis(V) if V.shape[1] else np.zeros((spec.M, spec.M))


# fixtures


def slater_rdm(L, N, seed):
    """Random rank-N orthogonal projector on R^L."""
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((L, N)))
    return projector_from_basis(Q)


def mixed_rdm_with_known_X(L, ell, dims, occupations, seed, fragment=None, min_coupling=0.3):
    """Mixed-state gamma = sum_i n_i P_i with prescribed dim P_i H_frag = dims[i].

    A subspace S of dimension k = l + sum(dims) containing H_frag is drawn;
    cluster i receives dims[i] orthonormal vectors of S and further vectors
    orthogonal to S (one per cluster, so P_i H_frag keeps dimension dims[i]).
    Returns (gamma, fragment, k - l); X = S generically, so the minimal bath
    dimension is sum(dims). The vectors of S not given to any cluster span part
    of the kernel. The rotation of S is redrawn until every cluster overlaps the
    fragment with singular values >= ``min_coupling``, which keeps the cost of
    too small a bath well away from zero.
    """
    if any(d > ell for d in dims):
        raise ValidationError(f"each dim P_i H_frag is at most l={ell}, got {dims}")
    rng = np.random.default_rng(seed)
    fragment = np.arange(ell) if fragment is None else np.asarray(fragment)
    env = np.setdiff1d(np.arange(L), fragment)
    k = ell + sum(dims)
    extra = len(dims)
    if k + extra > L:
        raise ValidationError(f"L={L} too small for l={ell}, dims={dims}")
    # S = H_frag + span(random environment directions); S^perp inside ext
    W = np.zeros((L, L - ell))
    W[env, np.arange(L - ell)] = 1.0
    Z, _ = np.linalg.qr(rng.standard_normal((L - ell, L - ell)))
    env_frame = W @ Z
    E = np.zeros((L, ell))
    E[fragment, np.arange(ell)] = 1.0
    S = np.hstack([E, env_frame[:, : sum(dims)]])
    # rotate S so its vectors mix fragment and environment
    bounds = np.cumsum([0, *dims])
    for _ in range(1000):
        R, _ = np.linalg.qr(rng.standard_normal((k, k)))
        overlaps = [np.linalg.svd(R[:ell, a:b], compute_uv=False) for a, b in zip(bounds, bounds[1:])]
        if min(o.min() for o in overlaps) >= min_coupling:
            break
    else:
        raise ValidationError(f"could not reach fragment coupling {min_coupling}")
    S = S @ R
    perp = env_frame[:, sum(dims):]
    gamma = np.zeros((L, L))
    col = 0
    for i, (d, n) in enumerate(zip(dims, occupations)):
        V = np.hstack([S[:, col : col + d], perp[:, i : i + 1]])
        col += d
        gamma += n * projector_from_basis(V)
    return symmetrize(gamma), fragment, sum(dims)
