"""Multistart driver over Haar-random starting points."""

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..linalg import random_grassmann
from ..manifold import stiefel_lift
from .common import SolverOptions
from .riemannian import riemannian_descent, trust_region
from .scf import oda_J, roothaan

LOCAL_METHODS = ("tr-grassmann", "tr-stiefel", "rgd", "roothaan", "oda")


def run_local(inst, P0, method, opts=None):
    if method == "tr-grassmann":
        return trust_region(inst, P0, opts)
    if method == "tr-stiefel":
        return trust_region(inst, stiefel_lift(P0), opts)
    if method == "rgd":
        return riemannian_descent(inst, P0, opts)
    if method == "roothaan":
        return roothaan(inst, P0, opts)
    if method == "oda":
        return oda_J(inst, P0, opts)
    raise ValueError(f"unknown local method {method!r}; choose from {LOCAL_METHODS}")


def start_seeds(seed, n_starts):
    """64-bit child seeds, one per start, derived deterministically from ``seed``."""
    ss = np.random.SeedSequence(seed)
    return [int(s) for s in ss.generate_state(n_starts, dtype=np.uint64)]


def _one(args):
    inst, s, method, opts = args
    return run_local(inst, random_grassmann(inst.M, inst.m, s), method, opts)


def multistart(inst, n_starts, seed=0, method="tr-grassmann", opts=None, workers=None):
    """Run ``method`` from ``n_starts`` Haar-random points; return (best report, all final J).

    Results do not depend on ``workers``: each start has its own seed and the
    reduction picks the lowest J, breaking ties by start index.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    jobs = [(inst, s, method, opts or SolverOptions()) for s in start_seeds(seed, n_starts)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_one, jobs, chunksize=max(1, n_starts // (4 * workers))))
    else:
        reports = [_one(job) for job in jobs]
    all_J = [r.objective for r in reports]
    best = reports[int(np.argmin(all_J))]
    return best, all_J
