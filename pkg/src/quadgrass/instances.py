"""Problem fixtures: the low-dimensional families and seeded random instances."""

import numpy as np

from .objective import build_instance, instance_from_AC
from .linalg import random_grassmann

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def two_by_two(a=1.0, alpha=1.0, beta=0.0, c=0.1):
    """M=2, m=1 family: A = diag(a, a + sqrt(alpha)), C = [[c, beta], [beta, -c]]."""
    A = np.diag([a, a + np.sqrt(alpha)])
    C = np.array([[c, beta], [beta, -c]])
    return instance_from_AC(A, C, 1)


def bloch_projector(x, z):
    """P_{x,z} = (I + x sigma_x + z sigma_z) / 2."""
    return 0.5 * (np.eye(2) + x * SIGMA_X + z * SIGMA_Z)


def three_by_three(a=(1.0, 2.0, 3.0), beta=0.0, alpha=0.5):
    """M=3, m=1 example whose convexified minimizers all lie off the manifold."""
    a1, a2, a3 = a
    A = np.diag(a)
    h12 = -0.5 * alpha * (a2 - a1) ** 2
    h23 = -0.5 * alpha * (a3 - a2) ** 2
    C = np.array([[beta, h12, 0.0], [h12, beta, h23], [0.0, h23, beta]])
    return instance_from_AC(A, C, 1)


def random_instance(M, m, seed, commuting=False, gapped=True):
    """Seeded instance with A = X X^T / M (PSD) and a Gaussian symmetric B.

    With ``commuting=True`` A and B share a Haar-random eigenframe; ``gapped``
    then redraws until c_m < c_{m+1} by at least 1e-3.
    """
    rng = np.random.default_rng(seed)
    if not commuting:
        X = rng.standard_normal((M, M))
        Y = rng.standard_normal((M, M))
        return build_instance(X @ X.T / M, (Y + Y.T) / 2, m)
    while True:
        Q, _ = np.linalg.qr(rng.standard_normal((M, M)))
        a = rng.uniform(0.0, 2.0, M)
        b = rng.standard_normal(M)
        c = np.sort(b - a**2 / 2)
        if not gapped or c[m] - c[m - 1] > 1e-3:
            break
    return build_instance((Q * a) @ Q.T, (Q * b) @ Q.T, m)


def random_start(inst, seed):
    return random_grassmann(inst.M, inst.m, seed)
