"""Convexified problem: minimize J~ over the convex hull K of the Grassmann manifold."""

import numpy as np

from ..linalg import ConvexPoint, as_matrix, aufbau, commutator, project_convex_hull
from ..objective import eval_Jtilde, grad_Gtilde
from .common import CONVERGED, MAX_ITER, SolveReport, SolverOptions, TraceRow


def damping_coefficient(a, b):
    """Minimizer over [0, 1] of the convex quadratic a beta^2 + b beta."""
    if a <= 0.0:
        return 1.0 if b < 0.0 else 0.0
    return min(max(-b / (2.0 * a), 0.0), 1.0)


def _natural_residual(inst, D, H):
    return float(np.linalg.norm(D - project_convex_hull(D - H, inst.m)))


def oda_convex(inst, D0=None, opts=None):
    """Optimal damping algorithm on J~, optionally finished by accelerated projected gradient.

    Plain ODA is a Frank-Wolfe scheme and converges sublinearly whenever the
    minimizer is not an extreme point of K. After ``opts.oda_phase_iter``
    unconverged ODA steps the run switches (``opts.polish``) to FISTA with a
    monotone restart, which keeps J~ non-increasing and all iterates in K.
    The trace ``step`` column holds beta_k during ODA and 1/L while polishing.
    """
    opts = opts or SolverOptions()
    m, M = inst.m, inst.M
    D = np.eye(M) * (m / M) if D0 is None else np.array(as_matrix(D0), dtype=float)
    report = SolveReport(method="oda-convex", status=MAX_ITER, final_point=None)
    if opts.store_iterates:
        report.iterates = []
    A = inst.A

    k = 0
    H = grad_Gtilde(inst, D)
    f = eval_Jtilde(inst, D)
    phase_end = opts.oda_phase_iter if opts.polish else opts.max_iter
    while True:
        res = _natural_residual(inst, D, H)
        P, gap = aufbau(H, m)
        E = P - D
        K = commutator(A, E)
        a = 0.25 * float(np.vdot(K, K))
        b = float(np.vdot(H, E))
        beta = damping_coefficient(a, b)
        report.trace.append(TraceRow(k, f, res, beta))
        if opts.store_iterates:
            report.iterates.append(D)
        report.extra["fw_gap"] = -b
        if res <= opts.residual_tol:
            report.status = CONVERGED
            break
        if k >= phase_end or k >= opts.max_iter:
            break
        D = P.copy() if beta == 1.0 else D + beta * E
        H = grad_Gtilde(inst, D)
        f = eval_Jtilde(inst, D)
        k += 1

    report.extra["oda_iterations"] = k
    if report.status != CONVERGED and opts.polish and k < opts.max_iter:
        k, D = _polish(inst, D, k, opts, report)

    D = as_matrix(D)
    H = grad_Gtilde(inst, D)
    w = np.linalg.eigvalsh(H)
    report.extra["H_star"] = H
    report.extra["aufbau_gap"] = float(w[m] - w[m - 1])
    report.iterations = k
    report.final_point = ConvexPoint(D, m)
    return report


def _polish(inst, D, k, opts, report):
    L = inst.lipschitz_tilde
    if L <= 0.0:  # J~ is linear; ODA already lands on the minimizer
        return k, D
    m = inst.m
    step = 1.0 / L
    Y, t = D, 1.0
    f = eval_Jtilde(inst, D)
    while k < opts.max_iter:
        k += 1
        Dn = project_convex_hull(Y - step * grad_Gtilde(inst, Y), m)
        fn = eval_Jtilde(inst, Dn)
        if fn > f:
            # restart from the last iterate: a plain projected gradient step is monotone
            Y, t = D, 1.0
            Dn = project_convex_hull(D - step * grad_Gtilde(inst, D), m)
            fn = eval_Jtilde(inst, Dn)
        tn = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        Y = Dn + ((t - 1.0) / tn) * (Dn - D)
        D, f, t = Dn, fn, tn
        H = grad_Gtilde(inst, D)
        res = _natural_residual(inst, D, H)
        report.trace.append(TraceRow(k, f, res, step))
        if opts.store_iterates:
            report.iterates.append(D)
        if res <= opts.residual_tol:
            report.status = CONVERGED
            break
    return k, D
