"""Self-consistent field iterations on the Grassmann manifold.

``roothaan`` and ``oda_J`` minimize J; ``roothaan_tilde`` runs the same fixed
point map on the convexified gradient and is kept as a demonstrator of its
two-cycles.
"""

import logging
from collections import deque

import numpy as np

from ..errors import NumericalError
from ..linalg import ConvexPoint, GrassmannPoint, as_matrix, aufbau, commutator
from ..objective import eval_J, grad_G, grad_Gtilde
from .common import (
    CONVERGED,
    MAX_ITER,
    TWO_CYCLE,
    SolveReport,
    SolverOptions,
    TraceRow,
    two_cycle_check,
)

log = logging.getLogger(__name__)


def _oda_step(inst, D, P, G):
    E = P - D
    AE = inst.A @ E
    a = -0.5 * float(np.vdot(AE, AE.T))
    b = float(np.vdot(G, E))
    scale = 1e-12 * (1.0 + np.linalg.norm(inst.A) ** 2 * max(1.0, np.linalg.norm(E) ** 2))
    if a > scale:
        raise NumericalError(f"ODA curvature a_k = {a:.3e} > 0; the quadratic is not concave")
    # f(alpha) = a alpha^2 + b alpha + f(0) is concave: the minimum on [0, 1] is an endpoint
    slack = 1e-13 * (1.0 + abs(eval_J(inst, D)))
    alpha = 1.0 if a + b <= slack else 0.0
    return alpha, a, b


def _fixed_point_run(inst, X0, opts, method, fock, damped):
    m = inst.m
    X = np.array(as_matrix(X0), dtype=float)
    history = deque(maxlen=opts.cycle_detection_window + 2)
    history.append(X)
    report = SolveReport(method=method, status=MAX_ITER, final_point=None)
    if opts.store_iterates:
        report.iterates = []
    degenerate_steps = 0

    for k in range(opts.max_iter + 1):
        G = grad_G(inst, X)
        res = float(np.linalg.norm(commutator(G, X)))
        F = G if fock is None else fock(inst, X)
        P, gap = aufbau(F, m)
        step = float(np.linalg.norm(P - X))
        alpha = 1.0
        if damped:
            alpha, a, b = _oda_step(inst, X, P, F)
            report.extra.setdefault("line_search", []).append((a, b))
        report.trace.append(TraceRow(k, eval_J(inst, X), res, alpha))
        if opts.store_iterates:
            report.iterates.append(X)

        if gap <= opts.gap_tol:
            degenerate_steps += 1
            report.warnings.append(f"iter {k}: degenerate Aufbau step (gap {gap:.3e})")
        feasible = np.linalg.norm(X @ X - X) <= 1e-10
        if res <= opts.residual_tol and feasible and (
            step <= opts.fixed_point_tol or gap <= opts.gap_tol
        ):
            report.status = CONVERGED
            break
        if k == opts.max_iter:
            break

        if alpha == 1.0:
            X = P
        else:
            X = (1.0 - alpha) * X + alpha * P
        history.append(X)
        if two_cycle_check(list(history), opts.cycle_tol, opts.cycle_detection_window):
            report.status = TWO_CYCLE
            report.extra["cycle"] = (history[-2], history[-1])
            report.trace.append(
                TraceRow(k + 1, eval_J(inst, X), float(np.linalg.norm(commutator(grad_G(inst, X), X))), alpha)
            )
            if opts.store_iterates:
                report.iterates.append(X)
            break

    if degenerate_steps:
        log.warning("%s: %d degenerate Aufbau steps (gap <= %g)", method, degenerate_steps, opts.gap_tol)
    if report.status == TWO_CYCLE and fock is None:
        msg = f"{method}: two-cycle detected; Roothaan on J is expected to converge"
        log.warning(msg)
        report.warnings.append(msg)
    report.iterations = report.trace[-1].iter
    if np.linalg.norm(X @ X - X) <= 1e-10:
        report.final_point = GrassmannPoint(X, m)
    else:
        report.final_point = ConvexPoint(X, m)
    return report


def roothaan(inst, P0, opts=None):
    """Roothaan iteration P_{k+1} = lowest-m spectral projector of G(P_k)."""
    return _fixed_point_run(inst, P0, opts or SolverOptions(), "roothaan", None, damped=False)


def oda_J(inst, D0, opts=None):
    """Optimal damping on J with the exact (closed form) segment line search."""
    return _fixed_point_run(inst, D0, opts or SolverOptions(), "oda", None, damped=True)


def roothaan_tilde(inst, P0, opts=None):
    """Roothaan map driven by grad J~; may settle into a two-cycle."""
    return _fixed_point_run(inst, P0, opts or SolverOptions(), "roothaan-tilde", grad_Gtilde, damped=False)
