"""Riemannian steepest descent and trust-region methods (Grassmann and Stiefel)."""

import numpy as np

from ..errors import NumericalError, RetractionDegenerate, StepTooLarge
from ..linalg import GrassmannPoint, as_matrix, commutator, projector_from_basis
from ..manifold import (
    StiefelPoint,
    _hess,
    _proj,
    _qr_pos,
    _retract,
    _stiefel_hess,
    stiefel_tangent_project,
)
from ..objective import eval_J, grad_G
from .common import CONVERGED, MAX_ITER, STALLED, SolveReport, SolverOptions, TraceRow


def riemannian_descent(inst, P0, opts=None):
    """Steepest descent along the spectral retraction with Armijo backtracking."""
    opts = opts or SolverOptions()
    m = inst.m
    P = np.array(as_matrix(P0), dtype=float)
    f = eval_J(inst, P)
    report = SolveReport(method="rgd", status=MAX_ITER, final_point=None)
    t = 1.0
    # until a step has passed Armijo, fall back on 1/L with the Hessian bound
    # L = 2 ||G||_2 + ||A||_2^2 and ||G||_2 <= ||B||_2 + ||A||_2^2
    a2 = np.linalg.norm(inst.A, 2) ** 2
    t_good = 1.0 / (2.0 * (np.linalg.norm(inst.B, 2) + a2) + a2)
    for k in range(opts.max_iter + 1):
        g = _proj(P, grad_G(inst, P))
        gnorm = float(np.linalg.norm(g))
        report.trace.append(TraceRow(k, f, gnorm, t if k else 0.0))
        if gnorm <= opts.residual_tol:
            report.status = CONVERGED
            break
        if k == opts.max_iter:
            break
        noise = 64 * np.finfo(float).eps * (1.0 + abs(f))
        if t_good * gnorm**2 <= noise:
            # the predicted decrease is below the rounding error of J, so Armijo
            # cannot discriminate; minimize along the curve with a secant step on
            # the directional derivative, which gradients still resolve
            t = _secant_step(inst, P, g, t_good, m)
            P = _retract(P, -g, t, m)
            f = eval_J(inst, P)
            continue
        t = min(2.0 * t, 1e6)
        for _ in range(opts.max_backtracks):
            try:
                Pn = _retract(P, -g, t, m)
            except RetractionDegenerate:
                t *= opts.backtrack
                continue
            fn = eval_J(inst, Pn)
            if fn <= f - opts.armijo_c1 * t * gnorm**2:
                break
            t *= opts.backtrack
        else:
            report.status = STALLED
            report.warnings.append(f"iter {k}: Armijo line search failed after {opts.max_backtracks} halvings")
            break
        if opts.armijo_c1 * t * gnorm**2 > noise:
            t_good = t
        P, f = Pn, fn
    report.iterations = report.trace[-1].iter
    report.final_point = GrassmannPoint(P, m)
    return report


def _secant_step(inst, P, g, t1, m):
    d0 = -float(np.vdot(g, g))
    try:
        Pt = _retract(P, -g, t1, m)
    except RetractionDegenerate:
        return 0.5 * t1
    g1 = _proj(P, _proj(Pt, grad_G(inst, Pt)))
    d1 = -float(np.vdot(g1, g))
    if d1 <= d0:  # no positive curvature detected along -g
        return t1
    return t1 * (-d0) / (d1 - d0)


def _tcg(inner, hess, proj, grad, radius, kappa, theta, max_inner):
    """Steihaug-Toint truncated CG on the model <g, e> + 1/2 <e, H e> within ||e|| <= radius."""
    eta = np.zeros_like(grad)
    Heta = np.zeros_like(grad)
    r = grad
    rr = inner(r, r)
    r0 = np.sqrt(rr)
    d = -r
    stop = "max_inner"
    for _ in range(max_inner):
        Hd = hess(d)
        dHd = inner(d, Hd)
        ed, dd, ee = inner(eta, d), inner(d, d), inner(eta, eta)
        if dHd <= 0.0:
            tau = (-ed + np.sqrt(ed * ed + dd * (radius**2 - ee))) / dd
            return eta + tau * d, Heta + tau * Hd, "negative_curvature"
        alpha = rr / dHd
        ee_new = ee + 2 * alpha * ed + alpha * alpha * dd
        if ee_new >= radius**2:
            tau = (-ed + np.sqrt(ed * ed + dd * (radius**2 - ee))) / dd
            return eta + tau * d, Heta + tau * Hd, "boundary"
        eta = eta + alpha * d
        Heta = Heta + alpha * Hd
        r = proj(r + alpha * Hd)
        rr_new = inner(r, r)
        if np.sqrt(rr_new) <= r0 * min(kappa, r0**theta):
            stop = "residual"
            break
        d = -r + (rr_new / rr) * d
        rr = rr_new
    return eta, Heta, stop


def _inner(X, Y):
    return float(np.vdot(X, Y))


def trust_region(inst, start, opts=None):
    """Riemannian trust region with truncated-CG subproblems.

    ``start`` is a ``GrassmannPoint`` (Grassmann formulation) or a
    ``StiefelPoint`` (Stiefel formulation, V -> J(V V^T)). The trace residual is
    always the Grassmann residual ||[G(P), P]||_F of P = V V^T.
    """
    opts = opts or SolverOptions()
    stiefel = isinstance(start, StiefelPoint)
    m, M = inst.m, inst.M
    dim = m * (M - m)
    max_radius = opts.tr_max_radius or np.pi / 2 * np.sqrt(2.0 * dim)
    radius = opts.tr_initial_radius or max_radius / 8.0

    if stiefel:
        V = np.array(start.V, dtype=float)
        P = projector_from_basis(V)
    else:
        P = np.array(as_matrix(start), dtype=float)
    f = eval_J(inst, P)
    report = SolveReport(method="tr-stiefel" if stiefel else "tr-grassmann", status=MAX_ITER, final_point=None)
    accepted = 0
    for k in range(opts.max_iter + 1):
        G = grad_G(inst, P)
        res = float(np.linalg.norm(commutator(G, P)))
        report.trace.append(TraceRow(k, f, res, radius))
        if res <= opts.residual_tol:
            report.status = CONVERGED
            break
        if k == opts.max_iter:
            break
        if stiefel:
            grad = stiefel_tangent_project(V, 2.0 * G @ V)

            def proj(Z, V=V):
                return stiefel_tangent_project(V, Z)

            def hess(Z, V=V, G=G):
                return _stiefel_hess(inst, V, G, Z)

            max_inner = dim + m * (m - 1) // 2
        else:
            grad = _proj(P, G)

            def proj(X, P=P):
                return _proj(P, X)

            def hess(X, P=P, G=G):
                return _hess(inst, P, G, X)

            max_inner = dim
        eta, Heta, stop = _tcg(_inner, hess, proj, grad, radius, opts.tcg_kappa, opts.tcg_theta, max(max_inner, 1))
        model_decrease = -(_inner(grad, eta) + 0.5 * _inner(eta, Heta))
        try:
            if stiefel:
                Vn = _qr_pos(V + eta)
                Pn = projector_from_basis(Vn)
            else:
                Pn = _retract(P, eta, 1.0, m)
        except (RetractionDegenerate, StepTooLarge):
            radius *= opts.tr_shrink
            continue
        fn = eval_J(inst, Pn)
        reg = max(1.0, abs(f)) * np.finfo(float).eps * 1e3
        rho = (f - fn + reg) / (model_decrease + reg)
        if not np.isfinite(rho):
            raise NumericalError(f"trust-region ratio is not finite at iteration {k}")
        if rho < 0.25:
            radius *= opts.tr_shrink
        elif rho > opts.tr_rho_expand and stop in ("boundary", "negative_curvature"):
            radius = min(opts.tr_expand * radius, max_radius)
        if rho > opts.tr_rho_accept:
            P, f = Pn, fn
            if stiefel:
                V = Vn
            accepted += 1
        if radius < 1e-15:
            report.status = STALLED
            report.warnings.append(f"iter {k}: trust radius collapsed")
            break
    report.iterations = report.trace[-1].iter
    report.extra["accepted"] = accepted
    report.final_point = GrassmannPoint(P, m)
    if stiefel:
        report.extra["V"] = StiefelPoint(V)
    return report
