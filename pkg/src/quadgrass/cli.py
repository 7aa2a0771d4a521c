"""Command-line front end: ``quadgrass {solve,certify,bath,oracle,bench}``.

Each failure class maps to its own exit code (see ``EXIT_CODES``); messages
name the stage that failed (load, assemble, init, solve, certify, write).
"""

import argparse
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .dmet import bath_spec, build_bath_problem, cluster_cost, min_bath_dimension
from .errors import (
    ContractViolation,
    DimensionError,
    ExpansionInvalid,
    InvalidCertificateInput,
    NotCommutingError,
    NumericalError,
    ParseError,
    QuadGrassError,
    ValidationError,
)
from .linalg import ConvexPoint, GrassmannPoint, aufbau, random_grassmann
from .manifold import stiefel_lift
from .objective import build_instance, eval_J, eval_Jtilde, instance_from_AC, residual
from .solvers import (
    LOCAL_METHODS,
    SolverOptions,
    certify_global,
    multistart,
    oda_convex,
    oda_J,
    riemannian_descent,
    roothaan,
    roothaan_tilde,
    trust_region,
)
from .special import bruteforce_angle_2x2, solve_commuting

log = logging.getLogger("quadgrass")

METHODS = (
    "roothaan",
    "oda",
    "oda-convex",
    "roothaan-tilde",
    "rgd",
    "tr-grassmann",
    "tr-stiefel",
    "commuting",
    "multistart",
)
BENCH_METHODS = ("roothaan", "oda", "oda-convex", "roothaan-tilde", "rgd", "tr-grassmann", "tr-stiefel")
CONVEX_METHODS = ("oda", "oda-convex")

# most specific classes first
EXIT_CODES = (
    (ParseError, 3),
    (DimensionError, 4),
    (NotCommutingError, 6),
    (ExpansionInvalid, 7),
    (InvalidCertificateInput, 8),
    (ContractViolation, 9),
    (ValidationError, 5),
    (NumericalError, 10),
    (OSError, 11),
    (QuadGrassError, 12),
)


class StageError(Exception):
    def __init__(self, stage, cause):
        self.stage, self.cause = stage, cause
        super().__init__(f"{stage}: {cause}")


@contextmanager
def stage(name):
    try:
        yield
    except (QuadGrassError, OSError) as exc:
        raise StageError(name, exc) from exc


def exit_code(exc):
    for cls, code in EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return 1


@dataclass
class RunConfig:
    command: str
    m: int | None = None
    method: str | None = None
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    init: str | None = None
    seed: int = 0
    n_starts: int = 20
    workers: int | None = None
    options: SolverOptions = field(default_factory=SolverOptions)
    m_values: list = field(default_factory=list)
    oracle: str = "multistart"


# assembly


def load_instance(cfg):
    with stage("load"):
        A = io.load_matrix(cfg.inputs["A"])
        if "C" in cfg.inputs:
            second, from_C = io.load_matrix(cfg.inputs["C"]), True
        else:
            second, from_C = io.load_matrix(cfg.inputs["B"]), False
    with stage("assemble"):
        if cfg.m is None:
            raise ValidationError("--m is required")
        return instance_from_AC(A, second, cfg.m) if from_C else build_instance(A, second, cfg.m)


def resolve_init(spec, inst, convex, opts):
    """Starting point from an init flag: spectral-C, uniform, random:<seed>, file:<path>, oda-limit."""
    m = inst.m
    if spec == "spectral-C":
        return GrassmannPoint(aufbau(inst.C, m)[0], m)
    if spec == "uniform":
        if not convex:
            raise ValidationError("init 'uniform' is only valid for oda and oda-convex")
        return ConvexPoint.uniform(inst.M, m)
    if spec.startswith("random:"):
        try:
            seed = int(spec.split(":", 1)[1])
        except ValueError:
            raise ValidationError(f"bad init seed in {spec!r}") from None
        return random_grassmann(inst.M, m, seed)
    if spec.startswith("file:"):
        X = io.load_matrix(spec.split(":", 1)[1])
        if X.shape != (inst.M, inst.M):
            raise DimensionError(f"initial matrix is {X.shape}, expected {(inst.M, inst.M)}")
        if np.linalg.norm(X @ X - X) <= 1e-10:
            return GrassmannPoint(X, m)
        if not convex:
            raise ValidationError("initial matrix is not a projector; manifold methods need one")
        return ConvexPoint(X, m)
    if spec == "oda-limit":
        D = oda_convex(inst, opts=opts).final_point.D
        return GrassmannPoint(aufbau(-D, m)[0], m)
    raise ValidationError(f"unknown init {spec!r}")


def default_init(method):
    return "uniform" if method == "oda-convex" else "spectral-C"


def run_method(inst, method, start, cfg):
    opts = cfg.options
    if method == "roothaan":
        return roothaan(inst, start, opts)
    if method == "oda":
        return oda_J(inst, start, opts)
    if method == "oda-convex":
        return oda_convex(inst, start, opts)
    if method == "roothaan-tilde":
        return roothaan_tilde(inst, start, opts)
    if method == "rgd":
        return riemannian_descent(inst, start, opts)
    if method == "tr-grassmann":
        return trust_region(inst, start, opts)
    if method == "tr-stiefel":
        return trust_region(inst, stiefel_lift(start), opts)
    raise ValidationError(f"unknown method {method!r}")


def _final_matrix(report):
    fp = report.final_point
    return fp.P if isinstance(fp, GrassmannPoint) else fp.D


# commands


def cmd_solve(cfg):
    inst = load_instance(cfg)
    method = cfg.method
    payload = {"command": "solve", "method": method, "m": inst.m, "M": inst.M}
    trace = None
    if method == "commuting":
        with stage("solve"):
            sol = solve_commuting(inst)
        P = sol.P_star.P
        payload.update(
            status="converged",
            degenerate=sol.degenerate,
            c=sol.c,
            J_final=eval_J(inst, P),
            residual=residual(inst, P),
            iterations=0,
        )
    elif method == "multistart":
        local = cfg.inputs.get("local_method", "tr-grassmann")
        with stage("solve"):
            best, all_J = multistart(inst, cfg.n_starts, cfg.seed, local, cfg.options, cfg.workers)
        P, trace = best.final_point.P, best.trace
        payload.update(
            status=best.status,
            local_method=local,
            n_starts=cfg.n_starts,
            J_final=best.objective,
            residual=best.residual,
            iterations=best.iterations,
            J_all_min=min(all_J),
            J_all_max=max(all_J),
        )
    else:
        init = cfg.init or default_init(method)
        with stage("init"):
            start = resolve_init(init, inst, method in CONVEX_METHODS, cfg.options)
        with stage("solve"):
            rep = run_method(inst, method, start, cfg)
        P, trace = _final_matrix(rep), rep.trace
        payload.update(
            status=rep.status,
            init=init,
            J_final=rep.objective,
            residual=rep.residual,
            iterations=rep.iterations,
            warnings=rep.warnings,
        )
        if method == "oda-convex":
            payload["J_final"] = eval_Jtilde(inst, P)
            payload["residual_kind"] = "convex natural residual"
    with stage("write"):
        payload["P_final"] = _write_optional(cfg.outputs.get("P"), P)
        if trace is not None and cfg.outputs.get("trace"):
            io.write_trace(cfg.outputs["trace"], trace)
        _emit(cfg, payload)
    return 0


def cmd_certify(cfg):
    inst = load_instance(cfg)
    with stage("solve"):
        rep = oda_convex(inst, opts=cfg.options)
    with stage("certify"):
        cert = certify_global(inst, rep.final_point)
    D = rep.final_point.D
    payload = {
        "command": "certify",
        "m": inst.m,
        "M": inst.M,
        "oda_status": rep.status,
        "iterations": rep.iterations,
        "J_tilde": eval_Jtilde(inst, D),
        "H_star_spectrum": cert.mu,
        "gap": cert.gap,
        "certified": cert.certified,
        "D_star": D,
    }
    if cert.certified:
        payload["P_star"] = cert.P_star.P
        payload["J_star"] = cert.value(inst)
    with stage("write"):
        _write_optional(cfg.outputs.get("P"), cert.P_star.P if cert.certified else None)
        if cfg.outputs.get("trace"):
            io.write_trace(cfg.outputs["trace"], rep.trace)
        _emit(cfg, payload)
    return 0


def bath_sweep(spec, m_values, opts, n_starts, seed=0, workers=None):
    """Per-m rows (m, gap, idempotency, min_cost, certified) for a bath spec."""
    rows = []
    for m in m_values:
        inst, offset = build_bath_problem(spec, m)
        rep = oda_convex(inst, opts=opts)
        D = rep.final_point.D
        idem = float(np.linalg.norm(D @ D - D))
        try:
            cert = certify_global(inst, D)
            gap, certified = cert.gap, cert.certified
        except InvalidCertificateInput as exc:
            log.warning("m=%d: certificate unavailable (%s)", m, exc)
            w = np.linalg.eigvalsh(rep.extra["H_star"])
            gap, certified, cert = float(w[m] - w[m - 1]), False, None
        candidates = [GrassmannPoint(aufbau(-D, m)[0], m)]
        if cert is not None and cert.certified:
            candidates.append(cert.P_star)
        costs = [cluster_cost(spec, P) for P in candidates]
        for P in candidates:
            costs.append(cluster_cost(spec, trust_region(inst, P, opts).final_point))
        if n_starts:
            best, _ = multistart(inst, n_starts, seed, "tr-grassmann", opts, workers)
            costs.append(cluster_cost(spec, best.final_point))
        rows.append({"m": m, "gap": gap, "idempotency": idem, "min_cost": min(costs), "certified": certified})
    return rows


def cmd_bath(cfg):
    with stage("load"):
        gamma = io.load_matrix(cfg.inputs["gamma"])
        fragment = io.load_fragment(cfg.inputs["fragment"])
    with stage("assemble"):
        spec = bath_spec(gamma, fragment)
        bd = min_bath_dimension(spec)
        m_values = cfg.m_values or list(range(1, spec.M))
    with stage("solve"):
        rows = bath_sweep(spec, m_values, cfg.options, cfg.n_starts, cfg.seed, cfg.workers)
    payload = {
        "command": "bath",
        "L": spec.L,
        "ell": spec.ell,
        "M": spec.M,
        "trace_gamma": spec.diagnostics.trace,
        "idempotency_gamma": spec.diagnostics.idempotency,
        "slater": spec.diagnostics.slater,
        "eigenvalue_range": [spec.diagnostics.min_eigenvalue, spec.diagnostics.max_eigenvalue],
        "offset": spec.offset,
        "min_bath_dimension": bd.min_bath,
        "bound_multiplicity": bd.bound_multiplicity,
        "bound_count": bd.bound_count,
        "sweep": rows,
    }
    with stage("write"):
        out = cfg.outputs.get("dir")
        if out:
            out = Path(out)
            out.mkdir(parents=True, exist_ok=True)
            inst, _ = build_bath_problem(spec, m_values[0])
            io.write_matrix(out / "A.txt", inst.A)
            io.write_matrix(out / "B.txt", inst.B)
            io.write_matrix(out / "C.txt", inst.C)
            with open(out / "sweep.csv", "w") as fh:
                fh.write("m,gap,idempotency,min_cost,certified\n")
                for r in rows:
                    fh.write(f"{r['m']},{r['gap']!r},{r['idempotency']!r},{r['min_cost']!r},{str(r['certified']).lower()}\n")
        _emit(cfg, payload)
    return 0


def cmd_oracle(cfg):
    inst = load_instance(cfg)
    with stage("solve"):
        if cfg.oracle == "angle":
            scan = bruteforce_angle_2x2(inst)
            payload = {
                "command": "oracle",
                "oracle": "angle",
                "theta_star": scan.theta_star,
                "J_star": scan.J_star,
                "P_star": scan.P_star,
                "local_minima": [{"theta": t, "J": j} for t, j in scan.minima],
            }
            P = scan.P_star
        else:
            local = cfg.inputs.get("local_method", "tr-grassmann")
            best, all_J = multistart(inst, cfg.n_starts, cfg.seed, local, cfg.options, cfg.workers)
            P = best.final_point.P
            payload = {
                "command": "oracle",
                "oracle": "multistart",
                "local_method": local,
                "n_starts": cfg.n_starts,
                "J_star": best.objective,
                "residual": best.residual,
                "P_star": P,
                "J_all": all_J,
            }
    with stage("write"):
        _write_optional(cfg.outputs.get("P"), P)
        _emit(cfg, payload)
    return 0


def cmd_bench(cfg):
    inst = load_instance(cfg)
    reports = []
    summary = []
    for method in BENCH_METHODS:
        init = cfg.init or "spectral-C"
        if method == "oda-convex" and cfg.init is None:
            init = "uniform"
        with stage(f"init[{method}]"):
            start = resolve_init(init, inst, method in CONVEX_METHODS, cfg.options)
        with stage(f"solve[{method}]"):
            rep = run_method(inst, method, start, cfg)
        reports.append(rep)
        summary.append(
            {"method": method, "status": rep.status, "iterations": rep.iterations, "J_final": rep.objective, "residual": rep.residual}
        )
    with stage("write"):
        if cfg.outputs.get("trace"):
            io.write_bench(cfg.outputs["trace"], reports)
        _emit(cfg, {"command": "bench", "m": inst.m, "M": inst.M, "runs": summary})
    return 0


COMMANDS = {"solve": cmd_solve, "certify": cmd_certify, "bath": cmd_bath, "oracle": cmd_oracle, "bench": cmd_bench}


def _write_optional(path, X):
    if path and X is not None:
        io.write_matrix(path, X)
        return str(path)
    return None


def _emit(cfg, payload):
    path = cfg.outputs.get("report")
    if path:
        io.write_json(path, payload)
    else:
        import json

        json.dump(payload, sys.stdout, indent=2, default=io._jsonable)
        sys.stdout.write("\n")


# argument parsing


def _m_range(text):
    """'3', '1:20' (inclusive) or '1,3,5'."""
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad m list {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="quadgrass", description="Quadratic optimization on the Grassmann manifold.")
    p.add_argument("--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True)

    def problem_args(sp):
        sp.add_argument("--A", required=True, help="matrix file for A (PSD)")
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--B", help="matrix file for B")
        g.add_argument("--C", help="matrix file for C = B - A^2/2 (instead of B)")
        sp.add_argument("--m", type=int, required=True, help="projector rank")

    def solver_args(sp):
        sp.add_argument("--max-iter", type=int, default=10000)
        sp.add_argument("--tol", type=float, default=1e-10, help="residual tolerance")
        sp.add_argument("--gap-tol", type=float, default=1e-8)
        sp.add_argument("--oda-phase-iter", type=int, default=200)
        sp.add_argument("--no-polish", action="store_true", help="plain ODA on J~ without the accelerated finish")
        sp.add_argument("--seed", type=int, default=0)

    def output_args(sp, matrix=True, trace=True):
        sp.add_argument("--report", help="JSON report path (default: stdout)")
        if trace:
            sp.add_argument("--trace", help="CSV trace path")
        if matrix:
            sp.add_argument("--P-out", dest="P_out", help="write the final matrix here")

    s = sub.add_parser("solve", help="run one solver")
    problem_args(s)
    solver_args(s)
    output_args(s)
    s.add_argument("--method", choices=METHODS, default="tr-grassmann")
    s.add_argument("--init", help="spectral-C | uniform | random:<seed> | file:<path> | oda-limit")
    s.add_argument("--local-method", choices=LOCAL_METHODS, default="tr-grassmann")
    s.add_argument("--n-starts", type=int, default=20)
    s.add_argument("--workers", type=int)

    c = sub.add_parser("certify", help="convexified solve plus global-optimality certificate")
    problem_args(c)
    solver_args(c)
    output_args(c)

    b = sub.add_parser("bath", help="bath problems and per-m sweep for a 1-RDM")
    b.add_argument("--gamma", required=True)
    b.add_argument("--fragment", required=True, help="file with one 0-based index per line")
    b.add_argument("--m-values", type=_m_range, help="e.g. 1:20 or 1,3,5 (default: all)")
    b.add_argument("--n-starts", type=int, default=20, help="multistart runs per m (0 disables)")
    b.add_argument("--workers", type=int)
    b.add_argument("--out-dir", help="directory for A.txt, B.txt, C.txt and sweep.csv")
    solver_args(b)
    output_args(b, matrix=False, trace=False)

    o = sub.add_parser("oracle", help="global minimum by brute force")
    problem_args(o)
    solver_args(o)
    output_args(o, trace=False)
    o.add_argument("--oracle", choices=("multistart", "angle"), default="multistart")
    o.add_argument("--local-method", choices=LOCAL_METHODS, default="tr-grassmann")
    o.add_argument("--n-starts", type=int, default=200)
    o.add_argument("--workers", type=int)

    r = sub.add_parser("bench", help="all methods from one start, shared CSV trace")
    problem_args(r)
    solver_args(r)
    output_args(r, matrix=False)
    r.add_argument("--init", help="start for every method (default spectral-C; oda-convex uses uniform)")
    return p


def config_from_args(args):
    opts = SolverOptions(
        max_iter=args.max_iter,
        residual_tol=args.tol,
        gap_tol=args.gap_tol,
        oda_phase_iter=args.oda_phase_iter,
        polish=not args.no_polish,
        seed=args.seed,
    )
    inputs = {}
    for key in ("A", "B", "C", "gamma", "fragment"):
        if getattr(args, key, None):
            inputs[key] = getattr(args, key)
    if getattr(args, "local_method", None):
        inputs["local_method"] = args.local_method
    outputs = {
        "report": getattr(args, "report", None),
        "trace": getattr(args, "trace", None),
        "P": getattr(args, "P_out", None),
        "dir": getattr(args, "out_dir", None),
    }
    return RunConfig(
        command=args.command,
        m=getattr(args, "m", None),
        method=getattr(args, "method", None),
        inputs=inputs,
        outputs=outputs,
        init=getattr(args, "init", None),
        seed=args.seed,
        n_starts=getattr(args, "n_starts", 20),
        workers=getattr(args, "workers", None),
        options=opts,
        m_values=getattr(args, "m_values", None) or [],
        oracle=getattr(args, "oracle", "multistart"),
    )


def run(cfg):
    """Execute a command; returns the process exit code."""
    try:
        return COMMANDS[cfg.command](cfg)
    except StageError as exc:
        print(f"quadgrass {cfg.command}: {exc.stage} failed: {exc.cause}", file=sys.stderr)
        return exit_code(exc.cause)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except QuadGrassError as exc:
        print(f"quadgrass {args.command}: options failed: {exc}", file=sys.stderr)
        return exit_code(exc)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
