import logging

import numpy as np
import pytest

from quadgrass.errors import InvalidCertificateInput, ValidationError
from quadgrass.instances import random_instance, random_start, three_by_three, two_by_two
from quadgrass.linalg import ConvexPoint, GrassmannPoint, aufbau, random_convex, random_grassmann
from quadgrass.objective import build_instance, eval_J, eval_Jtilde, grad_Gtilde, residual
from quadgrass.solvers import (
    CONVERGED,
    STALLED,
    TWO_CYCLE,
    SolverOptions,
    certify_global,
    damping_coefficient,
    multistart,
    oda_convex,
    oda_J,
    riemannian_descent,
    roothaan,
    roothaan_tilde,
    run_local,
    trust_region,
)
from quadgrass.solvers.common import two_cycle_check
from quadgrass.special import bruteforce_angle_2x2, solve_commuting

TRAP = dict(a=1.0, alpha=1.0, beta=0.0, c=0.1)


def test_options_validation():
    with pytest.raises(ValidationError):
        SolverOptions(max_iter=0)
    with pytest.raises(ValidationError):
        SolverOptions(residual_tol=0.0)


def test_two_cycle_check():
    a, b = np.zeros((2, 2)), np.eye(2)
    assert two_cycle_check([a, b] * 5, 1e-9, 8)
    assert not two_cycle_check([a] * 10, 1e-9, 8)
    assert not two_cycle_check([a, b] * 2, 1e-9, 8)


@pytest.mark.parametrize("start, J", [(np.diag([1.0, 0.0]), 0.1), (np.diag([0.0, 1.0]), -0.1)])
def test_roothaan_two_by_two_fixed_points(start, J):
    inst = two_by_two(**TRAP)
    rep = roothaan(inst, GrassmannPoint(start, 1))
    assert rep.status == CONVERGED and rep.iterations == 0
    np.testing.assert_array_equal(rep.final_point.P, start)
    assert rep.objective == pytest.approx(J, abs=1e-12)


def test_roothaan_commuting_matches_analytic():
    for s in range(5):
        inst = random_instance(5, 2, s, commuting=True)
        rep = roothaan(inst, random_start(inst, s))
        assert rep.status == CONVERGED
        # Roothaan may stop at a local minimizer; starting from the C-projector it cannot
        rep = roothaan(inst, GrassmannPoint(aufbau(inst.C, 2)[0], 2))
        np.testing.assert_allclose(rep.final_point.P, solve_commuting(inst).P_star.P, atol=1e-10)


def test_roothaan_monotone_and_degenerate_warning(caplog):
    for s in range(20):
        inst = random_instance(6, 3, s)
        rep = roothaan(inst, random_start(inst, s))
        assert np.all(np.diff(rep.objectives()) <= 1e-12)
    inst = build_instance(np.zeros((3, 3)), np.eye(3), 1)
    with caplog.at_level(logging.WARNING):
        rep = roothaan(inst, GrassmannPoint(np.diag([1.0, 0.0, 0.0]), 1))
    assert rep.status == CONVERGED
    assert any("degenerate" in w for w in rep.warnings)


def test_oda_from_uniform_descends_and_alpha_is_one():
    for s in range(10):
        inst = random_instance(5, 2, s)
        rep = oda_J(inst, ConvexPoint.uniform(5, 2))
        assert np.all(np.diff(rep.objectives()) <= 1e-12)
        assert all(a <= 1e-12 for a, _ in rep.extra["line_search"])
        assert rep.status == CONVERGED


def test_oda_tail_is_summable():
    inst = random_instance(6, 2, 42)
    rep = oda_J(inst, random_start(inst, 1), SolverOptions(store_iterates=True))
    steps = [np.linalg.norm(b - a) for a, b in zip(rep.iterates, rep.iterates[1:])]
    assert rep.status == CONVERGED
    assert sum(steps[len(steps) // 2 :]) < 1.0


def test_damping_coefficient():
    assert damping_coefficient(1.0, -1.0) == 0.5
    assert damping_coefficient(1.0, -5.0) == 1.0
    assert damping_coefficient(1.0, 1.0) == 0.0
    assert damping_coefficient(0.0, -1.0) == 1.0
    assert damping_coefficient(0.0, 0.0) == 0.0


def test_oda_convex_three_by_three_any_start():
    inst = three_by_three()
    D_ref = np.array([[4, 5, 1], [5, 10, 5], [1, 5, 4]]) / 18
    for D0 in (None, random_convex(3, 1, 0), random_grassmann(3, 1, 1)):
        rep = oda_convex(inst, D0)
        assert rep.status == CONVERGED
        np.testing.assert_allclose(rep.final_point.D, D_ref, atol=1e-6)
        assert rep.extra["aufbau_gap"] < 1e-8


def test_oda_convex_descent_without_polish():
    inst = three_by_three()
    rep = oda_convex(inst, opts=SolverOptions(polish=False, max_iter=500, store_iterates=True))
    assert rep.status != CONVERGED  # plain ODA is sublinear here
    assert np.all(np.diff(rep.objectives()) <= 1e-12)
    for D in rep.iterates:
        ConvexPoint(D, 1)


def test_oda_convex_commuting_lands_on_manifold():
    inst = random_instance(5, 2, 3, commuting=True)
    D = oda_convex(inst).final_point.D
    np.testing.assert_allclose(D, solve_commuting(inst).P_star.P, atol=1e-9)


def test_roothaan_tilde_cases():
    rep = roothaan_tilde(two_by_two(alpha=1.0, c=0.0, beta=0.1), random_grassmann(2, 1, 3))
    assert rep.status == TWO_CYCLE
    P1, P2 = rep.extra["cycle"]
    assert np.linalg.norm(P1 - P2) > 0.5
    inst = random_instance(5, 2, 8, commuting=True)
    rep = roothaan_tilde(inst, random_start(inst, 0))
    assert rep.status == CONVERGED
    np.testing.assert_allclose(rep.final_point.P, solve_commuting(inst).P_star.P, atol=1e-10)
    # beta = 0: from a start commuting with A the map only sees C
    inst = two_by_two(a=1.0, alpha=1.0, beta=0.0, c=0.1)
    rep = roothaan_tilde(inst, GrassmannPoint(np.diag([1.0, 0.0]), 1))
    assert rep.status == CONVERGED
    assert np.linalg.norm(rep.final_point.P - np.diag([0.0, 1.0])) < 1e-12


def test_riemannian_descent():
    inst = random_instance(5, 2, 1, commuting=True)
    rep = riemannian_descent(inst, solve_commuting(inst).P_star)
    assert rep.iterations == 0
    inst = two_by_two(**TRAP)
    near = GrassmannPoint(aufbau(np.array([[0.0, 0.05], [0.05, 1.0]]), 1)[0], 1)
    rep = riemannian_descent(inst, near)
    assert rep.status == CONVERGED
    np.testing.assert_allclose(rep.final_point.P, np.diag([1.0, 0.0]), atol=1e-9)
    for s in range(5):
        inst = random_instance(6, 2, s)
        P0 = random_start(inst, s)
        rep = riemannian_descent(inst, P0)
        assert rep.status == CONVERGED and rep.residual <= 1e-10
        assert rep.objective <= eval_J(inst, P0)
        assert np.all(np.diff(rep.objectives()) <= 1e-12)


def test_trust_region_A_zero_is_eigenprojector():
    for M in (3, 6, 10):
        rng = np.random.default_rng(M)
        Bm = rng.standard_normal((M, M))
        inst = build_instance(np.zeros((M, M)), Bm + Bm.T, M // 2)
        rep = trust_region(inst, random_grassmann(M, M // 2, M))
        assert rep.status == CONVERGED and rep.iterations <= 15
        np.testing.assert_allclose(rep.final_point.P, aufbau(inst.B, M // 2)[0], atol=1e-9)


def test_trust_region_formulations_agree():
    for s in range(10):
        inst = random_instance(6, 3, s)
        P0 = random_start(inst, s)
        a = run_local(inst, P0, "tr-grassmann")
        b = run_local(inst, P0, "tr-stiefel")
        assert a.status == b.status == CONVERGED
        best_a, _ = multistart(inst, 20, seed=s)
        best_b, _ = multistart(inst, 20, seed=s, method="tr-stiefel")
        assert best_a.objective == pytest.approx(best_b.objective, abs=1e-9)


def test_certify_examples():
    inst = three_by_three()
    cert = certify_global(inst, oda_convex(inst).final_point)
    assert not cert.certified and cert.gap < 1e-8 and cert.P_star is None
    inst = random_instance(5, 2, 6, commuting=True)
    cert = certify_global(inst, oda_convex(inst).final_point)
    assert cert.certified
    np.testing.assert_allclose(cert.P_star.P, solve_commuting(inst).P_star.P, atol=1e-9)


def test_certify_rejects_non_optimal_input():
    inst = random_instance(4, 2, 0)
    with pytest.raises(InvalidCertificateInput):
        certify_global(inst, ConvexPoint.uniform(4, 2))
    with pytest.raises(InvalidCertificateInput):
        certify_global(inst, np.eye(4))


def test_H_star_is_start_independent():
    inst = random_instance(5, 2, 12)
    H = [oda_convex(inst, D0).extra["H_star"] for D0 in (None, random_convex(5, 2, 3))]
    np.testing.assert_allclose(H[0], H[1], atol=1e-8)


def test_multistart_two_by_two_distribution():
    inst = two_by_two(**TRAP)
    best, all_J = multistart(inst, 200, seed=1)
    assert best.objective == pytest.approx(-0.1, abs=1e-9)
    scan = bruteforce_angle_2x2(inst)
    levels = [J for _, J in scan.minima]
    near = sum(min(abs(J - L) for L in levels) <= 1e-9 for J in all_J)
    assert near >= 0.99 * len(all_J)


def test_multistart_certified_and_deterministic():
    inst = random_instance(5, 2, 21)
    cert = certify_global(inst, oda_convex(inst).final_point)
    assert cert.certified
    best, all_J = multistart(inst, 30, seed=5)
    assert best.objective == pytest.approx(cert.value(inst), abs=1e-9)
    assert multistart(inst, 30, seed=5)[1] == all_J
    assert multistart(inst, 30, seed=5, workers=2)[1] == all_J


def test_multistart_single_start_equals_single_run():
    from quadgrass.solvers.multistart import start_seeds

    inst = random_instance(4, 1, 2)
    best, _ = multistart(inst, 1, seed=9)
    single = trust_region(inst, random_grassmann(4, 1, start_seeds(9, 1)[0]))
    np.testing.assert_array_equal(best.final_point.P, single.final_point.P)


def test_stalled_status_reported():
    inst = random_instance(4, 2, 0)
    opts = SolverOptions(max_backtracks=1, armijo_c1=0.999)
    rep = riemannian_descent(inst, random_start(inst, 0), opts)
    assert rep.status in (STALLED, CONVERGED)
