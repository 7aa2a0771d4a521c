import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadgrass.errors import DimensionError, ValidationError
from quadgrass.instances import random_instance, three_by_three, two_by_two
from quadgrass.linalg import random_convex, random_grassmann, symmetrize
from quadgrass.objective import (
    build_instance,
    convex_residual,
    eval_J,
    eval_Jtilde,
    grad_G,
    grad_Gtilde,
    instance_from_AC,
    residual,
)

D_STAR = np.array([[4, 5, 1], [5, 10, 5], [1, 5, 4]]) / 18


def test_A_zero_gives_C_equal_B():
    inst = build_instance(np.zeros((2, 2)), np.diag([1.0, 2.0]), 1)
    np.testing.assert_array_equal(inst.C, np.diag([1.0, 2.0]))


def test_instance_from_AC_keeps_C():
    C = np.array([[0.1, 0.3], [0.3, -0.1]])
    inst = instance_from_AC(np.diag([1.0, 2.0]), C, 1)
    np.testing.assert_allclose(inst.C, C, atol=1e-15)
    np.testing.assert_allclose(inst.B - 0.5 * inst.A @ inst.A, C, atol=1e-15)


def test_non_psd_A_names_eigenvalue():
    with pytest.raises(ValidationError, match="-1.0"):
        build_instance(np.diag([1.0, -0.1]), np.eye(2), 1)


def test_shape_and_rank_checks():
    with pytest.raises(DimensionError):
        build_instance(np.eye(2), np.eye(3), 1)
    with pytest.raises(ValidationError):
        build_instance(np.eye(3), np.eye(3), 3)


def test_two_by_two_values():
    inst = two_by_two(a=1.0, alpha=1.0, beta=0.0, c=0.1)
    assert eval_J(inst, np.diag([1.0, 0.0])) == pytest.approx(0.1, abs=1e-14)
    assert eval_J(inst, np.diag([0.0, 1.0])) == pytest.approx(-0.1, abs=1e-14)
    assert residual(inst, np.diag([1.0, 0.0])) == 0.0


def test_A_zero_J_is_linear():
    rng = np.random.default_rng(0)
    for s in range(20):
        B = symmetrize(rng.standard_normal((4, 4)))
        P = random_grassmann(4, 2, s)
        inst = build_instance(np.zeros((4, 4)), B, 2)
        assert eval_J(inst, P) == pytest.approx(np.trace(B @ P.P), abs=1e-13)


@given(st.integers(0, 10_000))
def test_J_equals_Jtilde_on_manifold(seed):
    M = 2 + seed % 6
    m = 1 + seed % (M - 1)
    inst = random_instance(M, m, seed)
    P = random_grassmann(M, m, seed + 1)
    J = eval_J(inst, P)
    assert abs(J - eval_Jtilde(inst, P)) <= 1e-11 * (1 + abs(J))


def test_Jtilde_at_uniform_point():
    inst = random_instance(5, 2, 3)
    assert eval_Jtilde(inst, np.eye(5) * 0.4) == pytest.approx(0.4 * np.trace(inst.C), abs=1e-13)


def test_three_by_three_reference_minimizer():
    inst = three_by_three()
    H = grad_Gtilde(inst, D_STAR)
    np.testing.assert_allclose(H, np.array([[0, -1, 1], [-1, 0, -1], [1, -1, 0]]) / 9, atol=1e-14)
    assert convex_residual(inst, D_STAR) < 1e-14


def _projected_gradient_oracle(inst, iters):
    from quadgrass.linalg import project_convex_hull

    D = np.eye(inst.M) * inst.m / inst.M
    step = 1.0 / inst.lipschitz_tilde
    for _ in range(iters):
        D = project_convex_hull(D - step * grad_Gtilde(inst, D), inst.m)
    return D


def test_Jtilde_reference_value_by_projected_gradient():
    inst = three_by_three()
    D = _projected_gradient_oracle(inst, 20_000)
    assert eval_Jtilde(inst, D_STAR) == pytest.approx(eval_Jtilde(inst, D), abs=1e-9)


def _fd(f, X, Y, h):
    return (f(X + h * Y) - f(X - h * Y)) / (2 * h)


def test_gradients_match_central_differences():
    inst = random_instance(5, 2, 11)
    rng = np.random.default_rng(4)
    P = random_grassmann(5, 2, 1).P
    D = random_convex(5, 2, 2).D
    for _ in range(5):
        X = symmetrize(rng.standard_normal((5, 5)))
        g = np.vdot(grad_G(inst, P), X)
        assert _fd(lambda Z: eval_J(inst, Z), P, X, 1e-5) == pytest.approx(g, rel=1e-8)
        gt = np.vdot(grad_Gtilde(inst, D), X)
        assert _fd(lambda Z: eval_Jtilde(inst, Z), D, X, 1e-5) == pytest.approx(gt, rel=1e-8)


def test_grad_G_trivial_cases():
    inst = random_instance(4, 1, 2)
    np.testing.assert_allclose(grad_G(inst, np.zeros((4, 4))), inst.B)
    z = build_instance(np.zeros((4, 4)), inst.B, 1)
    np.testing.assert_allclose(grad_G(z, random_grassmann(4, 1, 0)), inst.B)


def test_grad_Gtilde_entrywise_rule():
    inst = random_instance(5, 2, 9)
    a, U = np.linalg.eigh(inst.A)
    D = random_convex(5, 2, 1).D
    Hu = U.T @ grad_Gtilde(inst, D) @ U
    Cu, Du = U.T @ inst.C @ U, U.T @ D @ U
    np.testing.assert_allclose(Hu, Cu + 0.5 * (a[:, None] - a[None, :]) ** 2 * Du, atol=1e-12)


def test_grad_Gtilde_commuting_D():
    inst = random_instance(4, 1, 5)
    np.testing.assert_allclose(grad_Gtilde(inst, 0.25 * np.eye(4)), inst.C, atol=1e-14)


@given(st.integers(0, 10_000), st.floats(0, 1))
def test_Jtilde_is_convex(seed, t):
    inst = random_instance(4, 2, seed)
    D1, D2 = random_convex(4, 2, seed).D, random_convex(4, 2, seed + 1).D
    lhs = eval_Jtilde(inst, t * D1 + (1 - t) * D2)
    assert lhs <= t * eval_Jtilde(inst, D1) + (1 - t) * eval_Jtilde(inst, D2) + 1e-12


def test_residual_positive_at_random_point():
    inst = random_instance(5, 2, 0)
    assert residual(inst, random_grassmann(5, 2, 0)) > 1e-3
