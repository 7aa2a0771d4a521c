import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadgrass.dmet import (
    bath_projector,
    bath_spec,
    build_bath_problem,
    cluster_cost,
    cluster_cost_direct,
    eigenvalue_clusters,
    min_bath_dimension,
    mixed_rdm_with_known_X,
    slater_bath_qr,
    slater_rdm,
    validate_rdm,
)
from quadgrass.errors import DimensionError, ValidationError
from quadgrass.linalg import random_grassmann
from quadgrass.objective import eval_J
from quadgrass.solvers import multistart


def test_validate_projector_is_slater():
    d = validate_rdm(slater_rdm(6, 3, 0), expected_trace=3)
    assert d.slater
    assert d.idempotency <= 1e-12
    assert d.trace == pytest.approx(3.0)


def test_validate_half_identity():
    d = validate_rdm(0.5 * np.eye(4))
    assert d.trace == pytest.approx(2.0)
    assert not d.slater
    assert d.idempotency == pytest.approx(0.5)


def test_validate_rejects_pauli_violation():
    with pytest.raises(ValidationError, match="0 <= gamma <= I"):
        validate_rdm(np.diag([1.2, 0.5, 0.0]))
    with pytest.raises(ValidationError):
        validate_rdm(np.diag([-1e-6, 0.5, 0.0]))


def test_validate_rejects_wrong_trace_and_shape():
    with pytest.raises(ValidationError, match="Tr"):
        validate_rdm(0.5 * np.eye(4), expected_trace=3)
    with pytest.raises(DimensionError):
        validate_rdm(np.zeros((2, 3)))


def test_bath_spec_checks_fragment():
    g = slater_rdm(5, 2, 1)
    with pytest.raises(ValidationError):
        bath_spec(g, [0, 0])
    with pytest.raises(ValidationError):
        bath_spec(g, [5])
    with pytest.raises(ValidationError):
        bath_spec(g, [0, 1, 2, 3])
    spec = bath_spec(g, [3, 1])
    assert list(spec.fragment) == [1, 3]
    assert list(spec.environment) == [0, 2, 4]
    assert spec.gamma_ef.shape == (3, 2)


def test_block_diagonal_gamma_gives_zero_C():
    g = np.zeros((5, 5))
    g[:2, :2] = slater_rdm(2, 1, 0)
    g[2:, 2:] = 0.5 * slater_rdm(3, 2, 1)
    spec = bath_spec(g, [0, 1])
    inst, offset = build_bath_problem(spec, 1)
    np.testing.assert_allclose(inst.C, 0.0, atol=1e-15)
    np.testing.assert_allclose(inst.B, 0.5 * spec.gamma_ext @ spec.gamma_ext, atol=1e-15)
    assert offset == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_bath_instance_structure(seed):
    spec = bath_spec(slater_rdm(8, 4, seed), [0, 1])
    inst, offset = build_bath_problem(spec, 2)
    assert offset == pytest.approx(np.linalg.norm(spec.gamma_ef) ** 2)
    assert offset >= 0.0
    assert np.linalg.eigvalsh(inst.C).max() <= 1e-12
    assert np.linalg.eigvalsh(inst.A).min() >= -1e-12


def test_bath_problem_m_range():
    spec = bath_spec(slater_rdm(6, 3, 0), [0])
    for m in (0, spec.M):
        with pytest.raises(ValidationError):
            build_bath_problem(spec, m)


@pytest.mark.parametrize("seed", range(6))
def test_cluster_cost_two_forms_agree(seed):
    L, ell, m = 9, 2, 3
    g, frag, _ = mixed_rdm_with_known_X(L, ell, [2, 1], [0.4, 0.9], seed)
    spec = bath_spec(g, frag)
    inst, offset = build_bath_problem(spec, m)
    P = random_grassmann(spec.M, m, seed)
    direct = cluster_cost_direct(spec, P.P)
    assert cluster_cost(spec, P) == pytest.approx(direct, abs=1e-12)
    assert direct == pytest.approx(2 * eval_J(inst, P) + offset, abs=1e-12)
    assert direct >= 0.0


def test_cluster_cost_shape_check():
    spec = bath_spec(slater_rdm(6, 3, 0), [0])
    with pytest.raises(DimensionError):
        cluster_cost_direct(spec, np.eye(4))


def test_eigenvalue_clusters():
    groups = eigenvalue_clusters(np.array([0.0, 1e-10, 0.5, 0.5, 1.0]), 1e-8)
    assert [list(g) for g in groups] == [[0, 1], [2, 3], [4]]


@pytest.mark.parametrize("seed", range(5))
def test_slater_min_bath_equals_fragment_size(seed):
    L, ell = 10, 2
    spec = bath_spec(slater_rdm(L, 5, seed), list(range(ell)))
    bd = min_bath_dimension(spec)
    assert bd.min_bath == ell
    assert bd.min_bath <= bd.bound_multiplicity <= bd.bound_count


def test_decoupled_fragment_needs_no_bath():
    g = np.zeros((5, 5))
    g[:2, :2] = slater_rdm(2, 1, 0)
    g[2:, 2:] = slater_rdm(3, 1, 1)
    bd = min_bath_dimension(bath_spec(g, [0, 1]))
    assert bd.min_bath == 0


@pytest.mark.parametrize("dims, occ", [([2, 1], [0.3, 0.8]), ([1, 1, 1], [0.2, 0.5, 0.9]), ([2], [0.6])])
def test_mixed_min_bath_matches_construction(dims, occ):
    g, frag, k = mixed_rdm_with_known_X(12, 2, dims, occ, seed=0)
    bd = min_bath_dimension(bath_spec(g, frag))
    assert bd.min_bath == k
    assert bd.dims == dims
    assert bd.min_bath <= bd.bound_multiplicity <= bd.bound_count


def test_four_site_slater_chain():
    # half-filled 4-site tight-binding chain, fragment = first site
    h = -(np.eye(4, k=1) + np.eye(4, k=-1))
    _, V = np.linalg.eigh(h)
    gamma = V[:, :2] @ V[:, :2].T
    spec = bath_spec(gamma, [0], expected_trace=2)
    basis = slater_bath_qr(spec)
    assert basis.shape == (4, 2)
    np.testing.assert_allclose(basis.T @ basis, np.eye(2), atol=1e-14)
    P = bath_projector(spec, basis)
    assert cluster_cost(spec, P) == pytest.approx(0.0, abs=1e-14)
    # the optimizer reaches the same zero cost for m = 1 and any larger m
    for m in (1, 2):
        inst, offset = build_bath_problem(spec, m)
        best, _ = multistart(inst, 10, seed=0)
        assert 2 * best.objective + offset == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_slater_qr_basis_disentangles(seed):
    spec = bath_spec(slater_rdm(10, 4, seed), [0, 1, 2])
    basis = slater_bath_qr(spec)
    Pi = basis @ basis.T
    np.testing.assert_allclose(Pi @ spec.gamma @ (np.eye(10) - Pi), 0.0, atol=1e-12)
    assert basis.shape[1] - spec.ell == min_bath_dimension(spec).min_bath


def test_slater_qr_rejects_mixed_state():
    spec = bath_spec(0.5 * np.eye(5), [0])
    with pytest.raises(ValidationError, match="idempotent"):
        slater_bath_qr(spec)


@given(seed=st.integers(0, 10_000), m=st.integers(1, 5))
def test_cluster_cost_nonnegative(seed, m):
    g, frag, _ = mixed_rdm_with_known_X(8, 2, [1, 1], [0.3, 0.7], seed % 50, min_coupling=0.1)
    spec = bath_spec(g, frag)
    P = random_grassmann(spec.M, m, seed)
    assert cluster_cost(spec, P) >= -1e-14
