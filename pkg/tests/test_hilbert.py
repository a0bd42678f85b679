import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from twoslit import detector, hilbert

e0 = hilbert.basis(2, 0)
e1 = hilbert.basis(2, 1)


def complex_vectors(dim):
    return st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                    min_size=dim, max_size=dim).map(lambda v: np.array(v, dtype=complex))


def test_inner_basis():
    assert hilbert.inner(e0, e0) == 1
    assert hilbert.inner(e0, e1) == 0
    assert hilbert.inner([1, 0], [0.6, 0.8]) == pytest.approx(0.6, abs=1e-15)


def test_inner_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        hilbert.inner([1, 0], [1, 0, 0])


@given(complex_vectors(3), complex_vectors(3))
def test_inner_conjugate_symmetric(u, v):
    assert hilbert.inner(u, v) == pytest.approx(np.conj(hilbert.inner(v, u)), abs=1e-9)


@given(complex_vectors(5))
def test_inner_self_is_norm_squared(u):
    val = hilbert.inner(u, u)
    assert val.imag == 0
    assert val.real >= 0
    assert val.real == pytest.approx(hilbert.norm(u) ** 2, rel=1e-12, abs=1e-12)


def test_tensor_embedding():
    assert np.array_equal(hilbert.tensor(e0, e0), hilbert.basis(4, 0))
    a, b = 0.3 + 0.1j, -0.7
    assert np.array_equal(hilbert.tensor([a, b], [1, 0]), np.array([a, 0, b, 0]))


@given(complex_vectors(2), complex_vectors(3))
def test_tensor_norm_multiplicative(u, v):
    direct = np.sqrt(np.sum(np.abs(hilbert.tensor(u, v)) ** 2))
    assert direct == pytest.approx(hilbert.norm(u) * hilbert.norm(v), rel=1e-12, abs=1e-12)


@given(complex_vectors(2), complex_vectors(3), complex_vectors(2))
def test_tensor_associative(u, v, w):
    left = hilbert.tensor(hilbert.tensor(u, v), w)
    right = hilbert.tensor(u, hilbert.tensor(v, w))
    assert np.allclose(left, right, rtol=0, atol=1e-12)


def test_tensor_index_layout():
    u = np.array([1, 2, 3])
    v = np.array([5, 7])
    t = hilbert.tensor(u, v)
    for i in range(3):
        for k in range(2):
            assert t[i * 2 + k] == u[i] * v[k]


def test_normalize_records_correction():
    v, corr = hilbert.normalize([3, 4])
    assert np.allclose(v, [0.6, 0.8])
    assert corr == pytest.approx(4.0)
    with pytest.raises(ValueError):
        hilbert.normalize([0, 0])


@pytest.mark.parametrize(
    "c, expected",
    [
        (0.0, [[0.5, 0], [0, 0.5]]),
        (1.0, [[1, 0], [0, 0]]),
        # (|d1><d1| + |d2><d2|) / 2 with d2 = (0.6, 0.8), by hand
        (0.6, [[0.68, 0.24], [0.24, 0.32]]),
    ],
)
def test_partial_trace_detector(c, expected):
    state = detector.correlated_state(detector.make_detector_pair(c))
    rho = hilbert.partial_trace(state, "detector")
    assert np.max(np.abs(rho - np.array(expected))) <= 1e-12
    assert hilbert.is_density(rho)


def test_partial_trace_with_ancilla_factor():
    state = detector.correlated_state(detector.make_detector_pair(0.6), with_ancilla=True)
    rho_d = hilbert.partial_trace(state, "detector")
    rho_a = hilbert.partial_trace(state, "ancilla")
    assert np.allclose(rho_d, [[0.68, 0.24], [0.24, 0.32]], atol=1e-12)
    assert np.allclose(rho_a, [[1, 0], [0, 0]], atol=1e-12)


def test_partial_trace_rejects_unnormalized():
    class Loose:
        chi = np.array([[1.0, 0.0], [0.0, 1.0]])
        factor_names = ("detector",)
        env_dims = (2,)

    with pytest.raises(ValueError, match="normalized"):
        hilbert.partial_trace(Loose())


def test_partial_trace_matrix_matches_kron_factors(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = np.kron(a, b)
    assert np.allclose(hilbert.partial_trace_matrix(rho, (2, 3), [0]), a * np.trace(b))
    assert np.allclose(hilbert.partial_trace_matrix(rho, (2, 3), [1]), b * np.trace(a))


def test_complete_unitary_single_pair():
    u = hilbert.complete_unitary([(e0, e0)])
    assert hilbert.is_unitary(u)
    assert np.allclose(u @ e0, e0, atol=1e-12)


def test_complete_unitary_permutation():
    perm = [2, 0, 1]
    pairs = [(hilbert.basis(3, i), hilbert.basis(3, perm[i])) for i in range(3)]
    u = hilbert.complete_unitary(pairs)
    expected = np.zeros((3, 3))
    for i, j in enumerate(perm):
        expected[j, i] = 1
    assert np.allclose(u, expected, atol=1e-12)


def test_complete_unitary_partial_permutation_free_columns():
    pairs = [(hilbert.basis(4, 0), hilbert.basis(4, 3)), (hilbert.basis(4, 1), hilbert.basis(4, 2))]
    u = hilbert.complete_unitary(pairs)
    assert hilbert.unitarity_residual(u) <= 1e-12
    assert np.allclose(u[:, 0], hilbert.basis(4, 3), atol=1e-12)
    assert np.allclose(u[:, 1], hilbert.basis(4, 2), atol=1e-12)


def test_complete_unitary_uqsd_pairs_half_overlap():
    u = detector.build_uqsd(0.5)
    assert hilbert.unitarity_residual(u.matrix) <= 1e-12
    for x, y in zip(u.inputs(), u.targets()):
        assert np.max(np.abs(u.matrix @ x - y)) <= 1e-12


def test_complete_unitary_rejects_non_isometry():
    with pytest.raises(hilbert.NotIsometricError, match="not isometric"):
        hilbert.complete_unitary([(e0, [2, 0])])
    with pytest.raises(hilbert.NotIsometricError):
        hilbert.complete_unitary([(e0, e0), (e1, e0)])


def test_complete_unitary_random_instances():
    rng = np.random.default_rng(11)
    worst_unitary = 0.0
    worst_image = 0.0
    for trial in range(1000):
        dim = int(rng.integers(2, 9))
        k = int(rng.integers(1, dim + 1))
        w = unitary_group.rvs(dim, random_state=rng)
        a = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
        a /= np.linalg.norm(a, axis=0)
        if trial % 5 == 0 and k > 1:
            # linearly dependent inputs
            a[:, -1] = a[:, 0]
        b = w @ a
        u = hilbert.complete_unitary(list(zip(a.T, b.T)))
        worst_unitary = max(worst_unitary, hilbert.unitarity_residual(u))
        worst_image = max(worst_image, float(np.max(np.abs(u @ a - b))))
    assert worst_unitary <= 1e-12
    assert worst_image <= 1e-12


@settings(max_examples=50)
@given(st.floats(0, 1))
def test_partial_trace_is_density(c):
    state = detector.correlated_state(detector.make_detector_pair(c))
    assert hilbert.is_density(hilbert.partial_trace(state))
