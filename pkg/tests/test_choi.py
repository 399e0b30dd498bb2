import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brickqec.brickwork import BlockLayout, BrickworkSpec, circuit_tableau, sample_gate_indices, task_rng
from brickqec.choi import (
    alpha_beta_prime,
    circuit_unitary,
    clifford_twirl_empirical,
    clifford_unitaries,
    depolarizing,
    depolarizing_for_f,
    environment_state,
    haar_input_coeffs,
    haar_second_moment_coeffs,
    pauli_channel,
    pauli_complementary_channel,
    reduced_swap_operator,
    second_moment_sample,
    single_qubit_identities,
    swap_operator,
    tableau_to_dense,
    tilde_channel,
)
from brickqec.pauli import PauliOperator
from brickqec.statmech import AQECWeighting, ParameterError, partition_function


def probabilities():
    return st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4).map(lambda v: np.array(v) / sum(v))


def test_swap_squares_to_identity():
    s = swap_operator(3)
    assert np.array_equal(s @ s, np.eye(9))
    a, b = np.arange(3.0), np.arange(3.0, 6.0)
    assert np.allclose(s @ np.kron(a, b), np.kron(b, a))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_haar_coefficients_of_basis_operators(d):
    assert np.allclose(haar_second_moment_coeffs(np.eye(d * d)), (1, 0))
    assert np.allclose(haar_second_moment_coeffs(swap_operator(d)), (0, 1))


def test_twirl_of_product_state():
    ket = np.zeros(4)
    ket[0] = 1
    alpha, beta = haar_second_moment_coeffs(np.outer(ket, ket))
    assert alpha == pytest.approx(1 / 6) and beta == pytest.approx(1 / 6)


def test_haar_coefficient_shape_checks():
    with pytest.raises(ParameterError):
        haar_second_moment_coeffs(np.eye(5))


def test_tableau_to_dense_reproduces_conjugation():
    rng = np.random.default_rng(12)
    spec = BrickworkSpec(BlockLayout(1, 3, 1 * 2), 3)  # n = 6 exceeds the dense guard
    with pytest.raises(ParameterError):
        circuit_unitary(spec, sample_gate_indices(spec, rng))

    spec = BrickworkSpec(BlockLayout(1, 2, 2), 3)
    idx = sample_gate_indices(spec, rng)
    t = circuit_tableau(spec, idx)
    for u in (circuit_unitary(spec, idx), tableau_to_dense(t)):
        assert np.allclose(u.conj().T @ u, np.eye(16))
        for _ in range(10):
            p = PauliOperator(4, int(rng.integers(16)), int(rng.integers(16)))
            assert np.allclose(u @ p.to_matrix() @ u.conj().T, t.conjugate(p).to_matrix())


def test_circuit_unitary_and_tableau_agree_up_to_phase():
    spec = BrickworkSpec(BlockLayout(1, 2, 2), 2)
    idx = sample_gate_indices(spec, np.random.default_rng(4))
    a = circuit_unitary(spec, idx)
    b = tableau_to_dense(circuit_tableau(spec, idx))
    overlap = np.trace(a.conj().T @ b) / 16
    assert abs(overlap) == pytest.approx(1.0)


def test_single_qubit_clifford_unitaries_distinct():
    us = clifford_unitaries(1)
    assert us.shape == (24, 2, 2)
    overlaps = np.abs(np.einsum("iab,jab->ij", us.conj(), us)) / 2
    assert np.allclose(np.sort(overlaps, axis=1)[:, -2] < 1 - 1e-9, True)


@pytest.mark.parametrize("d", [2, 4])
def test_empirical_twirl_matches_haar(d):
    rng = np.random.default_rng(d)
    a = rng.normal(size=(d * d, d * d)) + 1j * rng.normal(size=(d * d, d * d))
    op = a + a.conj().T
    est = clifford_twirl_empirical(op, d, 20000, rng)
    alpha, beta = haar_second_moment_coeffs(op)
    exact = alpha * np.eye(d * d) + beta * swap_operator(d)
    assert np.linalg.norm(est.mean - exact) <= 5 * est.error_scale() + 1e-12


def test_twirl_rejects_other_dimensions():
    with pytest.raises(ParameterError):
        clifford_twirl_empirical(np.eye(9), 3, 10, np.random.default_rng(0))


@settings(max_examples=25, deadline=None)
@given(probabilities())
def test_channels_are_trace_preserving(p):
    assert pauli_channel(p).completeness_error() < 1e-12
    assert pauli_complementary_channel(p).completeness_error() < 1e-12
    assert np.allclose(environment_state(p), np.diag(p))


def test_two_qubit_channel_shapes():
    p = depolarizing(0.1)
    comp = pauli_complementary_channel(p, 2)
    assert (comp.d_in, comp.d_out) == (4, 16)
    assert comp.completeness_error() < 1e-12
    assert np.allclose(environment_state(p, 2), np.kron(environment_state(p), environment_state(p)))


@settings(max_examples=25, deadline=None)
@given(probabilities())
def test_single_qubit_identities(p):
    ids = single_qubit_identities(p)
    alpha, beta = alpha_beta_prime(ids.lam)
    assert ids.alpha_prime == pytest.approx(alpha, abs=1e-10)
    assert ids.beta_prime == pytest.approx(beta, abs=1e-10)
    assert ids.trace == pytest.approx(4.0, abs=1e-10)
    assert ids.trace_with_swap == pytest.approx(4.0 * ids.lam, abs=1e-10)


def test_tilde_channel_drops_absent_paulis():
    t = tilde_channel([0.5, 0.5, 0.0, 0.0])
    assert np.allclose(t.kraus[:, 2:, :], 0)


@pytest.mark.parametrize("f", [0.0, 0.3, 1.0, 1.7, 2.0])
def test_depolarizing_for_f(f):
    assert depolarizing_for_f(f).f == pytest.approx(f, abs=1e-12)


def test_depolarizing_for_f_one():
    assert depolarizing_for_f(1.0).p_i == pytest.approx(0.9330127, abs=1e-7)
    with pytest.raises(ParameterError):
        depolarizing_for_f(2.5)


@pytest.mark.parametrize("layout", [(1, 2, 1), (1, 2, 2), (2, 4, 1)])
def test_input_state_twirl_coefficients(layout):
    layout = BlockLayout(*layout)
    alpha, beta = haar_second_moment_coeffs(reduced_swap_operator(layout))
    expected = haar_input_coeffs(layout.n, layout.k)
    assert np.allclose([alpha, beta], expected, atol=1e-14)


def test_noiseless_samples_are_exactly_one():
    spec = BrickworkSpec(BlockLayout(1, 2, 2), 2)
    est = second_moment_sample(spec, (1.0, 0.0, 0.0, 0.0), samples=5, seed=3)
    assert est.mean == pytest.approx(1.0, abs=1e-12)


def test_second_moment_is_independent_of_workers():
    spec = BrickworkSpec(BlockLayout(1, 2, 2), 2)
    p = depolarizing_for_f(1.0)
    a = second_moment_sample(spec, p, samples=12, seed=8, workers=1)
    b = second_moment_sample(spec, p, samples=12, seed=8, workers=2)
    assert a == b


def test_second_moment_argument_checks():
    p = depolarizing(0.1)
    with pytest.raises(ParameterError):
        second_moment_sample(BrickworkSpec(BlockLayout(1, 2, 2), 0), p, 4, 1)
    with pytest.raises(ParameterError):
        second_moment_sample(BrickworkSpec(BlockLayout(1, 2, 2), 1), p, 0, 1)


@pytest.mark.slow
def test_second_moment_matches_partition_function():
    spec = BrickworkSpec(BlockLayout(1, 2, 2), 1)
    est = second_moment_sample(spec, depolarizing_for_f(1.0), samples=3000, seed=21)
    z = partition_function(spec, AQECWeighting(1)).value
    assert abs(est.mean - z) <= 4 * est.stderr + 1e-10
