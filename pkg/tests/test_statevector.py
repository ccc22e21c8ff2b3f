import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_circuit, random_state
from wvlab.errors import DimensionMismatch, InvalidProbabilities
from wvlab.gates import controlled_ry, hadamard, ry, rz
from wvlab.statevector import (
    Circuit,
    ShotCounts,
    StateVector,
    apply_gate,
    circuit_unitary,
    outcome_probabilities,
    run_circuit,
    sample_shots,
)


def test_hadamard_on_pointer_of_00():
    out = apply_gate(StateVector.zero(2), hadamard("b"))
    expected = np.array([1, 1, 0, 0]) / np.sqrt(2)
    assert np.allclose(out.amplitudes, expected, atol=1e-15)


@given(st.floats(-10, 10), st.floats(0, 2 * np.pi))
def test_controlled_ry_inert_when_control_in_zero(theta, mix):
    # |x_a>|0_b> for arbitrary x_a: control b stays |0>, nothing happens
    x = np.array([np.cos(mix), np.sin(mix)], dtype=complex)
    state = StateVector(np.kron(x, [1.0, 0.0]))
    out = apply_gate(state, controlled_ry(theta, control="b", target="a"))
    assert np.allclose(out.amplitudes, state.amplitudes, atol=1e-12)


def test_ry_half_pi_on_single_qubit():
    out = apply_gate(StateVector.zero(1), ry(np.pi / 2, "a"))
    assert np.allclose(out.amplitudes, [np.cos(np.pi / 4), np.sin(np.pi / 4)], atol=1e-15)


def test_empty_circuit_is_identity():
    state = StateVector.from_bits("10")
    assert np.array_equal(run_circuit(Circuit((), 2), state).amplitudes, state.amplitudes)


def test_preparation_circuit_gives_product_state():
    alpha = 0.7
    circuit = Circuit((ry(alpha, "a"), hadamard("b")))
    out = run_circuit(circuit, StateVector.zero(2))
    expected = np.kron(
        [np.cos(alpha / 2), np.sin(alpha / 2)], np.array([1.0, 1.0]) / np.sqrt(2)
    )
    assert np.allclose(out.amplitudes, expected, atol=1e-14)


def test_circuit_then_adjoint_restores_input():
    rng = np.random.default_rng(7)
    for _ in range(20):
        circuit = random_circuit(rng, int(rng.integers(1, 15)))
        initial = StateVector(random_state(rng, 4))
        back = run_circuit(circuit.adjoint(), run_circuit(circuit, initial))
        assert back.fidelity(initial) > 1 - 1e-10


def test_circuit_unitary_empty_is_identity():
    assert np.array_equal(circuit_unitary(Circuit((), 2)), np.eye(4))


def test_circuit_unitary_inverse_rotations_cancel():
    phi = 1.234
    u = circuit_unitary(Circuit((rz(phi, "a"), rz(-phi, "a"))))
    assert np.allclose(u, np.eye(4), atol=1e-15)


def test_circuit_unitary_is_unitary_random():
    rng = np.random.default_rng(11)
    for _ in range(20):
        u = circuit_unitary(random_circuit(rng, 20))
        assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-10


def test_run_circuit_matches_circuit_unitary():
    rng = np.random.default_rng(13)
    for _ in range(20):
        circuit = random_circuit(rng, int(rng.integers(0, 20)))
        initial = StateVector(random_state(rng, 4))
        via_run = run_circuit(circuit, initial).amplitudes
        via_matrix = circuit_unitary(circuit) @ initial.amplitudes
        assert np.max(np.abs(via_run - via_matrix)) < 1e-10


def test_norm_preserved_by_gates():
    rng = np.random.default_rng(17)
    for _ in range(50):
        circuit = random_circuit(rng, 1)
        out = run_circuit(circuit, StateVector(random_state(rng, 4)))
        assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1.0) < 1e-12


def test_outcome_probabilities_basis_state():
    probs = outcome_probabilities(StateVector.from_bits("00"))
    assert np.array_equal(probs, [1, 0, 0, 0])


def test_outcome_probabilities_superposition():
    state = StateVector(np.array([1, 1, 0, 0]) / np.sqrt(2))
    assert np.allclose(outcome_probabilities(state), [0.5, 0.5, 0, 0], atol=1e-15)


def test_state_vector_validation():
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0]))  # not normalized
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 0, 0]))  # dimension 3


def test_run_circuit_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        run_circuit(Circuit((), 2), StateVector.zero(1))
    with pytest.raises(DimensionMismatch):
        apply_gate(StateVector.zero(1), hadamard("b"))


def test_sample_shots_deterministic_distribution():
    counts = sample_shots([1.0, 0.0], 2000, seed=42)
    assert counts.counts == (2000, 0)
    assert counts.shots == 2000


def test_sample_shots_seed_reproducible():
    probs = [0.3, 0.2, 0.4, 0.1]
    a = sample_shots(probs, 2000, seed=123)
    b = sample_shots(probs, 2000, seed=123)
    assert a == b
    c = sample_shots(probs, 2000, seed=124)
    assert a != c


def test_sample_shots_binomial_five_sigma():
    # uniform over 4 outcomes: each count within 5 sigma of the mean
    shots = 10**6
    counts = sample_shots([0.25] * 4, shots, seed=2718)
    sigma = np.sqrt(shots * 0.25 * 0.75)
    for c in counts.counts:
        assert abs(c - shots * 0.25) < 5 * sigma
    assert sum(counts.counts) == shots


def test_sample_shots_rejects_bad_probabilities():
    with pytest.raises(InvalidProbabilities):
        sample_shots([0.5, 0.6], 10, seed=0)
    with pytest.raises(InvalidProbabilities):
        sample_shots([0.9, -0.1, 0.2], 10, seed=0)
    with pytest.raises(ValueError):
        sample_shots([1.0], 0, seed=0)


def test_shot_counts_validation():
    with pytest.raises(ValueError):
        ShotCounts((1, 2), shots=4)
    with pytest.raises(ValueError):
        ShotCounts((-1, 5), shots=4)
