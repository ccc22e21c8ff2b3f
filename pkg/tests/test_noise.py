import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_circuit
from wvlab.circuits import ExperimentSetting, PointerBasis, build_measurement_circuit
from wvlab.errors import InvalidNoiseModel
from wvlab.estimator import IntensitySet, invert_weak_value, theoretical_weak_value
from wvlab.gates import hadamard, rz
from wvlab.noise import (
    DensityMatrix,
    KrausChannel,
    NoiseModel,
    apply_channel,
    channel_for_gate,
    idle_readout_channel,
    noisy_run,
    paper_noise_model,
    readout_probabilities,
)
from wvlab.statevector import Circuit, StateVector, outcome_probabilities, run_circuit

MIXED_1Q = DensityMatrix(np.eye(2) / 2)


def test_noiseless_channel_is_just_the_unitary():
    ch = channel_for_gate(hadamard("b"), NoiseModel.zero())
    assert len(ch.operators) == 1
    h = 1 / np.sqrt(2) * np.array([[1, 1], [1, -1]])
    assert np.allclose(ch.operators[0], np.kron(np.eye(2), h), atol=1e-15)


def test_full_amplitude_damping_relaxes_to_ground():
    nm = dataclasses.replace(
        NoiseModel.zero(), t1_us=(1e-3, 1e-3), t2_us=(2e-3, 2e-3), dur_1q_ns=1e9
    )
    ch = channel_for_gate(rz(0.0, "a"), nm, n_qubits=1)
    rho = apply_channel(DensityMatrix(np.diag([0.0, 1.0])), ch)
    assert np.allclose(rho.matrix, np.diag([1.0, 0.0]), atol=1e-12)


def test_depolarizing_fixed_point_is_maximally_mixed():
    nm = dataclasses.replace(NoiseModel.zero(), depol_1q=0.3)
    ch = channel_for_gate(rz(0.0, "a"), nm, n_qubits=1)
    out = apply_channel(MIXED_1Q, ch)
    assert np.allclose(out.matrix, MIXED_1Q.matrix, atol=1e-12)


def test_identity_channel_leaves_state():
    rho = DensityMatrix(np.diag([0.3, 0.1, 0.4, 0.2]))
    ch = KrausChannel((np.eye(4),))
    assert np.allclose(apply_channel(rho, ch).matrix, rho.matrix, atol=0)


def test_unitary_channel_on_pure_state():
    rng = np.random.default_rng(5)
    circuit = random_circuit(rng, 6)
    from wvlab.statevector import circuit_unitary

    u = circuit_unitary(circuit)
    psi = StateVector.zero(2)
    rho = apply_channel(DensityMatrix.from_state(psi), KrausChannel((u,)))
    evolved = u @ psi.amplitudes
    assert np.allclose(rho.matrix, np.outer(evolved, evolved.conj()), atol=1e-12)


def test_depolarizing_p1_fully_mixes():
    nm = dataclasses.replace(NoiseModel.zero(), depol_1q=1.0)
    ch = channel_for_gate(rz(0.0, "a"), nm, n_qubits=1)
    for rho in (np.diag([1.0, 0.0]), np.array([[0.5, 0.5], [0.5, 0.5]])):
        out = apply_channel(DensityMatrix(rho), ch)
        assert np.allclose(out.matrix, np.eye(2) / 2, atol=1e-12)


def test_noiseless_run_matches_statevector():
    rng = np.random.default_rng(23)
    nm = NoiseModel.zero()
    for _ in range(10):
        circuit = random_circuit(rng, int(rng.integers(0, 12)))
        psi = run_circuit(circuit, StateVector.zero(2))
        rho = noisy_run(circuit, DensityMatrix.from_state(StateVector.zero(2)), nm)
        assert np.allclose(
            readout_probabilities(rho, nm), outcome_probabilities(psi), atol=1e-10
        )


def test_zero_flip_readout_noise_changes_nothing():
    setting = ExperimentSetting(np.pi / 4, np.pi / 2, np.pi / 4)
    circuit = build_measurement_circuit(setting, PointerBasis.PLUS_MINUS)
    nm = NoiseModel.zero().with_readout_flip(0.0)
    rho = noisy_run(circuit, DensityMatrix.from_state(StateVector.zero(2)), nm)
    psi = run_circuit(circuit, StateVector.zero(2))
    assert np.allclose(readout_probabilities(rho, nm), outcome_probabilities(psi), atol=1e-12)


def test_depolarizing_lowers_postselection_probability():
    # oracle: the noiseless i0 = cos^2(pi/8) * cos^2(pi/4) = (2 + sqrt(2)) / 8
    noiseless_i0 = (2.0 + math.sqrt(2.0)) / 8.0
    nm = dataclasses.replace(NoiseModel.zero(), depol_1q=0.0004, depol_2q=0.008)
    setting = ExperimentSetting(np.pi / 4, np.pi / 2, np.pi / 4)
    circuit = build_measurement_circuit(setting, PointerBasis.PLUS_MINUS)
    rho = noisy_run(circuit, DensityMatrix.from_state(StateVector.zero(2)), nm)
    i0 = readout_probabilities(rho, nm)[0]
    assert i0 < noiseless_i0


def test_readout_confusion_on_ground_state():
    # hand product of two symmetric 5% confusion matrices
    nm = NoiseModel.zero().with_readout_flip(0.05)
    rho = DensityMatrix.from_state(StateVector.from_bits("00"))
    probs = readout_probabilities(rho, nm)
    assert np.allclose(probs, [0.9025, 0.0475, 0.0475, 0.0025], atol=1e-15)


def test_readout_zero_flip_returns_diagonal():
    rho = DensityMatrix(np.diag([0.3, 0.1, 0.4, 0.2]))
    assert np.allclose(readout_probabilities(rho, NoiseModel.zero()), [0.3, 0.1, 0.4, 0.2])


@given(st.floats(0, 1), st.floats(0, 1))
def test_readout_uniform_is_fixed_point_of_symmetric_confusion(pa, pb):
    # symmetric flips make the confusion doubly stochastic, fixing the uniform
    nm = dataclasses.replace(NoiseModel.zero(), readout_p01=(pa, pb), readout_p10=(pa, pb))
    rho = DensityMatrix(np.eye(4) / 4)
    assert np.allclose(readout_probabilities(rho, nm), [0.25] * 4, atol=1e-12)


def test_paper_noise_model_calibration():
    nm = paper_noise_model()
    assert nm.t1_us == (142.0, 135.0)
    assert nm.t2_us == (101.0, 26.0)
    assert nm.depol_1q == 0.0004  # midpoint of the 0.02-0.06% range
    assert nm.depol_2q == 0.008  # midpoint of the 0.6-1% range
    assert nm.dur_1q_ns == 35.0
    assert nm.dur_2q_ns == 300.0
    assert nm.dur_readout_ns == 950.0
    # flips within the reported 1-14% readout error band
    for p in nm.readout_p01 + nm.readout_p10:
        assert 0.01 <= p <= 0.14
    for t1, t2 in zip(nm.t1_us, nm.t2_us):
        assert t2 <= 2 * t1


def test_trace_preserved_under_noisy_runs():
    rng = np.random.default_rng(31)
    nm = paper_noise_model()
    for _ in range(5):
        circuit = random_circuit(rng, int(rng.integers(1, 10)))
        rho = noisy_run(circuit, DensityMatrix.from_state(StateVector.zero(2)), nm)
        assert abs(np.trace(rho.matrix).real - 1.0) < 1e-9


def test_channels_are_trace_preserving():
    nm = paper_noise_model()
    for gate in (hadamard("b"), rz(0.4, "a")):
        ch = channel_for_gate(gate, nm)
        total = sum(k.conj().T @ k for k in ch.operators)
        assert np.max(np.abs(total - np.eye(4))) < 1e-10
    ch = idle_readout_channel(nm)
    total = sum(k.conj().T @ k for k in ch.operators)
    assert np.max(np.abs(total - np.eye(4))) < 1e-10


def test_invalid_noise_model_rejected():
    with pytest.raises(InvalidNoiseModel):
        NoiseModel.from_dict({**paper_noise_model().to_dict(), "t2_us": [300.0, 26.0]})
    with pytest.raises(InvalidNoiseModel):
        dataclasses.replace(paper_noise_model(), depol_1q=1.5)
    with pytest.raises(InvalidNoiseModel):
        dataclasses.replace(paper_noise_model(), dur_1q_ns=-1.0)
    with pytest.raises(InvalidNoiseModel):
        dataclasses.replace(paper_noise_model(), readout_p01=(0.02, -0.02))


def _exact_deviation_at(flip: float) -> float:
    """|R_m - R_t| from exact noisy probabilities, readout flips only."""
    setting = ExperimentSetting(np.pi / 4, np.pi / 2, np.pi / 4)
    nm = NoiseModel.zero().with_readout_flip(flip)
    values = []
    for basis in (PointerBasis.PLUS_MINUS, PointerBasis.ZERO_ONE, PointerBasis.RIGHT_LEFT):
        circuit = build_measurement_circuit(setting, basis)
        rho = noisy_run(circuit, DensityMatrix.from_state(StateVector.zero(2)), nm)
        probs = readout_probabilities(rho, nm)
        values.extend([probs[0], probs[1]])
    est = invert_weak_value(IntensitySet.from_arrays(values), setting.epsilon)
    return abs(est.R - theoretical_weak_value(setting).real)


def test_deviation_monotone_in_readout_flip():
    deviations = [_exact_deviation_at(p) for p in (0.0, 0.02, 0.05, 0.10)]
    assert deviations[0] < 1e-12
    for lo, hi in zip(deviations, deviations[1:]):
        assert hi >= lo


def test_noise_model_json_round_trip():
    nm = paper_noise_model()
    d = nm.to_dict()
    assert set(d) == {
        "t1_us", "t2_us", "depol_1q", "depol_2q", "dur_1q_ns",
        "dur_2q_ns", "dur_readout_ns", "readout_p01", "readout_p10",
    }
    assert NoiseModel.from_dict(d) == nm
    # infinite coherence times travel as null
    z = NoiseModel.zero().to_dict()
    assert z["t1_us"] == [None, None]
    assert NoiseModel.from_dict(z) == NoiseModel.zero()
    with pytest.raises(InvalidNoiseModel):
        NoiseModel.from_dict({**d, "bogus": 1})


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[1.0, 0.5], [0.0, 0.0]]))  # not Hermitian
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.7, 0.7]))  # trace 1.4
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5]))  # negative eigenvalue


def test_kraus_channel_validation():
    with pytest.raises(ValueError):
        KrausChannel((np.eye(2) * 0.5,))
