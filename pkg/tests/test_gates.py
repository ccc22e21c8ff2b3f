import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wvlab.errors import DimensionMismatch
from wvlab.gates import (
    HADAMARD,
    ID2,
    S_DAGGER,
    adjoint_gate,
    controlled_ry,
    embedded_matrix,
    gate_matrix,
    hadamard,
    raw_unitary,
    ry,
    rz,
    s_dagger,
)

angles = st.floats(-10.0, 10.0)


def test_ry_pi_flips_zero_to_one():
    assert np.allclose(gate_matrix(ry(np.pi, "a")), [[0, -1], [1, 0]], atol=1e-15)


def test_rz_zero_is_identity():
    assert np.allclose(gate_matrix(rz(0.0, "a")), ID2, atol=0)


def test_s_dagger_is_minus_i_phase():
    # relative phase of -pi/2 between |0> and |1>
    assert np.array_equal(gate_matrix(s_dagger("b")), np.diag([1, -1j]))


def test_hadamard_matrix():
    s = 1 / np.sqrt(2)
    assert np.allclose(gate_matrix(hadamard("b")), [[s, s], [s, -s]], atol=1e-15)


def test_controlled_ry_block_structure():
    theta = 0.83
    m = gate_matrix(controlled_ry(theta, control="b", target="a"))
    assert np.allclose(m[:2, :2], ID2, atol=0)
    assert np.allclose(m[2:, :2], 0, atol=0)
    assert np.allclose(m[2:, 2:], gate_matrix(ry(theta, "a")), atol=0)


def test_controlled_ry_embedding_control_b():
    # control = b (low bit): rotation applies on a exactly when bit_b = 1
    theta = 1.2
    m = embedded_matrix(controlled_ry(theta, control="b", target="a"), 2)
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    expected = np.kron(ID2, p0) + np.kron(gate_matrix(ry(theta, "a")), p1)
    assert np.allclose(m, expected, atol=1e-15)


@given(angles, st.sampled_from(["a", "b"]))
def test_single_qubit_gates_unitary(angle, q):
    for g in (ry(angle, q), rz(angle, q), hadamard(q), s_dagger(q)):
        m = gate_matrix(g)
        assert np.max(np.abs(m.conj().T @ m - ID2)) < 1e-12


@given(angles)
def test_controlled_ry_unitary(angle):
    m = gate_matrix(controlled_ry(angle, "b", "a"))
    assert np.max(np.abs(m.conj().T @ m - np.eye(4))) < 1e-12


@given(angles, st.sampled_from(["ry", "rz", "cry"]))
def test_adjoint_gate_is_conjugate_transpose(angle, kind):
    if kind == "cry":
        g = controlled_ry(angle, "b", "a")
    elif kind == "ry":
        g = ry(angle, "a")
    else:
        g = rz(angle, "b")
    assert np.allclose(gate_matrix(adjoint_gate(g)), gate_matrix(g).conj().T, atol=1e-15)


def test_raw_unitary_rejects_non_unitary():
    with pytest.raises(ValueError):
        raw_unitary(np.array([[1.0, 1.0], [0.0, 1.0]]), ("a",))


def test_raw_unitary_shape_must_match_targets():
    with pytest.raises(ValueError):
        raw_unitary(np.eye(4), ("a",))


def test_embedding_rejects_out_of_register_target():
    with pytest.raises(DimensionMismatch):
        embedded_matrix(hadamard("b"), 1)


def test_control_equals_target_rejected():
    with pytest.raises(ValueError):
        controlled_ry(0.3, "a", "a")
