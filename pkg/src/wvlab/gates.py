"""Gate matrices and their embeddings on the (a, b) qubit pair.

Conventions, fixed package-wide:
  * qubit ``a`` (the system) is the high-order bit, qubit ``b`` (the pointer)
    the low-order bit: basis index = 2*bit_a + bit_b, so the four basis
    states are |0a 0b>, |0a 1b>, |1a 0b>, |1a 1b>.
  * rotations carry the half-angle sign convention
    R_y(t) = exp(-i t sigma_y / 2),  R_z(t) = exp(-i t sigma_z / 2).
  * the controlled rotation CRy(t) applies R_y(t) to its target when the
    control is |1>; its 4x4 matrix is returned in (control, target) order.
  * global phases are never normalized away.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

QUBIT_A = "a"
QUBIT_B = "b"
_QUBIT_INDEX = {QUBIT_A: 0, QUBIT_B: 1}

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
S_DAGGER = np.array([[1.0, 0.0], [0.0, -1.0j]], dtype=complex)

_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

UNITARY_ATOL = 1e-12


@dataclass(frozen=True)
class GateOp:
    """One gate in a circuit. Build instances via the constructor helpers."""

    kind: str
    targets: tuple[str, ...]
    angle: float = 0.0
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        for q in self.targets:
            if q not in _QUBIT_INDEX:
                raise ValueError(f"unknown qubit label {q!r}; use 'a' or 'b'")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError("control and target must differ")

    @property
    def n_targets(self) -> int:
        return len(self.targets)


def ry(angle: float, target: str) -> GateOp:
    return GateOp("ry", (target,), angle=float(angle))


def rz(angle: float, target: str) -> GateOp:
    return GateOp("rz", (target,), angle=float(angle))


def hadamard(target: str) -> GateOp:
    return GateOp("h", (target,))


def s_dagger(target: str) -> GateOp:
    return GateOp("sdg", (target,))


def controlled_ry(angle: float, control: str, target: str) -> GateOp:
    """R_y(angle) on ``target``, conditioned on ``control`` being |1>."""
    return GateOp("cry", (control, target), angle=float(angle))


def raw_unitary(matrix, targets: tuple[str, ...]) -> GateOp:
    m = np.asarray(matrix, dtype=complex)
    dim = 2 ** len(targets)
    if m.shape != (dim, dim):
        raise ValueError(f"matrix shape {m.shape} does not match targets {targets}")
    if np.max(np.abs(m.conj().T @ m - np.eye(dim))) > UNITARY_ATOL:
        raise ValueError("raw gate matrix is not unitary")
    return GateOp("unitary", tuple(targets), matrix=m)


def _ry_matrix(t: float) -> np.ndarray:
    c, s = np.cos(t / 2.0), np.sin(t / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz_matrix(t: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * t), 0.0], [0.0, np.exp(0.5j * t)]], dtype=complex
    )


def gate_matrix(g: GateOp) -> np.ndarray:
    """Matrix of ``g`` in its own target order (2x2, or 4x4 for cry)."""
    if g.kind == "ry":
        return _ry_matrix(g.angle)
    if g.kind == "rz":
        return _rz_matrix(g.angle)
    if g.kind == "h":
        return HADAMARD.copy()
    if g.kind == "sdg":
        return S_DAGGER.copy()
    if g.kind == "cry":
        # projector on control (high bit here) selects identity or rotation
        out = np.zeros((4, 4), dtype=complex)
        out[:2, :2] = ID2
        out[2:, 2:] = _ry_matrix(g.angle)
        return out
    if g.kind == "unitary":
        return g.matrix.copy()
    raise ValueError(f"unknown gate kind {g.kind!r}")


def adjoint_gate(g: GateOp) -> GateOp:
    """Gate whose matrix is the conjugate transpose of ``g``'s."""
    if g.kind == "ry":
        return ry(-g.angle, g.targets[0])
    if g.kind == "rz":
        return rz(-g.angle, g.targets[0])
    if g.kind == "h":
        return g
    if g.kind == "cry":
        return controlled_ry(-g.angle, *g.targets)
    return raw_unitary(gate_matrix(g).conj().T, g.targets)


def embedded_matrix(g: GateOp, n_qubits: int) -> np.ndarray:
    """Full-space matrix of ``g`` on an ``n_qubits`` register in (a, b) order."""
    from .errors import DimensionMismatch

    for q in g.targets:
        if _QUBIT_INDEX[q] >= n_qubits:
            raise DimensionMismatch(
                f"gate on qubit {q!r} does not fit a {n_qubits}-qubit register"
            )
    m = gate_matrix(g)
    if n_qubits == 1:
        return m
    if g.n_targets == 1:
        if g.targets[0] == QUBIT_A:
            return np.kron(m, ID2)
        return np.kron(ID2, m)
    # two-qubit gate: matrix is in (targets[0], targets[1]) order
    if g.targets == (QUBIT_A, QUBIT_B):
        return m
    return _SWAP @ m @ _SWAP
