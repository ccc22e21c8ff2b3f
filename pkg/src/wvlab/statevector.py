"""Dense statevector simulation of one- and two-qubit circuits.

States are immutable; every operation returns a new value. Shot sampling is
reproducible across platforms: it draws ``shots`` uniforms from a PCG64
stream seeded with the given integer and bins them against the cumulative
distribution (inverse-CDF multinomial), so counts depend only on the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidProbabilities
from .gates import GateOp, adjoint_gate, embedded_matrix

NORM_ATOL = 1e-12


@dataclass(frozen=True)
class StateVector:
    """Pure state of one or two qubits; basis index = 2*bit_a + bit_b."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape not in ((2,), (4,)):
            raise ValueError("state dimension must be 2 or 4")
        if abs(np.sum(np.abs(amps) ** 2) - 1.0) > NORM_ATOL:
            raise ValueError("state is not normalized")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return 1 if self.amplitudes.size == 2 else 2

    @classmethod
    def zero(cls, n_qubits: int = 2) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(amps)

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        """Computational basis state, e.g. ``"01"`` for |0a 1b>."""
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>|^2; global phases drop out."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


@dataclass(frozen=True)
class Circuit:
    """Time-ordered gate list; gates[0] acts first."""

    gates: tuple[GateOp, ...]
    n_qubits: int = 2

    def __post_init__(self):
        if self.n_qubits not in (1, 2):
            raise ValueError("only 1- or 2-qubit circuits are supported")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            embedded_matrix(g, self.n_qubits)  # raises DimensionMismatch

    def adjoint(self) -> "Circuit":
        """Gate-wise adjoint in reverse order; undoes this circuit."""
        return Circuit(tuple(adjoint_gate(g) for g in reversed(self.gates)), self.n_qubits)


@dataclass(frozen=True)
class ShotCounts:
    """Histogram of measured basis outcomes, indexed like the state vector."""

    counts: tuple[int, ...]
    shots: int

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")
        if sum(self.counts) != self.shots:
            raise ValueError("counts must sum to shots")


def apply_gate(state: StateVector, g: GateOp) -> StateVector:
    return StateVector(embedded_matrix(g, state.n_qubits) @ state.amplitudes)


def run_circuit(circuit: Circuit, initial: StateVector) -> StateVector:
    from .errors import DimensionMismatch

    if circuit.n_qubits != initial.n_qubits:
        raise DimensionMismatch("circuit and state qubit counts differ")
    amps = initial.amplitudes
    for g in circuit.gates:
        amps = embedded_matrix(g, circuit.n_qubits) @ amps
    return StateVector(amps)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Product of the embedded gate matrices, later gates on the left."""
    dim = 2**circuit.n_qubits
    u = np.eye(dim, dtype=complex)
    for g in circuit.gates:
        u = embedded_matrix(g, circuit.n_qubits) @ u
    return u


def outcome_probabilities(state: StateVector) -> np.ndarray:
    """Born-rule probability of each computational basis outcome."""
    return np.abs(state.amplitudes) ** 2


def sample_shots(probs, shots: int, seed: int) -> ShotCounts:
    """Multinomial draw of ``shots`` outcomes from ``probs``.

    Deterministic for a fixed seed. Negative entries within -1e-9 are
    treated as floating-point noise and clipped.
    """
    p = np.asarray(probs, dtype=float)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if p.ndim != 1 or p.size < 1:
        raise InvalidProbabilities("probability table must be a 1-d sequence")
    if np.min(p) < -1e-9:
        raise InvalidProbabilities("negative probability")
    if abs(p.sum() - 1.0) > 1e-9:
        raise InvalidProbabilities(f"probabilities sum to {p.sum()!r}, not 1")
    p = np.clip(p, 0.0, None)
    cumulative = np.cumsum(p / p.sum())
    cumulative[-1] = 1.0
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.random(shots)
    idx = np.searchsorted(cumulative, draws, side="right")
    counts = np.bincount(idx, minlength=p.size)
    return ShotCounts(tuple(int(c) for c in counts), int(shots))
