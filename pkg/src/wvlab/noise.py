"""Density-matrix evolution under a transmon-style error model.

Every gate is followed by a depolarizing channel at its gate-class rate on
the qubit(s) it touches, then amplitude damping and pure dephasing on every
qubit (idle ones included) for the gate duration. Rates derive from the
usual Bloch-Redfield parameters:

    gamma_ad   = 1 - exp(-t / T1)
    1 / T_phi  = 1 / T2 - 1 / (2 T1)      (requires T2 <= 2 T1)
    p_dephase  = (1 - exp(-t / T_phi)) / 2

so the off-diagonal element of a single qubit decays by exp(-t / T2).
Relaxation is zero-temperature (decay to |0> only). Readout applies the
same relaxation for the readout duration, then a per-qubit confusion
matrix built from the flip probabilities p(read 1 | state 0) and
p(read 0 | state 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, InvalidNoiseModel
from .gates import ID2, QUBIT_A, SIGMA_X, SIGMA_Y, SIGMA_Z, GateOp, embedded_matrix
from .statevector import Circuit, StateVector

TRACE_ATOL = 1e-10
HERMITIAN_ATOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
CHANNEL_ATOL = 1e-10

_NOISE_JSON_FIELDS = (
    "t1_us",
    "t2_us",
    "depol_1q",
    "depol_2q",
    "dur_1q_ns",
    "dur_2q_ns",
    "dur_readout_ns",
    "readout_p01",
    "readout_p10",
)


@dataclass(frozen=True)
class NoiseModel:
    """Calibration of the error model; per-qubit entries are (a, b)."""

    t1_us: tuple[float, float]
    t2_us: tuple[float, float]
    depol_1q: float
    depol_2q: float
    dur_1q_ns: float
    dur_2q_ns: float
    dur_readout_ns: float
    readout_p01: tuple[float, float]
    readout_p10: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "t1_us", tuple(float(x) for x in self.t1_us))
        object.__setattr__(self, "t2_us", tuple(float(x) for x in self.t2_us))
        object.__setattr__(self, "readout_p01", tuple(float(x) for x in self.readout_p01))
        object.__setattr__(self, "readout_p10", tuple(float(x) for x in self.readout_p10))
        for pair in (self.t1_us, self.t2_us, self.readout_p01, self.readout_p10):
            if len(pair) != 2:
                raise InvalidNoiseModel("per-qubit entries must have exactly two values")
        for t1, t2 in zip(self.t1_us, self.t2_us):
            if t1 <= 0 or t2 <= 0:
                raise InvalidNoiseModel("T1 and T2 must be positive")
            if t2 > 2.0 * t1 + 1e-12:
                raise InvalidNoiseModel(f"T2={t2} exceeds 2*T1={2 * t1}")
        for p in (self.depol_1q, self.depol_2q, *self.readout_p01, *self.readout_p10):
            if not 0.0 <= p <= 1.0:
                raise InvalidNoiseModel(f"probability {p} outside [0, 1]")
        for d in (self.dur_1q_ns, self.dur_2q_ns, self.dur_readout_ns):
            if d < 0:
                raise InvalidNoiseModel("durations must be non-negative")

    @classmethod
    def zero(cls) -> "NoiseModel":
        """Noiseless calibration: infinite coherence, zero error rates."""
        inf = math.inf
        return cls(
            t1_us=(inf, inf),
            t2_us=(inf, inf),
            depol_1q=0.0,
            depol_2q=0.0,
            dur_1q_ns=0.0,
            dur_2q_ns=0.0,
            dur_readout_ns=0.0,
            readout_p01=(0.0, 0.0),
            readout_p10=(0.0, 0.0),
        )

    def with_readout_flip(self, p: float) -> "NoiseModel":
        """Copy with symmetric readout flip probability ``p`` on both qubits."""
        return replace(self, readout_p01=(p, p), readout_p10=(p, p))

    def to_dict(self) -> dict:
        """JSON form; infinite times serialize as null."""

        def enc(x):
            return None if math.isinf(x) else x

        return {
            "t1_us": [enc(x) for x in self.t1_us],
            "t2_us": [enc(x) for x in self.t2_us],
            "depol_1q": self.depol_1q,
            "depol_2q": self.depol_2q,
            "dur_1q_ns": self.dur_1q_ns,
            "dur_2q_ns": self.dur_2q_ns,
            "dur_readout_ns": self.dur_readout_ns,
            "readout_p01": list(self.readout_p01),
            "readout_p10": list(self.readout_p10),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseModel":
        unknown = set(d) - set(_NOISE_JSON_FIELDS)
        if unknown:
            raise InvalidNoiseModel(f"unknown noise fields: {sorted(unknown)}")
        missing = set(_NOISE_JSON_FIELDS) - set(d)
        if missing:
            raise InvalidNoiseModel(f"missing noise fields: {sorted(missing)}")

        def dec(x):
            return math.inf if x is None else float(x)

        return cls(
            t1_us=tuple(dec(x) for x in d["t1_us"]),
            t2_us=tuple(dec(x) for x in d["t2_us"]),
            depol_1q=float(d["depol_1q"]),
            depol_2q=float(d["depol_2q"]),
            dur_1q_ns=float(d["dur_1q_ns"]),
            dur_2q_ns=float(d["dur_2q_ns"]),
            dur_readout_ns=float(d["dur_readout_ns"]),
            readout_p01=tuple(dec(x) for x in d["readout_p01"]),
            readout_p10=tuple(dec(x) for x in d["readout_p10"]),
        )


def paper_noise_model() -> NoiseModel:
    """Default calibration for the reference superconducting device.

    T1/T2 are the reported per-qubit averages; depolarizing rates sit at
    the midpoints of the reported gate-error ranges (0.02-0.06% for
    one-qubit gates, 0.6-1% for two-qubit gates); durations are tens of ns
    for one-qubit gates, hundreds for two-qubit gates, just under 1 us for
    readout; readout flips default to a symmetric 2%.
    """
    return NoiseModel(
        t1_us=(142.0, 135.0),
        t2_us=(101.0, 26.0),
        depol_1q=0.0004,
        depol_2q=0.008,
        dur_1q_ns=35.0,
        dur_2q_ns=300.0,
        dur_readout_ns=950.0,
        readout_p01=(0.02, 0.02),
        readout_p10=(0.02, 0.02),
    )


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state of 1-2 qubits."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape not in ((2, 2), (4, 4)):
            raise ValueError("density matrix must be 2x2 or 4x4")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_ATOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace is {np.trace(m).real!r}, not 1")
        if np.min(np.linalg.eigvalsh(m)) < EIGENVALUE_FLOOR:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self) -> int:
        return 1 if self.matrix.shape[0] == 2 else 2

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix":
        return cls(np.outer(state.amplitudes, state.amplitudes.conj()))


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive trace-preserving map, sum_k K^dag K = 1."""

    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        total = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(total - np.eye(dim))) > CHANNEL_ATOL:
            raise ValueError("Kraus operators do not preserve trace")
        object.__setattr__(self, "operators", ops)


def _amplitude_damping(gamma: float) -> list[np.ndarray]:
    if gamma == 0.0:
        return [ID2]
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return [k0, k1]


def _dephasing(p: float) -> list[np.ndarray]:
    if p == 0.0:
        return [ID2]
    return [np.sqrt(1.0 - p) * ID2, np.sqrt(p) * SIGMA_Z]


def _depolarizing_1q(p: float) -> list[np.ndarray]:
    if p == 0.0:
        return [ID2]
    return [
        np.sqrt(1.0 - 0.75 * p) * ID2,
        np.sqrt(p / 4.0) * SIGMA_X,
        np.sqrt(p / 4.0) * SIGMA_Y,
        np.sqrt(p / 4.0) * SIGMA_Z,
    ]


def _depolarizing_2q(p: float) -> list[np.ndarray]:
    if p == 0.0:
        return [np.eye(4, dtype=complex)]
    paulis = [ID2, SIGMA_X, SIGMA_Y, SIGMA_Z]
    ops = []
    for i, pa in enumerate(paulis):
        for j, pb in enumerate(paulis):
            w = 1.0 - 15.0 * p / 16.0 if (i, j) == (0, 0) else p / 16.0
            ops.append(np.sqrt(w) * np.kron(pa, pb))
    return ops


def _compose(first: list[np.ndarray], then: list[np.ndarray]) -> list[np.ndarray]:
    """Kraus set of (then after first)."""
    return [t @ f for t in then for f in first]


def _embed_1q(ops: list[np.ndarray], qubit: str, n_qubits: int) -> list[np.ndarray]:
    if n_qubits == 1:
        return ops
    if qubit == QUBIT_A:
        return [np.kron(k, ID2) for k in ops]
    return [np.kron(ID2, k) for k in ops]


def _relaxation_1q(nm: NoiseModel, qubit_index: int, duration_ns: float) -> list[np.ndarray]:
    t1 = nm.t1_us[qubit_index] * 1000.0  # ns
    t2 = nm.t2_us[qubit_index] * 1000.0
    t = duration_ns
    gamma = 0.0 if math.isinf(t1) else 1.0 - math.exp(-t / t1)
    rate_phi = (0.0 if math.isinf(t2) else 1.0 / t2) - (
        0.0 if math.isinf(t1) else 0.5 / t1
    )
    rate_phi = max(rate_phi, 0.0)
    p_deph = 0.0 if rate_phi == 0.0 else 0.5 * (1.0 - math.exp(-t * rate_phi))
    return _compose(_amplitude_damping(gamma), _dephasing(p_deph))


@lru_cache(maxsize=None)
def _environment_tail(
    nm: NoiseModel, depol_p: float, touched: tuple[str, ...], duration_ns: float, n_qubits: int
) -> tuple[np.ndarray, ...]:
    """Depolarizing on the touched qubit(s), then relaxation on every qubit."""
    if len(touched) == 2:
        ops = _depolarizing_2q(depol_p)
    else:
        ops = _embed_1q(_depolarizing_1q(depol_p), touched[0], n_qubits)
    qubits = ("a", "b")[:n_qubits]
    for q in qubits:
        idx = 0 if q == QUBIT_A else 1
        relax = _embed_1q(_relaxation_1q(nm, idx, duration_ns), q, n_qubits)
        ops = _compose(ops, relax)
    return tuple(ops)


def channel_for_gate(g: GateOp, nm: NoiseModel, n_qubits: int = 2) -> KrausChannel:
    """Noisy realization of one gate: unitary, then its environment tail."""
    u = embedded_matrix(g, n_qubits)
    if g.n_targets == 2:
        depol_p, dur = nm.depol_2q, nm.dur_2q_ns
    else:
        depol_p, dur = nm.depol_1q, nm.dur_1q_ns
    tail = _environment_tail(nm, depol_p, g.targets, dur, n_qubits)
    return KrausChannel(tuple(k @ u for k in tail))


def idle_readout_channel(nm: NoiseModel, n_qubits: int = 2) -> KrausChannel:
    """Relaxation on every qubit for the readout duration (no depolarizing)."""
    return KrausChannel(_environment_tail(nm, 0.0, (QUBIT_A,), nm.dur_readout_ns, n_qubits))


def apply_channel(rho: DensityMatrix, ch: KrausChannel) -> DensityMatrix:
    k = np.stack(ch.operators)
    out = np.einsum("kij,jl,kml->im", k, rho.matrix, k.conj())
    return DensityMatrix(out)


def noisy_run(circuit: Circuit, initial: DensityMatrix, nm: NoiseModel) -> DensityMatrix:
    """Run the circuit gate by gate under the noise model, then idle through readout."""
    if circuit.n_qubits != initial.n_qubits:
        raise DimensionMismatch("circuit and state qubit counts differ")
    rho = initial
    for g in circuit.gates:
        rho = apply_channel(rho, channel_for_gate(g, nm, circuit.n_qubits))
    return apply_channel(rho, idle_readout_channel(nm, circuit.n_qubits))


def _confusion_1q(p01: float, p10: float) -> np.ndarray:
    # column = true state, row = recorded state
    return np.array([[1.0 - p01, p10], [p01, 1.0 - p10]])


def readout_probabilities(rho: DensityMatrix, nm: NoiseModel) -> np.ndarray:
    """Diagonal of rho pushed through the per-qubit confusion matrices."""
    ideal = np.real(np.diag(rho.matrix))
    c_a = _confusion_1q(nm.readout_p01[0], nm.readout_p10[0])
    if rho.n_qubits == 1:
        return c_a @ ideal
    c_b = _confusion_1q(nm.readout_p01[1], nm.readout_p10[1])
    return np.kron(c_a, c_b) @ ideal
