import hypothesis
import numpy as np

from wvlab.gates import controlled_ry, hadamard, raw_unitary, ry, rz, s_dagger
from wvlab.statevector import Circuit

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.load_profile("ci")


def random_circuit(rng: np.random.Generator, n_gates: int, n_qubits: int = 2) -> Circuit:
    """Seeded random circuit over the full gate vocabulary."""
    gates = []
    qubits = ["a", "b"][:n_qubits]
    kinds = ["ry", "rz", "h", "sdg", "raw"] + (["cry"] if n_qubits == 2 else [])
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        q = qubits[rng.integers(len(qubits))]
        angle = float(rng.uniform(-2 * np.pi, 2 * np.pi))
        if kind == "ry":
            gates.append(ry(angle, q))
        elif kind == "rz":
            gates.append(rz(angle, q))
        elif kind == "h":
            gates.append(hadamard(q))
        elif kind == "sdg":
            gates.append(s_dagger(q))
        elif kind == "cry":
            other = "b" if q == "a" else "a"
            gates.append(controlled_ry(angle, control=q, target=other))
        else:
            gates.append(raw_unitary(random_unitary(rng, 2), (q,)))
    return Circuit(tuple(gates), n_qubits=n_qubits)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / np.linalg.norm(z)
