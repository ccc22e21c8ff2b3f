"""Jones-calculus check of the all-optical realization.

Polarization is qubit a with Jones components (horizontal, vertical) =
(|0a>, |1a>); the propagation path is qubit b with |0b> horizontal.

Wave plates are symmetric-phase retarders

    W(theta, G) = R(theta) diag(e^{-iG/2}, e^{+iG/2}) R(-theta)

with the axis angle theta referenced to the vertical direction. Physical
retarders rotate the Poincare sphere about axes in its linear-polarization
plane, whose conventional (S1, S2, S3) labels are a cyclic relabeling of
the computational Pauli frame (S1 is the H/V balance, i.e. sigma_z). The
fixed Clifford rotation PLATE_FRAME aligns the two frames; conjugating the
plate product by it reproduces exp(-i eps sigma_n) exactly. That frozen
convention is asserted by the synthesis identity in the test suite (the
angle-reference shift theta -> theta + pi/2 alone cannot repair the frame,
it only re-reflects axes inside the linear plane).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonUnitaryInput
from .gates import ID2, SIGMA_X, SIGMA_Y, SIGMA_Z

QUARTER_WAVE = math.pi / 2.0
HALF_WAVE = math.pi

#: Fixed frame rotation with C sx C+ = sy, C sy C+ = sz, C sz C+ = sx.
PLATE_FRAME = 0.5 * (np.eye(2) - 1j * (SIGMA_X + SIGMA_Y + SIGMA_Z))

_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)
_BEAM_SPLITTER = np.kron(ID2, np.array([[1.0, 1.0j], [1.0j, 1.0]]) / np.sqrt(2.0))
_MIRRORS = np.kron(ID2, SIGMA_X)  # the arm mirrors exchange path labels

UNITARY_ATOL = 1e-10


@dataclass(frozen=True)
class WavePlate:
    """Retarder with axis at ``axis_angle`` (radians, from vertical)."""

    axis_angle: float
    retardance: float

    def __post_init__(self):
        if not 0.0 < self.retardance < 2.0 * math.pi:
            raise ValueError("retardance must lie in (0, 2*pi)")


def quarter(angle: float) -> WavePlate:
    return WavePlate(angle, QUARTER_WAVE)


def half(angle: float) -> WavePlate:
    return WavePlate(angle, HALF_WAVE)


@dataclass(frozen=True)
class OpticalAxisVector:
    """Spin axis n = (sin t cos v, sin t sin v, cos t) by polar/azimuthal angle."""

    theta: float
    varphi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.varphi)):
            raise ValueError("axis angles must be finite")

    @property
    def unit_vector(self) -> np.ndarray:
        t, v = self.theta, self.varphi
        return np.array([math.sin(t) * math.cos(v), math.sin(t) * math.sin(v), math.cos(t)])

    @property
    def sigma(self) -> np.ndarray:
        n = self.unit_vector
        return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def plate_matrix(p: WavePlate) -> np.ndarray:
    """Jones matrix of the retarder; unit-modulus determinant."""
    d = np.diag([np.exp(-0.5j * p.retardance), np.exp(0.5j * p.retardance)])
    return _rotation(p.axis_angle) @ d @ _rotation(-p.axis_angle)


def _plate_product(n: OpticalAxisVector, epsilon: float, adjoint: bool) -> np.ndarray:
    t, v = n.theta, n.varphi
    angles = [
        (QUARTER_WAVE, (math.pi + v) / 2.0),
        (QUARTER_WAVE, (t + v) / 2.0),
        (HALF_WAVE, (-math.pi + t + v) / 2.0 + epsilon / 2.0),
        (QUARTER_WAVE, (t + v) / 2.0),
        (QUARTER_WAVE, v / 2.0),
    ]
    if adjoint:
        # same plates traversed in reverse order, each shifted by +pi/2
        angles = [(g, a + math.pi / 2.0) for g, a in reversed(angles)]
    out = np.eye(2, dtype=complex)
    for gamma, angle in angles:
        out = out @ plate_matrix(WavePlate(angle, gamma))
    return out


def ua_from_plates(n: OpticalAxisVector, epsilon: float) -> np.ndarray:
    """Five-plate synthesis of exp(-i eps sigma_n), up to a global phase."""
    c = PLATE_FRAME
    return c @ _plate_product(n, epsilon, adjoint=False) @ c.conj().T


def ua_adjoint_from_plates(n: OpticalAxisVector, epsilon: float) -> np.ndarray:
    """Reverse-order, +pi/2-shifted plate synthesis of the adjoint."""
    c = PLATE_FRAME
    return c @ _plate_product(n, epsilon, adjoint=True) @ c.conj().T


def ua_exponential(n: OpticalAxisVector, epsilon: float) -> np.ndarray:
    """exp(-i eps sigma_n) by eigendecomposition; the synthesis oracle."""
    w, v = np.linalg.eigh(n.sigma)
    return (v * np.exp(-1j * epsilon * w)) @ v.conj().T


def _require_unitary(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise NonUnitaryInput(f"{name} must be a 2x2 matrix")
    if np.max(np.abs(m.conj().T @ m - ID2)) > UNITARY_ATOL:
        raise NonUnitaryInput(f"{name} is not unitary")
    return m


def interferometer_unitary(vi, v0, v1, vf) -> np.ndarray:
    """Mach-Zehnder assembly on polarization x path.

    Input block ``vi`` acts on the horizontal path, a symmetric 50:50 beam
    splitter (phase i on reflection) splits, ``v0``/``v1`` act in the two
    arms, the mirrors exchange the path labels (their common phase drops
    out), a second splitter recombines, and ``vf`` acts on the horizontal
    output. With v0 = v1 = U and vi = vf = U-dagger this realizes
    U+ P0b + U P1b up to a global phase.
    """
    vi, v0, v1, vf = (
        _require_unitary(vi, "vi"),
        _require_unitary(v0, "v0"),
        _require_unitary(v1, "v1"),
        _require_unitary(vf, "vf"),
    )
    block_in = np.kron(vi, _P0) + np.kron(ID2, _P1)
    arms = np.kron(v0, _P0) + np.kron(v1, _P1)
    block_out = np.kron(vf, _P0) + np.kron(ID2, _P1)
    return block_out @ _BEAM_SPLITTER @ arms @ _MIRRORS @ _BEAM_SPLITTER @ block_in


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max entrywise deviation after dividing both by their largest entry.

    The largest-magnitude entry of ``a`` picks the reference position, so
    matrices equal up to a global phase compare to zero.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    if abs(b[idx]) < 1e-300:
        return float(np.max(np.abs(a - b)))
    return float(np.max(np.abs(a / a[idx] - b / b[idx])))
