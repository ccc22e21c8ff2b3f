"""Measurement circuits for variable-strength weak values on two qubits.

One experiment measures the weak value of the planar spin operator
sigma_n, n = (-sin phi, cos phi, 0), preselecting R_y(alpha_i)|0a> and
postselecting |0a>. The pointer starts in |+b>, couples through

    U(eps) = cos(eps) 1x1 - i sin(eps) sigma_n x sigma_z
           = Rz(phi) Ry(2 eps) CRy(-4 eps) Rz(-phi)        (operator order)

and is read out in one of three bases selected by a tail gate G on the
pointer: G = H for |+/->, nothing for |0/1>, S-dagger then H for the
circular pair. The postselected outcome probabilities p(0a 0b), p(0a 1b)
of the three circuits are the six intensities i0..i5.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import PostselectionImpossible
from .estimator import IntensitySet, theoretical_weak_value
from .gates import (
    ID2,
    QUBIT_A,
    QUBIT_B,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    controlled_ry,
    hadamard,
    ry,
    rz,
    s_dagger,
)
from .statevector import Circuit, circuit_unitary

ILL_CONDITIONED_SIN2E = 1e-6


@dataclass(frozen=True)
class ExperimentSetting:
    """Measurement strength, spin-axis angle, and preselection angle (radians)."""

    epsilon: float
    phi: float
    alpha_i: float

    def __post_init__(self):
        for name in ("epsilon", "phi", "alpha_i"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


class PointerBasis(Enum):
    """Readout basis of the pointer, fixed by the tail gate G."""

    PLUS_MINUS = "plus_minus"   # G = H        -> i0, i1
    ZERO_ONE = "zero_one"       # G = identity -> i2, i3
    RIGHT_LEFT = "right_left"   # G = H S+     -> i4, i5

    @property
    def intensity_offset(self) -> int:
        return {"plus_minus": 0, "zero_one": 2, "right_left": 4}[self.value]


def preparation_gates(setting: ExperimentSetting) -> tuple:
    return (ry(setting.alpha_i, QUBIT_A), hadamard(QUBIT_B))


def evolution_gates(setting: ExperimentSetting) -> tuple:
    """Time-ordered gate realization of U(eps); rightmost operator first."""
    return (
        rz(-setting.phi, QUBIT_A),
        controlled_ry(-4.0 * setting.epsilon, control=QUBIT_B, target=QUBIT_A),
        ry(2.0 * setting.epsilon, QUBIT_A),
        rz(setting.phi, QUBIT_A),
    )


def basis_tail_gates(basis: PointerBasis) -> tuple:
    if basis is PointerBasis.PLUS_MINUS:
        return (hadamard(QUBIT_B),)
    if basis is PointerBasis.ZERO_ONE:
        return ()
    return (s_dagger(QUBIT_B), hadamard(QUBIT_B))


def build_measurement_circuit(setting: ExperimentSetting, basis: PointerBasis) -> Circuit:
    """Full circuit: preparation, evolution, basis tail. Measure both qubits after."""
    if abs(math.sin(2.0 * setting.epsilon)) < ILL_CONDITIONED_SIN2E:
        warnings.warn(
            f"sin(2*epsilon) = {math.sin(2.0 * setting.epsilon):.2e}; "
            "intensity inversion will be ill-conditioned at this strength",
            stacklevel=2,
        )
    gates = preparation_gates(setting) + evolution_gates(setting) + basis_tail_gates(basis)
    return Circuit(gates, n_qubits=2)


def evolution_closed_form(setting: ExperimentSetting) -> np.ndarray:
    """cos(eps) 1x1 - i sin(eps) sigma_n x sigma_z, the evolution operator."""
    eps, phi = setting.epsilon, setting.phi
    sigma_n = -math.sin(phi) * SIGMA_X + math.cos(phi) * SIGMA_Y
    return math.cos(eps) * np.kron(ID2, ID2) - 1j * math.sin(eps) * np.kron(sigma_n, SIGMA_Z)


def verify_decomposition(setting: ExperimentSetting) -> float:
    """Max entrywise deviation between the gate realization and the closed form.

    The two sides are an operator identity, so no global-phase freedom is
    allowed in the comparison.
    """
    u_gates = circuit_unitary(Circuit(evolution_gates(setting), n_qubits=2))
    return float(np.max(np.abs(u_gates - evolution_closed_form(setting))))


def theoretical_intensities(setting: ExperimentSetting) -> IntensitySet:
    """Exact i0..i5 for the setting, with zero uncertainties.

    Raises PostselectionImpossible when the pre/post overlap cos(alpha_i/2)
    vanishes (alpha_i = pi): every intensity is zero and nothing can be
    inverted.
    """
    half = setting.alpha_i / 2.0
    if abs(math.cos(half)) < 1e-12:
        raise PostselectionImpossible("preselection orthogonal to postselection")
    w = theoretical_weak_value(setting)
    r, im = w.real, w.imag
    overlap2 = math.cos(half) ** 2
    c, s = math.cos(setting.epsilon), math.sin(setting.epsilon)
    i0 = overlap2 * c**2
    i1 = overlap2 * s**2 * (r**2 + im**2)
    i2 = 0.5 * overlap2 * ((c + im * s) ** 2 + r**2 * s**2)
    i3 = 0.5 * overlap2 * ((c - im * s) ** 2 + r**2 * s**2)
    i4 = 0.5 * overlap2 * ((c + r * s) ** 2 + im**2 * s**2)
    i5 = 0.5 * overlap2 * ((c - r * s) ** 2 + im**2 * s**2)
    return IntensitySet(i0, i1, i2, i3, i4, i5)
