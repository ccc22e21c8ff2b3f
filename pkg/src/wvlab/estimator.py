"""Inversion of measured intensities into weak values and the preselection state.

Given the six intensities (postselected outcome probabilities for the three
pointer readout bases), the weak value w = R + iI of the measured spin
operator and the preselection parameters follow from

    |w|^2 = (i1/i0) cot^2(eps)
    R     = (i4 - i5) / (2 i0) * cot(eps)
    I     = (i2 - i3) / (2 i0) * cot(eps)

    nu    = (1/2 + |w|^2/2)^(-1/2)
    alpha = 2 arctan(|w|)
    phi   = two-argument arctangent of the intensity differences (signed
            mode) or arctan of their absolute ratio (first-quadrant mode)

valid whenever i0 is nonzero and sin(2 eps) does not vanish. |w|^2 is
reported from the i1/i0 route even when noise makes it differ from
R^2 + I^2; the discrepancy is exposed as a diagnostic.

Uncertainties attached by `invert_weak_value` / `reconstruct_preselection`
are first-order propagation with coefficients evaluated at the *measured*
intensities (nothing else is available blind). `propagate_uncertainty_closed`
and `propagate_uncertainty_numeric` instead evaluate the coefficients at the
theoretical intensities of a known experiment setting, which is the
convention used by the sweep runner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from .errors import (
    EmptyInput,
    IndeterminatePhase,
    LengthMismatch,
    PostselectionImpossible,
    SingularStrength,
    ZeroPostselectionOverlap,
)
from .statevector import ShotCounts

if TYPE_CHECKING:
    from .circuits import ExperimentSetting

OVERLAP_THRESHOLD = 1e-9
SINGULAR_ATOL = 1e-12
FD_RELATIVE_STEP = 1e-6

PHASE_MODES = ("signed", "first_quadrant")
SIGMA_CONVENTIONS = ("sem", "sample_sd")


@dataclass(frozen=True)
class IntensitySet:
    """Six intensities with their standard deviations; the estimator input."""

    i0: float
    i1: float
    i2: float
    i3: float
    i4: float
    i5: float
    sigma_i0: float = 0.0
    sigma_i1: float = 0.0
    sigma_i2: float = 0.0
    sigma_i3: float = 0.0
    sigma_i4: float = 0.0
    sigma_i5: float = 0.0

    def __post_init__(self):
        for k, v in enumerate(self.values):
            if not -1e-12 <= v <= 1.0 + 1e-12:
                raise ValueError(f"i{k}={v} outside [0, 1]")
        if any(s < 0 for s in self.sigmas):
            raise ValueError("sigmas must be non-negative")

    @property
    def values(self) -> np.ndarray:
        return np.array([self.i0, self.i1, self.i2, self.i3, self.i4, self.i5])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array(
            [self.sigma_i0, self.sigma_i1, self.sigma_i2,
             self.sigma_i3, self.sigma_i4, self.sigma_i5]
        )

    @classmethod
    def from_arrays(cls, values, sigmas=None) -> "IntensitySet":
        values = [float(v) for v in values]
        sigmas = [0.0] * 6 if sigmas is None else [float(s) for s in sigmas]
        return cls(*values, *sigmas)

    def to_dict(self) -> dict:
        d = {f"i{k}": float(v) for k, v in enumerate(self.values)}
        d.update({f"sigma_i{k}": float(s) for k, s in enumerate(self.sigmas)})
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "IntensitySet":
        values = [d[f"i{k}"] for k in range(6)]
        sigmas = [d.get(f"sigma_i{k}", 0.0) for k in range(6)]
        return cls.from_arrays(values, sigmas)


@dataclass(frozen=True)
class WeakValueEstimate:
    R: float
    I: float
    mag2: float
    sigma_R: float = 0.0
    sigma_I: float = 0.0

    @property
    def weak_value(self) -> complex:
        return complex(self.R, self.I)

    @property
    def mag2_discrepancy(self) -> float:
        """|mag2 - (R^2 + I^2)|; zero on exact data, a noise diagnostic otherwise."""
        return abs(self.mag2 - (self.R**2 + self.I**2))


@dataclass(frozen=True)
class PreselectionEstimate:
    nu: float
    alpha: float
    phi: float
    pi_plus: complex
    pi_minus: complex
    state: tuple[complex, complex]
    sigma_nu: float = 0.0
    sigma_alpha: float = 0.0
    sigma_phi: float = 0.0


@dataclass(frozen=True)
class MeritFigures:
    """RMS statistical uncertainty and RMS theory-experiment deviation."""

    sigma_bar: float
    delta_bar: float
    n: int


def _check_invertible(iset: IntensitySet, epsilon: float, overlap_threshold: float):
    if abs(math.sin(2.0 * epsilon)) <= SINGULAR_ATOL:
        raise SingularStrength(f"sin(2*epsilon) vanishes at epsilon={epsilon}")
    if iset.i0 <= overlap_threshold:
        raise ZeroPostselectionOverlap(f"i0={iset.i0} below threshold {overlap_threshold}")


def invert_weak_value(
    iset: IntensitySet, epsilon: float, overlap_threshold: float = OVERLAP_THRESHOLD
) -> WeakValueEstimate:
    """Solve the intensity relations for (R, I, |w|^2) at strength epsilon.

    The attached sigma_R/sigma_I are first-order propagation with partial
    derivatives taken at the measured intensities.
    """
    _check_invertible(iset, epsilon, overlap_threshold)
    cot = 1.0 / math.tan(epsilon)
    mag2 = (iset.i1 / iset.i0) * cot**2
    r = (iset.i4 - iset.i5) / (2.0 * iset.i0) * cot
    im = (iset.i2 - iset.i3) / (2.0 * iset.i0) * cot
    half_cot = cot / (2.0 * iset.i0)
    sigma_r = math.sqrt(
        (r / iset.i0) ** 2 * iset.sigma_i0**2
        + half_cot**2 * (iset.sigma_i4**2 + iset.sigma_i5**2)
    )
    sigma_i = math.sqrt(
        (im / iset.i0) ** 2 * iset.sigma_i0**2
        + half_cot**2 * (iset.sigma_i2**2 + iset.sigma_i3**2)
    )
    return WeakValueEstimate(R=r, I=im, mag2=mag2, sigma_R=sigma_r, sigma_I=sigma_i)


def theoretical_weak_value(setting: "ExperimentSetting") -> complex:
    """-tan(alpha_i/2) (sin phi + i cos phi) for the planar spin axis."""
    half = setting.alpha_i / 2.0
    if abs(math.cos(half)) < 1e-12:
        raise PostselectionImpossible("preselection orthogonal to postselection")
    t = math.tan(half)
    return complex(-t * math.sin(setting.phi), -t * math.cos(setting.phi))


def projector_weak_values(w: complex) -> tuple[complex, complex]:
    """Weak values of the +/- eigenprojectors; they sum to one exactly."""
    return (1.0 + w) / 2.0, (1.0 - w) / 2.0


def _phi_from_differences(r: float, im: float, d45: float, d23: float, phase_mode: str) -> float:
    if phase_mode == "first_quadrant":
        if d45 == 0.0 and d23 == 0.0:
            return 0.0
        return math.atan2(abs(d45), abs(d23))
    # signed: direction of -(R + iI), which strips the -tan(alpha/2) factor
    # and stays branch-correct across the whole strength period
    if r == 0.0 and im == 0.0:
        return 0.0
    return math.atan2(-r, -im)


def reconstruct_preselection(
    iset: IntensitySet,
    epsilon: float,
    phase_mode: str = "signed",
    overlap_threshold: float = OVERLAP_THRESHOLD,
    noise_floor: float = 0.0,
) -> PreselectionEstimate:
    """Rebuild the preselection state from intensities.

    The state is assembled from the projector weak values on the measured
    spin eigenbasis, with the relative minus sign imposed by postselecting
    on the antidiagonal state; normalization makes it an exact unit vector.
    Attached sigmas are numeric propagation at the measured intensities.
    """
    if phase_mode not in PHASE_MODES:
        raise ValueError(f"phase_mode must be one of {PHASE_MODES}")
    est = invert_weak_value(iset, epsilon, overlap_threshold)
    d45 = iset.i4 - iset.i5
    d23 = iset.i2 - iset.i3
    if abs(d45) <= noise_floor and abs(d23) <= noise_floor and est.mag2 > 1e-12:
        raise IndeterminatePhase("intensity differences vanish but |w| > 0")
    nu = 1.0 / math.sqrt(0.5 + 0.5 * est.mag2)
    alpha = 2.0 * math.atan(math.sqrt(max(est.mag2, 0.0)))
    phi = _phi_from_differences(est.R, est.I, d45, d23, phase_mode)

    w = est.weak_value
    pi_plus, pi_minus = projector_weak_values(w)
    phase = 1j * np.exp(1j * phi)
    n_plus = np.array([1.0, phase], dtype=complex) / np.sqrt(2.0)
    n_minus = np.array([-1.0, phase], dtype=complex) / np.sqrt(2.0)
    vec = pi_plus * n_plus - pi_minus * n_minus
    vec = vec / np.linalg.norm(vec)

    sigmas = _blind_sigmas(iset, epsilon, phase_mode)
    return PreselectionEstimate(
        nu=nu,
        alpha=alpha,
        phi=phi,
        pi_plus=complex(pi_plus),
        pi_minus=complex(pi_minus),
        state=(complex(vec[0]), complex(vec[1])),
        sigma_nu=sigmas[0],
        sigma_alpha=sigmas[1],
        sigma_phi=sigmas[2],
    )


# ---------------------------------------------------------------------------
# parameter maps over the raw intensity vector, for uncertainty propagation

def map_R(epsilon: float) -> Callable[[np.ndarray], float]:
    cot = 1.0 / math.tan(epsilon)

    def f(v: np.ndarray) -> float:
        return (v[4] - v[5]) / (2.0 * v[0]) * cot

    return f


def map_I(epsilon: float) -> Callable[[np.ndarray], float]:
    cot = 1.0 / math.tan(epsilon)

    def f(v: np.ndarray) -> float:
        return (v[2] - v[3]) / (2.0 * v[0]) * cot

    return f


def map_mag2(epsilon: float) -> Callable[[np.ndarray], float]:
    cot2 = (1.0 / math.tan(epsilon)) ** 2

    def f(v: np.ndarray) -> float:
        return (v[1] / v[0]) * cot2

    return f


def map_nu(epsilon: float) -> Callable[[np.ndarray], float]:
    m = map_mag2(epsilon)

    def f(v: np.ndarray) -> float:
        return 1.0 / math.sqrt(0.5 + 0.5 * m(v))

    return f


def map_alpha(epsilon: float) -> Callable[[np.ndarray], float]:
    m = map_mag2(epsilon)

    def f(v: np.ndarray) -> float:
        return 2.0 * math.atan(math.sqrt(m(v)))

    return f


def map_phi(epsilon: float, phase_mode: str = "signed") -> Callable[[np.ndarray], float]:
    r_map, i_map = map_R(epsilon), map_I(epsilon)

    def f(v: np.ndarray) -> float:
        return _phi_from_differences(r_map(v), i_map(v), v[4] - v[5], v[2] - v[3], phase_mode)

    return f


def propagate_uncertainty_closed(
    iset: IntensitySet, setting: "ExperimentSetting"
) -> tuple[float, float]:
    """Closed-form sigma_R, sigma_I with coefficients at the theoretical intensities.

    sigma_R = sec^2(a/2) sqrt(tan^2(a/2) sin^2(phi) / cos^4(e) * s0^2
                              + (s4^2 + s5^2) / sin^2(2e))
    and the same for sigma_I with cos(phi) and (s2, s3).
    """
    eps = setting.epsilon
    if abs(math.sin(2.0 * eps)) <= SINGULAR_ATOL:
        raise SingularStrength(f"sin(2*epsilon) vanishes at epsilon={eps}")
    half = setting.alpha_i / 2.0
    if abs(math.cos(half)) < 1e-12:
        raise PostselectionImpossible("alpha_i = pi has no postselected signal")
    sec2 = 1.0 / math.cos(half) ** 2
    tan2 = math.tan(half) ** 2
    cos4 = math.cos(eps) ** 4
    sin2_2e = math.sin(2.0 * eps) ** 2
    s = iset.sigmas
    sigma_r = sec2 * math.sqrt(
        tan2 * math.sin(setting.phi) ** 2 / cos4 * s[0] ** 2 + (s[4] ** 2 + s[5] ** 2) / sin2_2e
    )
    sigma_i = sec2 * math.sqrt(
        tan2 * math.cos(setting.phi) ** 2 / cos4 * s[0] ** 2 + (s[2] ** 2 + s[3] ** 2) / sin2_2e
    )
    return sigma_r, sigma_i


def _numeric_sigma(f: Callable[[np.ndarray], float], point: np.ndarray, sigmas: np.ndarray) -> float:
    var = 0.0
    for k in range(6):
        if sigmas[k] == 0.0:
            continue
        h = FD_RELATIVE_STEP * max(abs(point[k]), 1e-6)
        hi, lo = point.copy(), point.copy()
        hi[k] += h
        lo[k] -= h
        partial = (f(hi) - f(lo)) / (2.0 * h)
        var += partial**2 * sigmas[k] ** 2
    return math.sqrt(var)


def propagate_uncertainty_numeric(
    f: Callable[[np.ndarray], float],
    iset: IntensitySet,
    setting: "ExperimentSetting",
    eval_at: str = "theory",
) -> float:
    """First-order propagation of ``f`` with central finite differences.

    ``eval_at="theory"`` (the sweep convention) takes the derivatives at the
    setting's theoretical intensities; ``eval_at="measured"`` takes them at
    the measured ones, for blind data with no known setting.
    """
    if abs(math.sin(2.0 * setting.epsilon)) <= SINGULAR_ATOL:
        raise SingularStrength(f"sin(2*epsilon) vanishes at epsilon={setting.epsilon}")
    if eval_at == "theory":
        from .circuits import theoretical_intensities

        point = theoretical_intensities(setting).values
    elif eval_at == "measured":
        point = iset.values
    else:
        raise ValueError("eval_at must be 'theory' or 'measured'")
    return _numeric_sigma(f, point, iset.sigmas)


def _blind_sigmas(iset: IntensitySet, epsilon: float, phase_mode: str) -> tuple[float, float, float]:
    point = iset.values
    return (
        _numeric_sigma(map_nu(epsilon), point, iset.sigmas),
        _numeric_sigma(map_alpha(epsilon), point, iset.sigmas),
        _numeric_sigma(map_phi(epsilon, phase_mode), point, iset.sigmas),
    )


def merit_figures(
    theory: Sequence[float], measured: Sequence[float], sigmas: Sequence[float]
) -> MeritFigures:
    """RMS of the sigmas and RMS of (theory - measured) over one sample."""
    if not (len(theory) == len(measured) == len(sigmas)):
        raise LengthMismatch(
            f"lengths differ: {len(theory)}, {len(measured)}, {len(sigmas)}"
        )
    n = len(theory)
    if n < 1:
        raise EmptyInput("merit figures need at least one sample")
    t = np.asarray(theory, dtype=float)
    m = np.asarray(measured, dtype=float)
    s = np.asarray(sigmas, dtype=float)
    return MeritFigures(
        sigma_bar=float(np.sqrt(np.mean(s**2))),
        delta_bar=float(np.sqrt(np.mean((t - m) ** 2))),
        n=n,
    )


def intensities_from_counts(
    counts_per_rep: Sequence[tuple[ShotCounts, ShotCounts, ShotCounts]],
    shots: int,
    convention: str = "sem",
) -> IntensitySet:
    """Aggregate repeated runs of the three basis circuits into intensities.

    Each repetition holds the shot counts of the (plus/minus, zero/one,
    right/left) pointer-basis circuits; outcomes 00 and 01 of each provide
    one intensity pair. i_k is the mean over repetitions; sigma_i_k is the
    standard error of the mean by default (``convention="sample_sd"`` keeps
    the raw sample standard deviation instead).
    """
    if convention not in SIGMA_CONVENTIONS:
        raise ValueError(f"convention must be one of {SIGMA_CONVENTIONS}")
    if len(counts_per_rep) == 0:
        raise EmptyInput("no repetitions given")
    rows = []
    for rep in counts_per_rep:
        if len(rep) != 3:
            raise LengthMismatch("each repetition must hold three shot-count records")
        row = []
        for sc in rep:
            row.extend([sc.counts[0] / shots, sc.counts[1] / shots])
        rows.append(row)
    data = np.asarray(rows, dtype=float)
    means = data.mean(axis=0)
    if data.shape[0] < 2:
        sig = np.zeros(6)
    else:
        sig = data.std(axis=0, ddof=1)
        if convention == "sem":
            sig = sig / math.sqrt(data.shape[0])
    return IntensitySet.from_arrays(means, sig)
