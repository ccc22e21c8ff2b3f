"""Strength sweeps reproducing the full measurement protocol.

For every grid strength epsilon and every sampled spin angle phi, the three
basis circuits are simulated (statevector when no noise model is set,
density matrix otherwise), shot-sampled ``repetitions`` times with
``shots`` shots each, aggregated into intensities, inverted, and the
preselection state reconstructed. Per strength, the precision proxy
sigma_bar (RMS of propagated uncertainties) and the accuracy proxy
delta_bar (RMS theory-experiment deviation) are reported for each of the
five parameters R, I, nu, alpha, phi.

Determinism: every (epsilon, phi, basis, repetition) task owns a seed
derived from the master seed by a splitmix64 hash of the packed indices
(an injective map, since splitmix64's output mix is a bijection on 64-bit
words), so results are identical across runs and thread counts.

``shots = 0`` is the exact-probability sentinel: intensities are taken
directly from the simulated distribution with zero uncertainty.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .circuits import (
    ExperimentSetting,
    PointerBasis,
    build_measurement_circuit,
    theoretical_weak_value,
)
from .errors import IndeterminatePhase, SingularStrength, ZeroPostselectionOverlap
from .estimator import (
    PHASE_MODES,
    SIGMA_CONVENTIONS,
    SINGULAR_ATOL,
    IntensitySet,
    intensities_from_counts,
    invert_weak_value,
    map_alpha,
    map_nu,
    map_phi,
    merit_figures,
    propagate_uncertainty_closed,
    propagate_uncertainty_numeric,
    reconstruct_preselection,
)
from .noise import DensityMatrix, NoiseModel, noisy_run, readout_probabilities
from .statevector import StateVector, outcome_probabilities, run_circuit, sample_shots

_STEP = math.pi / 24.0
#: 24 strengths: pi/24-spaced with the two points that would land on the
#: singular set {pi/2, pi} replaced by half-step neighbours. Contains the
#: classic weak/strong comparison pair pi/24 and pi/4 exactly.
DEFAULT_EPSILON_GRID: tuple[float, ...] = tuple(
    [k * _STEP for k in range(1, 12)]
    + [11.5 * _STEP]
    + [k * _STEP for k in range(13, 24)]
    + [23.5 * _STEP]
)

MERIT_PARAMETERS = ("R", "I", "nu", "alpha", "phi")

_BASES = (PointerBasis.PLUS_MINUS, PointerBasis.ZERO_ONE, PointerBasis.RIGHT_LEFT)

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_task_seed(
    master_seed: int,
    epsilon_index: int,
    phi_index: int,
    basis_index: int,
    repetition_index: int,
) -> int:
    """Injective per-task seed: mix(mix(master) xor packed indices)."""
    for name, v, width in (
        ("epsilon_index", epsilon_index, 16),
        ("phi_index", phi_index, 16),
        ("basis_index", basis_index, 8),
        ("repetition_index", repetition_index, 16),
    ):
        if not 0 <= v < (1 << width):
            raise ValueError(f"{name}={v} outside [0, 2^{width})")
    packed = (
        (epsilon_index << 40) | (phi_index << 24) | (basis_index << 16) | repetition_index
    )
    return _splitmix64(_splitmix64(master_seed & _MASK64) ^ packed)


_CONFIG_FIELDS = (
    "epsilon_grid",
    "phi_samples",
    "alpha_i",
    "shots",
    "repetitions",
    "master_seed",
    "noise",
    "phase_mode",
    "sigma_convention",
)


@dataclass(frozen=True)
class SweepConfig:
    epsilon_grid: tuple[float, ...] = DEFAULT_EPSILON_GRID
    phi_samples: int = 9
    alpha_i: float = math.pi / 4.0
    shots: int = 2000
    repetitions: int = 20
    master_seed: int = 12345
    noise: Optional[NoiseModel] = None
    phase_mode: str = "first_quadrant"
    sigma_convention: str = "sem"

    def __post_init__(self):
        object.__setattr__(self, "epsilon_grid", tuple(float(e) for e in self.epsilon_grid))
        if not self.epsilon_grid:
            raise ValueError("epsilon_grid must not be empty")
        for e in self.epsilon_grid:
            if not math.isfinite(e) or abs(math.sin(2.0 * e)) <= SINGULAR_ATOL:
                raise ValueError(
                    f"epsilon={e} sits on the singular set (multiples of pi/2)"
                )
        if self.phi_samples < 1:
            raise ValueError("phi_samples must be >= 1")
        if self.shots < 0:
            raise ValueError("shots must be >= 1, or 0 for exact probabilities")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not math.isfinite(self.alpha_i):
            raise ValueError("alpha_i must be finite")
        if abs(math.cos(self.alpha_i / 2.0)) < 1e-12:
            raise ValueError("alpha_i = pi leaves no postselected signal")
        if self.phase_mode not in PHASE_MODES:
            raise ValueError(f"phase_mode must be one of {PHASE_MODES}")
        if self.sigma_convention not in SIGMA_CONVENTIONS:
            raise ValueError(f"sigma_convention must be one of {SIGMA_CONVENTIONS}")

    @property
    def exact(self) -> bool:
        return self.shots == 0

    @property
    def phi_grid(self) -> tuple[float, ...]:
        n = self.phi_samples
        if n == 1:
            return (0.0,)
        return tuple(-math.pi + 2.0 * math.pi * j / (n - 1) for j in range(n))

    def to_dict(self) -> dict:
        return {
            "epsilon_grid": list(self.epsilon_grid),
            "phi_samples": self.phi_samples,
            "alpha_i": self.alpha_i,
            "shots": self.shots,
            "repetitions": self.repetitions,
            "master_seed": self.master_seed,
            "noise": None if self.noise is None else self.noise.to_dict(),
            "phase_mode": self.phase_mode,
            "sigma_convention": self.sigma_convention,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        unknown = set(d) - set(_CONFIG_FIELDS)
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(d)
        if "epsilon_grid" in kwargs:
            kwargs["epsilon_grid"] = tuple(kwargs["epsilon_grid"])
        if kwargs.get("noise") is not None:
            kwargs["noise"] = NoiseModel.from_dict(kwargs["noise"])
        return cls(**kwargs)


@dataclass
class SweepRow:
    """One (epsilon, phi) estimate; estimate fields are None on error."""

    epsilon: float
    phi_target: float
    alpha_i: float
    R_t: float
    I_t: float
    R_m: Optional[float] = None
    I_m: Optional[float] = None
    mag2_m: Optional[float] = None
    sigma_R: Optional[float] = None
    sigma_I: Optional[float] = None
    nu_m: Optional[float] = None
    sigma_nu: Optional[float] = None
    alpha_m: Optional[float] = None
    sigma_alpha: Optional[float] = None
    phi_m: Optional[float] = None
    sigma_phi: Optional[float] = None
    i0: Optional[float] = None
    i1: Optional[float] = None
    i2: Optional[float] = None
    i3: Optional[float] = None
    i4: Optional[float] = None
    i5: Optional[float] = None
    sigma_i0: Optional[float] = None
    sigma_i1: Optional[float] = None
    sigma_i2: Optional[float] = None
    sigma_i3: Optional[float] = None
    sigma_i4: Optional[float] = None
    sigma_i5: Optional[float] = None
    seed: int = 0
    error: str = ""


CSV_COLUMNS = (
    "epsilon",
    "phi_target",
    "alpha_i",
    "R_t",
    "I_t",
    "R_m",
    "I_m",
    "mag2_m",
    "sigma_R",
    "sigma_I",
    "nu_m",
    "sigma_nu",
    "alpha_m",
    "sigma_alpha",
    "phi_m",
    "sigma_phi",
    "i0",
    "i1",
    "i2",
    "i3",
    "i4",
    "i5",
    "sigma_i0",
    "sigma_i1",
    "sigma_i2",
    "sigma_i3",
    "sigma_i4",
    "sigma_i5",
    "seed",
    "error",
)


@dataclass(frozen=True)
class MeritRow:
    epsilon: float
    parameter: str
    sigma_bar: float
    delta_bar: float


def folded_phi(phi: float) -> float:
    """First-quadrant image of a phase: arctan|tan(phi)| in [0, pi/2]."""
    return math.atan2(abs(math.sin(phi)), abs(math.cos(phi)))


def wrap_angle(x: float) -> float:
    """Wrap to (-pi, pi]."""
    y = math.fmod(x + math.pi, 2.0 * math.pi)
    if y <= 0.0:
        y += 2.0 * math.pi
    return y - math.pi


def _simulate_intensities(cfg: SweepConfig, ei: int, pj: int, setting) -> tuple[IntensitySet, int]:
    probs = []
    for basis in _BASES:
        circuit = build_measurement_circuit(setting, basis)
        if cfg.noise is None:
            state = run_circuit(circuit, StateVector.zero(2))
            probs.append(outcome_probabilities(state))
        else:
            rho = noisy_run(circuit, DensityMatrix.from_state(StateVector.zero(2)), cfg.noise)
            probs.append(readout_probabilities(rho, cfg.noise))
    row_seed = derive_task_seed(cfg.master_seed, ei, pj, 0, 0)
    if cfg.exact:
        values = np.array([probs[b][o] for b in range(3) for o in (0, 1)])
        if np.min(values) < -1e-9:
            raise ValueError(f"negative probability {np.min(values)} from simulation")
        return IntensitySet.from_arrays(np.clip(values, 0.0, 1.0)), row_seed
    reps = []
    for r in range(cfg.repetitions):
        triple = tuple(
            sample_shots(probs[b], cfg.shots, derive_task_seed(cfg.master_seed, ei, pj, b, r))
            for b in range(3)
        )
        reps.append(triple)
    return intensities_from_counts(reps, cfg.shots, cfg.sigma_convention), row_seed


def _evaluate_point(cfg: SweepConfig, ei: int, pj: int) -> SweepRow:
    eps = cfg.epsilon_grid[ei]
    phi = cfg.phi_grid[pj]
    setting = ExperimentSetting(eps, phi, cfg.alpha_i)
    w_t = theoretical_weak_value(setting)
    iset, row_seed = _simulate_intensities(cfg, ei, pj, setting)
    row = SweepRow(
        epsilon=eps,
        phi_target=phi,
        alpha_i=cfg.alpha_i,
        R_t=w_t.real,
        I_t=w_t.imag,
        seed=row_seed,
    )
    for k, (v, s) in enumerate(zip(iset.values, iset.sigmas)):
        setattr(row, f"i{k}", float(v))
        setattr(row, f"sigma_i{k}", float(s))
    try:
        est = invert_weak_value(iset, eps)
        sigma_r, sigma_i = propagate_uncertainty_closed(iset, setting)
        pre = reconstruct_preselection(iset, eps, cfg.phase_mode)
        row.R_m, row.I_m, row.mag2_m = est.R, est.I, est.mag2
        row.sigma_R, row.sigma_I = sigma_r, sigma_i
        row.nu_m, row.alpha_m, row.phi_m = pre.nu, pre.alpha, pre.phi
        row.sigma_nu = propagate_uncertainty_numeric(map_nu(eps), iset, setting)
        row.sigma_alpha = propagate_uncertainty_numeric(map_alpha(eps), iset, setting)
        row.sigma_phi = propagate_uncertainty_numeric(
            map_phi(eps, cfg.phase_mode), iset, setting
        )
    except (ZeroPostselectionOverlap, SingularStrength, IndeterminatePhase) as exc:
        row.error = type(exc).__name__
    return row


def _merits_for_strength(cfg: SweepConfig, eps: float, rows: list[SweepRow]) -> list[MeritRow]:
    valid = [r for r in rows if not r.error]
    if not valid:
        return []
    nu_t = math.sqrt(2.0) * math.cos(cfg.alpha_i / 2.0)
    out = []
    for param in MERIT_PARAMETERS:
        theory, measured, sigmas = [], [], []
        for r in valid:
            if param == "R":
                t, m, s = r.R_t, r.R_m, r.sigma_R
            elif param == "I":
                t, m, s = r.I_t, r.I_m, r.sigma_I
            elif param == "nu":
                t, m, s = nu_t, r.nu_m, r.sigma_nu
            elif param == "alpha":
                t, m, s = cfg.alpha_i, r.alpha_m, r.sigma_alpha
            else:
                if cfg.phase_mode == "first_quadrant":
                    t, m, s = folded_phi(r.phi_target), r.phi_m, r.sigma_phi
                else:
                    t = r.phi_target
                    m = t - wrap_angle(t - r.phi_m)  # angular residual
                    s = r.sigma_phi
            theory.append(t)
            measured.append(m)
            sigmas.append(s)
        mf = merit_figures(theory, measured, sigmas)
        out.append(MeritRow(eps, param, mf.sigma_bar, mf.delta_bar))
    return out


def run_sweep(cfg: SweepConfig, threads: int = 1) -> tuple[list[SweepRow], list[MeritRow]]:
    """Evaluate the whole grid; deterministic for a fixed config and seed."""
    points = [(ei, pj) for ei in range(len(cfg.epsilon_grid)) for pj in range(len(cfg.phi_grid))]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda ep: _evaluate_point(cfg, *ep), points))
    else:
        rows = [_evaluate_point(cfg, ei, pj) for ei, pj in points]
    merits = []
    n_phi = len(cfg.phi_grid)
    for ei, eps in enumerate(cfg.epsilon_grid):
        merits.extend(_merits_for_strength(cfg, eps, rows[ei * n_phi : (ei + 1) * n_phi]))
    return rows, merits


# ---------------------------------------------------------------------------
# serialization

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def rows_to_csv(rows: list[SweepRow]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join(_cell(getattr(r, c)) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def emit_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


def _row_dict(r: SweepRow) -> dict:
    return {c: getattr(r, c) for c in CSV_COLUMNS}


def sweep_document(cfg: SweepConfig, rows: list[SweepRow], merits: list[MeritRow]) -> dict:
    return {
        "config": cfg.to_dict(),
        "rows": [_row_dict(r) for r in rows],
        "merits": [
            {
                "epsilon": m.epsilon,
                "parameter": m.parameter,
                "sigma_bar": m.sigma_bar,
                "delta_bar": m.delta_bar,
            }
            for m in merits
        ],
        "version": __version__,
    }


def emit_json(cfg: SweepConfig, rows: list[SweepRow], merits: list[MeritRow], path) -> None:
    with open(path, "w", newline="") as fh:
        json.dump(sweep_document(cfg, rows, merits), fh, indent=2)
        fh.write("\n")


def load_sweep_document(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    for key in ("config", "rows", "merits", "version"):
        if key not in doc:
            raise ValueError(f"not a sweep document: missing {key!r}")
    return doc


def merit_series(merits) -> dict[str, list[tuple[float, Optional[float], Optional[float]]]]:
    """Per-parameter (epsilon, ln sigma_bar, ln delta_bar) series, sorted by epsilon.

    Nonpositive metric values (exact mode) have no logarithm and map to None.
    """

    def ln(x):
        return math.log(x) if x is not None and x > 0.0 else None

    series: dict[str, list] = {p: [] for p in MERIT_PARAMETERS}
    for m in merits:
        if isinstance(m, dict):
            series[m["parameter"]].append((m["epsilon"], ln(m["sigma_bar"]), ln(m["delta_bar"])))
        else:
            series[m.parameter].append((m.epsilon, ln(m.sigma_bar), ln(m.delta_bar)))
    for p in series:
        series[p].sort(key=lambda rec: rec[0])
    return series
