"""Weak values of a two-qubit Pauli measurement at arbitrary strength.

Simulation (with and without device noise), intensity inversion,
preselection-state reconstruction, uncertainty propagation, and the
precision/accuracy sweep protocol, plus a Jones-calculus check of the
equivalent all-optical interferometer.
"""

__version__ = "0.1.0"

from .circuits import (
    ExperimentSetting,
    PointerBasis,
    build_measurement_circuit,
    evolution_closed_form,
    theoretical_intensities,
    verify_decomposition,
)
from .errors import (
    DimensionMismatch,
    EmptyInput,
    IndeterminatePhase,
    InvalidNoiseModel,
    InvalidProbabilities,
    LengthMismatch,
    NonUnitaryInput,
    PostselectionImpossible,
    SingularStrength,
    WeakValueLabError,
    ZeroPostselectionOverlap,
)
from .estimator import (
    IntensitySet,
    MeritFigures,
    PreselectionEstimate,
    WeakValueEstimate,
    intensities_from_counts,
    invert_weak_value,
    merit_figures,
    projector_weak_values,
    propagate_uncertainty_closed,
    propagate_uncertainty_numeric,
    reconstruct_preselection,
    theoretical_weak_value,
)
from .noise import (
    DensityMatrix,
    KrausChannel,
    NoiseModel,
    apply_channel,
    channel_for_gate,
    noisy_run,
    paper_noise_model,
    readout_probabilities,
)
from .optics import (
    OpticalAxisVector,
    WavePlate,
    interferometer_unitary,
    phase_aligned_distance,
    plate_matrix,
    ua_adjoint_from_plates,
    ua_exponential,
    ua_from_plates,
)
from .statevector import (
    Circuit,
    ShotCounts,
    StateVector,
    apply_gate,
    circuit_unitary,
    outcome_probabilities,
    run_circuit,
    sample_shots,
)
from .sweep import (
    DEFAULT_EPSILON_GRID,
    MeritRow,
    SweepConfig,
    SweepRow,
    derive_task_seed,
    emit_csv,
    emit_json,
    run_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
