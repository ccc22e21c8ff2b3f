"""Typed errors raised across the package. All derive from ValueError."""


class WeakValueLabError(ValueError):
    """Base class for every error this package raises on bad input or data."""


class DimensionMismatch(WeakValueLabError):
    """Gate or operator does not fit the state it is applied to."""


class InvalidProbabilities(WeakValueLabError):
    """Probability table is negative or does not sum to one."""


class InvalidNoiseModel(WeakValueLabError):
    """Noise parameters outside their physical range (e.g. T2 > 2*T1)."""


class PostselectionImpossible(WeakValueLabError):
    """Pre- and postselection states are orthogonal; no intensity survives."""


class ZeroPostselectionOverlap(WeakValueLabError):
    """Measured i0 is below the overlap threshold; inversion would diverge."""


class SingularStrength(WeakValueLabError):
    """sin(2*epsilon) vanishes; the intensity map is not invertible here."""


class IndeterminatePhase(WeakValueLabError):
    """Both intensity differences vanish while the weak value is nonzero."""


class LengthMismatch(WeakValueLabError):
    """Parallel sequences of unequal length."""


class EmptyInput(WeakValueLabError):
    """An aggregate was requested over zero records."""


class NonUnitaryInput(WeakValueLabError):
    """A matrix that must be unitary is not, beyond tolerance."""
