"""Classical field amplitudes through a compiled circuit."""
import numpy as np

from .errors import DimensionError, InvalidParameterError


def as_field(amplitudes):
    """Coerce to a finite 1-D complex vector (a ``CoherentField``)."""
    a = np.asarray(amplitudes, dtype=np.complex128)
    if a.ndim != 1:
        raise DimensionError(f"field must be a 1-D vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidParameterError("field amplitudes must be finite")
    return a


def propagate_classical(u, amplitudes):
    """Output field amplitudes ``U @ a``."""
    a = as_field(amplitudes)
    if a.shape[0] != u.modes:
        raise DimensionError(f"field has {a.shape[0]} modes, circuit has {u.modes}")
    return u.entries @ a


def intensities(amplitudes):
    """Per-mode intensity ``|a|^2`` in dimensionless units."""
    a = as_field(amplitudes)
    return a.real ** 2 + a.imag ** 2


def output_fractions(u, amplitudes):
    """Fraction of the total output intensity found in each output port."""
    out = intensities(propagate_classical(u, amplitudes))
    total = out.sum()
    if total == 0.0:
        raise InvalidParameterError("input field is zero; output fractions are undefined")
    return out / total
