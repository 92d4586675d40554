"""Transfer matrices of passive linear optical elements.

Convention used everywhere in the package: amplitudes propagate as column
vectors, ``out = U @ inp``. The same matrix relates output annihilation
operators to input ones, so a single :class:`TransferMatrix` serves both the
classical and the quantum descriptions.

Beam splitters are symmetric with ``t = cos(theta)`` on the diagonal and
``r = i sin(theta)`` off it, both optionally multiplied by a common phase
``exp(i aux_phase)``. Any such pair has ``conj(t) r`` purely imaginary.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DimensionError, InvalidParameterError, NonUnitaryError

#: default unitarity tolerance, max-norm of ``U^H U - I``
UNITARY_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise InvalidParameterError(f"{name} must be finite, got {v!r}")


def unitarity_deviation(a):
    """Return ``max |A^H A - I|`` for a square array."""
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))


@dataclass(frozen=True)
class UnitarityReport:
    max_deviation: float
    tol: float

    @property
    def passed(self):
        return self.max_deviation <= self.tol

    def __bool__(self):
        return self.passed


@dataclass(frozen=True)
class ElementMatrix:
    """A 1x1 (phase) or 2x2 (beam splitter) element before embedding."""

    entries: np.ndarray

    def __post_init__(self):
        a = _frozen(self.entries)
        if a.shape not in ((1, 1), (2, 2)):
            raise DimensionError(f"element must be 1x1 or 2x2, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidParameterError("element entries must be finite")
        object.__setattr__(self, "entries", a)

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def t(self):
        return complex(self.entries[0, 0])

    @property
    def r(self):
        if self.dim != 2:
            raise DimensionError("phase elements have no reflection coefficient")
        return complex(self.entries[0, 1])


@dataclass(frozen=True)
class TransferMatrix:
    """Dense M x M unitary; checked at construction.

    Pass ``tol`` to loosen or tighten the check for one matrix.
    """

    entries: np.ndarray
    tol: float = field(default=UNITARY_TOL, compare=False, repr=False)

    def __post_init__(self):
        a = _frozen(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionError(f"transfer matrix must be square with M >= 1, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidParameterError("transfer matrix entries must be finite")
        dev = unitarity_deviation(a)
        if dev > self.tol:
            raise NonUnitaryError(dev, self.tol)
        object.__setattr__(self, "entries", a)

    @property
    def modes(self):
        return self.entries.shape[0]

    @property
    def H(self):
        """Adjoint (inverse) transfer matrix."""
        return TransferMatrix(self.entries.conj().T, self.tol)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __matmul__(self, other):
        if isinstance(other, TransferMatrix):
            return compose(self, other)
        return NotImplemented

    @classmethod
    def identity(cls, modes):
        return cls(np.eye(modes, dtype=np.complex128))


def make_beam_splitter(theta, aux_phase=0.0):
    """Symmetric beam splitter.

    Parameters
    ----------
    theta : float
        Mixing angle in radians; ``|t|^2 = cos(theta)^2``.
    aux_phase : float
        Common phase applied to both ``t`` and ``r``.

    Returns
    -------
    ElementMatrix
        ``[[t, r], [r, t]]`` with ``t = cos(theta) e^{i aux}``,
        ``r = i sin(theta) e^{i aux}``.
    """
    _check_finite(theta=theta, aux_phase=aux_phase)
    g = complex(math.cos(aux_phase), math.sin(aux_phase))
    t = math.cos(theta) * g
    r = 1j * math.sin(theta) * g
    return ElementMatrix(np.array([[t, r], [r, t]]))


def make_phase(phi):
    """Single-mode phase shift ``e^{i phi}``; also used for path lengths ``kL``."""
    _check_finite(phi=phi)
    return ElementMatrix(np.array([[complex(math.cos(phi), math.sin(phi))]]))


def validate_unitary(u, tol=UNITARY_TOL):
    """Report ``max |U^H U - I|`` and whether it is within ``tol``.

    Accepts anything array-like, including matrices that would be rejected by
    the :class:`TransferMatrix` constructor. Never raises for non-unitary input.
    """
    a = np.asarray(u.entries if hasattr(u, "entries") else u, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return UnitarityReport(unitarity_deviation(a), tol)


def beam_splitter_constraints(t, r):
    """Return ``(|t|^2 + |r|^2, |t* r + r* t|)`` for a symmetric beam splitter."""
    t, r = complex(t), complex(r)
    return abs(t) ** 2 + abs(r) ** 2, abs(t.conjugate() * r + r.conjugate() * t)


def embed(element, modes, m):
    """Lift a 1- or 2-mode element onto ``m`` modes, identity elsewhere."""
    e = element.entries if isinstance(element, ElementMatrix) else ElementMatrix(element).entries
    idx = [int(i) for i in modes]
    if len(idx) != e.shape[0]:
        raise DimensionError(f"element acts on {e.shape[0]} modes, got {len(idx)} indices")
    if len(set(idx)) != len(idx):
        raise InvalidParameterError(f"repeated mode index in {idx}")
    for i in idx:
        if not 0 <= i < m:
            raise InvalidParameterError(f"mode index {i} out of range for {m} modes")
    u = np.eye(m, dtype=np.complex128)
    u[np.ix_(idx, idx)] = e
    return TransferMatrix(u)


def compose(later, earlier):
    """Return the matrix of ``earlier`` followed by ``later`` (``later @ earlier``)."""
    if later.modes != earlier.modes:
        raise DimensionError(f"cannot compose {later.modes}-mode and {earlier.modes}-mode matrices")
    return TransferMatrix(later.entries @ earlier.entries, max(later.tol, earlier.tol))


def random_unitary(m, rng):
    """Haar-random ``m x m`` unitary (QR of a complex Ginibre matrix)."""
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return TransferMatrix(q * (d / np.abs(d)))
