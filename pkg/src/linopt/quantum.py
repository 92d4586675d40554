"""Quantum propagation: coherent states, Fock states, and displacement.

Input creation operators map as ``a_j^dag -> sum_i U[i, j] b_i^dag``, which is
the Heisenberg-picture reading of the same matrix used for classical fields.
"""
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
import math
import warnings

import numpy as np
import scipy.linalg
import scipy.special

from . import kernels
from .classical import propagate_classical
from .errors import BudgetExceededError, DimensionError, InvalidParameterError
from .transfer import beam_splitter_constraints

NORM_TOL = 1e-10
MAX_PERMANENT = 20
MAX_FOCK_PHOTONS = 6
MAX_FOCK_MODES = 16
DEFAULT_CUTOFF = 40


def _occupation(counts):
    occ = tuple(int(c) for c in counts)
    if any(c < 0 for c in occ):
        raise InvalidParameterError(f"occupations must be non-negative, got {occ}")
    return occ


@dataclass(frozen=True)
class FockBasisVector:
    """Sparse state ``sum_m c_m |m>`` with a fixed photon number.

    ``terms`` maps occupation tuples to complex amplitudes. If ``normalized``
    is set the norm is checked against :data:`NORM_TOL` at construction.
    """

    modes: int
    terms: dict = field(default_factory=dict)
    normalized: bool = False

    def __post_init__(self):
        terms = {_occupation(k): complex(v) for k, v in dict(self.terms).items()}
        totals = {sum(k) for k in terms}
        if any(len(k) != self.modes for k in terms):
            raise DimensionError(f"all occupations must have length {self.modes}")
        if len(totals) > 1:
            raise InvalidParameterError(f"mixed photon numbers {sorted(totals)} in one vector")
        object.__setattr__(self, "terms", terms)
        if self.normalized and abs(self.norm_squared() - 1.0) > NORM_TOL:
            raise InvalidParameterError(f"state flagged normalized has norm^2 {self.norm_squared()!r}")

    @property
    def photons(self):
        return sum(next(iter(self.terms))) if self.terms else 0

    def norm_squared(self):
        return math.fsum(abs(v) ** 2 for v in self.terms.values())

    def probabilities(self):
        return {k: abs(v) ** 2 for k, v in self.terms.items()}

    def amplitude(self, occupation):
        return self.terms.get(_occupation(occupation), 0j)

    def __getitem__(self, occupation):
        return self.amplitude(occupation)

    def __len__(self):
        return len(self.terms)


# ---------------------------------------------------------------------------
# Coherent states
# ---------------------------------------------------------------------------


def propagate_coherent(u, alphas):
    """Output coherent amplitudes for a product coherent input.

    A product of coherent states stays a product of coherent states, with
    amplitudes that combine exactly like classical fields; this is the same
    arithmetic as :func:`~linopt.classical.propagate_classical`.
    """
    return propagate_classical(u, alphas)


def poisson_number_distribution(alpha, n_max):
    """Photon-number probabilities of ``|alpha>`` for ``n = 0..n_max``.

    Returns ``(probs, tail)`` where ``tail = 1 - sum(probs)`` is the mass
    above ``n_max``.
    """
    if n_max < 0:
        raise InvalidParameterError("n_max must be >= 0")
    mean = abs(complex(alpha)) ** 2
    n = np.arange(n_max + 1)
    if mean == 0.0:
        probs = (n == 0).astype(float)
    else:
        log_p = -mean + n * math.log(mean) - scipy.special.gammaln(n + 1)
        probs = np.exp(log_p)
    # survival function; 1 - sum(probs) loses everything below ~1e-16
    tail = float(scipy.special.pdtrc(n_max, mean))
    return probs, tail


def coherent_fock_amplitudes(alpha, n_max):
    """Number-basis amplitudes ``e^{-|a|^2/2} a^n / sqrt(n!)`` up to ``n_max``."""
    alpha = complex(alpha)
    amps = np.empty(n_max + 1, dtype=np.complex128)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    return amps


# ---------------------------------------------------------------------------
# Single photons and Fock states
# ---------------------------------------------------------------------------


def single_photon_distribution(u, in_mode):
    """Detection probabilities ``|U[i, in_mode]|^2`` for one photon."""
    if not 0 <= in_mode < u.modes:
        raise InvalidParameterError(f"input mode {in_mode} out of range for {u.modes} modes")
    col = u.entries[:, in_mode]
    return col.real ** 2 + col.imag ** 2


def permanent(a):
    """Matrix permanent by Ryser's formula in Gray-code order, O(2^n n)."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"permanent needs a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_PERMANENT:
        raise BudgetExceededError(f"permanent limited to n <= {MAX_PERMANENT}, got {a.shape[0]}")
    return kernels.permanent(a)


def occupations(modes, photons):
    """All occupation tuples of ``photons`` bosons in ``modes`` modes."""
    out = []
    for combo in combinations_with_replacement(range(modes), photons):
        occ = [0] * modes
        for i in combo:
            occ[i] += 1
        out.append(tuple(occ))
    return out


def _repeat_index(occ):
    return np.repeat(np.arange(len(occ)), occ)


def _factorial_norm(occ):
    return math.prod(math.factorial(c) for c in occ)


def fock_evolve(u, occupation):
    """Output state for a Fock input through a passive circuit.

    The amplitude of output ``m`` is ``per(U[m-rows, n-cols]) /
    sqrt(prod n_k! prod m_k!)`` where rows and columns are repeated by the
    output and input occupations respectively.
    """
    occ = _occupation(occupation)
    if len(occ) != u.modes:
        raise DimensionError(f"occupation has {len(occ)} modes, circuit has {u.modes}")
    n = sum(occ)
    if n > MAX_FOCK_PHOTONS or u.modes > MAX_FOCK_MODES:
        raise BudgetExceededError(
            f"fock_evolve supports n <= {MAX_FOCK_PHOTONS}, M <= {MAX_FOCK_MODES}; got n={n}, M={u.modes}")
    outs = occupations(u.modes, n)
    cols = u.entries[:, _repeat_index(occ)]
    stack = np.stack([cols[_repeat_index(m)] for m in outs]) if n else np.ones((1, 0, 0))
    perms = kernels.permanents(stack)
    in_norm = _factorial_norm(occ)
    terms = {
        m: p / math.sqrt(in_norm * _factorial_norm(m))
        for m, p in zip(outs, perms)
    }
    return FockBasisVector(u.modes, terms, normalized=True)


def fock_evolve_bruteforce(u, occupation):
    """Reference Fock evolution by expanding the creation-operator polynomial.

    Each input photon in mode ``j`` contributes a factor
    ``sum_i U[i, j] b_i^dag``; the product is multiplied out monomial by
    monomial and ``(b^dag)^m |0> = sqrt(m!) |m>`` applied at the end. No
    permanents are involved.
    """
    occ = _occupation(occupation)
    m = u.modes
    if len(occ) != m:
        raise DimensionError(f"occupation has {len(occ)} modes, circuit has {m}")
    if sum(occ) > 4 or m > 6:
        raise BudgetExceededError("bruteforce oracle limited to n <= 4, M <= 6")
    poly = {(0,) * m: 1 + 0j}
    for j, count in enumerate(occ):
        for _ in range(count):
            nxt = {}
            for mono, c in poly.items():
                for i in range(m):
                    coef = u.entries[i, j]
                    if coef == 0:
                        continue
                    key = mono[:i] + (mono[i] + 1,) + mono[i + 1:]
                    nxt[key] = nxt.get(key, 0j) + c * coef
            poly = nxt
    in_norm = math.sqrt(_factorial_norm(occ))
    terms = {mono: c * math.sqrt(_factorial_norm(mono)) / in_norm for mono, c in poly.items()}
    return FockBasisVector(m, terms)


def evolve_superposition(u, state):
    """Apply ``fock_evolve`` linearly to every term of a fixed-n superposition."""
    out = {}
    for occ, c in state.terms.items():
        for m, a in fock_evolve(u, occ).terms.items():
            out[m] = out.get(m, 0j) + c * a
    return FockBasisVector(u.modes, out)


def two_photon_component_coherent(alpha1, alpha2):
    """Unnormalised two-photon part of ``|alpha1>|alpha2>``.

    The common vacuum factor ``exp(-(|a1|^2 + |a2|^2)/2)`` is dropped.
    """
    a1, a2 = complex(alpha1), complex(alpha2)
    return FockBasisVector(2, {
        (2, 0): a1 * a1 / math.sqrt(2),
        (1, 1): a1 * a2,
        (0, 2): a2 * a2 / math.sqrt(2),
    })


def coincidence_coefficient(t, r, alpha1, alpha2, tol=1e-10):
    """Product of the two output amplitudes, ``(a1 t + a2 r)(a1 r + a2 t)``.

    Expanding ``[(a1 t + a2 r) b1^dag + (a1 r + a2 t) b2^dag]^2 / 2`` gives
    this product as the coefficient of ``b1^dag b2^dag |0>`` (the factor 2
    from the cross term cancels the 1/2), i.e. the unnormalised ``|1,1>``
    amplitude. It vanishes only when one output port gets no light at all.
    """
    power, cross = beam_splitter_constraints(t, r)
    if abs(power - 1.0) > tol or cross > tol:
        raise InvalidParameterError(f"(t, r) = ({t}, {r}) is not a lossless symmetric beam splitter")
    t, r, a1, a2 = complex(t), complex(r), complex(alpha1), complex(alpha2)
    return (a1 * t + a2 * r) * (a1 * r + a2 * t)


# ---------------------------------------------------------------------------
# Truncated single-mode operators
# ---------------------------------------------------------------------------


def annihilation(cutoff):
    """``(N+1) x (N+1)`` lowering operator with ``<n-1|a|n> = sqrt(n)``."""
    return np.diag(np.sqrt(np.arange(1, cutoff + 1)), k=1).astype(np.complex128)


def displacement(alpha, cutoff=DEFAULT_CUTOFF):
    """Truncated ``D(alpha) = exp(alpha a^dag - alpha^* a)`` via ``scipy.linalg.expm``."""
    a = annihilation(cutoff)
    alpha = complex(alpha)
    return scipy.linalg.expm(alpha * a.conj().T - alpha.conjugate() * a)


def displaced_annihilation(alpha, cutoff=DEFAULT_CUTOFF, working_cutoff=None):
    """Return ``D(alpha)^dag a D(alpha)`` on the number basis ``0..cutoff``.

    On the low-lying block (``n <= cutoff / 2``) this should equal
    ``a + alpha I``. The exponential is taken in a larger basis
    ``0..working_cutoff`` (default ``2 * cutoff``) and then projected, since
    displaced states of ``n ~ cutoff / 2`` reach well past ``cutoff``. Warns
    if ``|alpha>`` has more than ``1e-12`` of its number distribution above
    the cutoff, or if ``cutoff < 8 (1 + |alpha|^2)``.
    """
    alpha = complex(alpha)
    if cutoff < 8 * (1 + abs(alpha) ** 2):
        warnings.warn(f"cutoff {cutoff} below 8(1 + |alpha|^2) = {8 * (1 + abs(alpha) ** 2):.3g}",
                      RuntimeWarning, stacklevel=2)
    work = 2 * cutoff if working_cutoff is None else working_cutoff
    if work < cutoff:
        raise InvalidParameterError("working_cutoff must be >= cutoff")
    _, tail = poisson_number_distribution(alpha, cutoff)
    if tail > 1e-12:
        warnings.warn(f"coherent-state tail mass {tail:.2e} beyond cutoff {cutoff}", RuntimeWarning, stacklevel=2)
    if alpha == 0:
        return annihilation(cutoff)
    a = annihilation(work)
    d = displacement(alpha, work)
    return (d.conj().T @ a @ d)[:cutoff + 1, :cutoff + 1]
