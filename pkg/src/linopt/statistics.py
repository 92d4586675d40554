"""Detection statistics: coincidences, anticorrelation, HOM, Monte Carlo counts.

Detectors are ideal threshold detectors: unit efficiency, no dark counts, a
click for one or more photons. Coincidences are counted per frame.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .circuit import compile_circuit, mach_zehnder, random_circuit
from .classical import as_field, output_fractions
from .errors import DimensionError, InvalidParameterError, UndefinedParameterError
from .quantum import fock_evolve, propagate_coherent, single_photon_distribution
from .transfer import embed, make_beam_splitter

#: frames per RNG block; block ``b`` of seed ``s`` uses Philox with key ``(s, b)``
BLOCK_FRAMES = 1 << 16


def _check_pair(modes, i, j):
    if i == j:
        raise InvalidParameterError("coincidences need two distinct detectors")
    for k in (i, j):
        if not 0 <= k < modes:
            raise InvalidParameterError(f"detector {k} out of range for {modes} modes")


def singles_probability(state, i):
    """Probability that detector ``i`` clicks (at least one photon)."""
    if not 0 <= i < state.modes:
        raise InvalidParameterError(f"detector {i} out of range for {state.modes} modes")
    return math.fsum(abs(a) ** 2 for occ, a in state.terms.items() if occ[i] >= 1)


def coincidence_probability(state, i, j):
    """Probability that detectors ``i`` and ``j`` both click."""
    _check_pair(state.modes, i, j)
    return math.fsum(abs(a) ** 2 for occ, a in state.terms.items() if occ[i] >= 1 and occ[j] >= 1)


def click_probabilities(betas):
    """Per-mode click probability ``1 - exp(-|beta|^2)`` for a product coherent state."""
    b = as_field(betas)
    return -np.expm1(-(b.real ** 2 + b.imag ** 2))


def pair_click_probabilities(u, *, in_mode=None, alphas=None, pair=(0, 1)):
    """Return ``(P_i, P_j, P_ij)`` for a single photon or a coherent input.

    Exactly one of ``in_mode`` (single photon into that mode) and ``alphas``
    (product coherent input) must be given. For coherent light the joint
    probability comes from inclusion-exclusion over the two-mode vacuum
    overlaps ``exp(-|b_i|^2)``, ``exp(-|b_j|^2)``, ``exp(-|b_i|^2 - |b_j|^2)``.
    """
    if (in_mode is None) == (alphas is None):
        raise InvalidParameterError("give exactly one of in_mode or alphas")
    i, j = pair
    _check_pair(u.modes, i, j)
    if in_mode is not None:
        occ = [0] * u.modes
        occ[in_mode] = 1
        state = fock_evolve(u, occ)
        return singles_probability(state, i), singles_probability(state, j), coincidence_probability(state, i, j)
    betas = propagate_coherent(u, alphas)
    x = abs(betas[i]) ** 2
    y = abs(betas[j]) ** 2
    p_i = -math.expm1(-x)
    p_j = -math.expm1(-y)
    p_ij = math.expm1(-x - y) - math.expm1(-x) - math.expm1(-y)
    return p_i, p_j, p_ij


def anticorrelation_parameter(u, *, in_mode=None, alphas=None, pair=(0, 1)):
    """``A = P_ij / (P_i P_j)`` for the detector pair.

    ``A = 0`` for a single photon and ``A >= 1`` for any classical field.
    """
    p_i, p_j, p_ij = pair_click_probabilities(u, in_mode=in_mode, alphas=alphas, pair=pair)
    if p_i == 0.0 or p_j == 0.0:
        raise UndefinedParameterError(f"a detector never clicks (P = {p_i!r}, {p_j!r}); A is undefined")
    return p_ij / (p_i * p_j)


def hom_scan(transmittance_grid):
    """Two photons, one per input, through a beam splitter of each ``|t|^2``.

    Returns an ``(K, 4)`` array with columns ``|t|^2, P(1,1), P(2,0), P(0,2)``.
    """
    grid = np.asarray(transmittance_grid, dtype=float).ravel()
    if np.any(~np.isfinite(grid)) or np.any((grid < 0) | (grid > 1)):
        raise InvalidParameterError("transmittances must lie in [0, 1]")
    rows = np.empty((grid.size, 4))
    for k, tt in enumerate(grid):
        u = embed(make_beam_splitter(math.acos(math.sqrt(tt))), [0, 1], 2)
        probs = fock_evolve(u, (1, 1)).probabilities()
        rows[k] = tt, probs[(1, 1)], probs[(2, 0)], probs[(0, 2)]
    return rows


# ---------------------------------------------------------------------------
# Monte Carlo photocounting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CountRecord:
    frames: int
    singles: np.ndarray
    coincidences: np.ndarray
    seed: int = None

    def __post_init__(self):
        s = np.asarray(self.singles, dtype=np.int64)
        c = np.asarray(self.coincidences, dtype=np.int64)
        if c.shape != (s.size, s.size):
            raise DimensionError("coincidence matrix must be M x M")
        if not np.array_equal(c, c.T):
            raise InvalidParameterError("coincidence matrix must be symmetric")
        if np.any(c > np.minimum.outer(s, s)) or np.any(s > self.frames):
            raise InvalidParameterError("counts exceed their bounds")
        object.__setattr__(self, "singles", s)
        object.__setattr__(self, "coincidences", c)

    @property
    def modes(self):
        return self.singles.size

    def rates(self):
        return self.singles / self.frames

    def merge(self, other):
        """Combine two tallies of the same detectors (associative, commutative)."""
        if other.modes != self.modes:
            raise DimensionError("cannot merge records with different detector counts")
        seed = self.seed if self.seed == other.seed else None
        return CountRecord(self.frames + other.frames, self.singles + other.singles,
                           self.coincidences + other.coincidences, seed)


def _block_rng(seed, block):
    return np.random.Generator(np.random.Philox(key=np.array([seed, block], dtype=np.uint64)))


def _sample_block(means, seed, block, n):
    counts = _block_rng(seed, block).poisson(means, size=(n, means.size))
    singles, coinc = kernels.tally_clicks(counts)
    return CountRecord(n, singles, coinc)


def sample_frames(u, alphas, frames, seed, workers=1):
    """Simulate ``frames`` detection frames of a coherent input.

    Each output mode gets an independent Poisson photon number with mean
    ``|beta_i|^2``, ``beta = U alphas``. Frames are split into blocks of
    :data:`BLOCK_FRAMES`; block ``b`` draws from a Philox-4x64 generator keyed
    by ``(seed, b)``, so the result is bit-identical for any ``workers``.
    """
    if frames < 1:
        raise InvalidParameterError("frames must be >= 1")
    if not 0 <= seed < 2 ** 64:
        raise InvalidParameterError("seed must be in [0, 2**64)")
    betas = propagate_coherent(u, alphas)
    means = betas.real ** 2 + betas.imag ** 2
    jobs = [(b, min(BLOCK_FRAMES, frames - b * BLOCK_FRAMES))
            for b in range(math.ceil(frames / BLOCK_FRAMES))]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda job: _sample_block(means, seed, *job), jobs))
    else:
        parts = [_sample_block(means, seed, *job) for job in jobs]
    rec = parts[0]
    for p in parts[1:]:
        rec = rec.merge(p)
    return CountRecord(rec.frames, rec.singles, rec.coincidences, seed)


@dataclass(frozen=True)
class Fringe:
    phase_grid: np.ndarray
    values: np.ndarray
    frames: int = field(default=None, compare=False)

    def __post_init__(self):
        g = np.asarray(self.phase_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.shape != v.shape or g.ndim != 1:
            raise DimensionError("phase grid and values must be 1-D of equal length")
        object.__setattr__(self, "phase_grid", g)
        object.__setattr__(self, "values", v)


def fringe_visibility(fringe):
    """``(max - min) / (max + min)`` over the sampled points."""
    if fringe.values.size < 2:
        raise InvalidParameterError("need at least two fringe samples")
    hi, lo = fringe.values.max(), fringe.values.min()
    if hi + lo == 0:
        raise UndefinedParameterError("fringe is identically zero")
    return (hi - lo) / (hi + lo)


def visibility_sigma(fringe):
    """One-sigma error of :func:`fringe_visibility` for a sampled click fringe.

    Values are click frequencies over ``fringe.frames`` frames. The binomial
    variance uses the add-one estimate ``(k + 1) / (N + 2)`` so that an
    extremum with zero clicks still carries a nonzero error.
    """
    if not fringe.frames:
        raise InvalidParameterError("fringe has no frame count; not a sampled fringe")
    n = fringe.frames
    hi, lo = fringe.values.max(), fringe.values.min()
    s = hi + lo
    if s == 0:
        raise UndefinedParameterError("fringe is identically zero")

    def var(p):
        q = (p * n + 1) / (n + 2)
        return q * (1 - q) / n

    return math.sqrt((2 * lo / s ** 2) ** 2 * var(hi) + (2 * hi / s ** 2) ** 2 * var(lo))


def mz_fringe(mean_photons, phases, frames, seed, detector=0):
    """Click-frequency fringe of a balanced Mach-Zehnder with a coherent input.

    Light of mean photon number ``mean_photons`` enters mode 0; the phase
    ``phi`` scans over ``phases`` and the value recorded is the fraction of
    frames in which ``detector`` clicked. Each phase point draws from its own
    stream, derived from ``(seed, point index)``.
    """
    phases = np.asarray(phases, dtype=float)
    alphas = np.array([math.sqrt(mean_photons), 0.0])
    values = np.empty(phases.size)
    for k, ph in enumerate(phases):
        u = compile_circuit(mach_zehnder(math.pi / 4, math.pi / 4, 0.0, 0.0, ph))
        point_seed = int(np.random.SeedSequence([seed, k]).generate_state(1, np.uint64)[0])
        values[k] = sample_frames(u, alphas, frames, point_seed).rates()[detector]
    return Fringe(phases, values, frames)


# ---------------------------------------------------------------------------
# Single-photon / classical equivalence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceReport:
    trials: int
    max_deviation: float
    worst_trial: int
    worst_mode: int

    def passed(self, tol=1e-10):
        return self.max_deviation <= tol


def equivalence_check(trials, max_modes, seed, max_depth=None):
    """Compare single-photon probabilities with classical output fractions.

    Each trial draws a random circuit of ``1..max_modes`` modes and depth up
    to ``4 M`` (or ``max_depth``), then for every input mode compares
    :func:`single_photon_distribution` with :func:`output_fractions` for a
    unit field in that mode.
    """
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    if max_modes < 1:
        raise InvalidParameterError("max_modes must be >= 1")
    rng = np.random.default_rng(seed)
    worst = (0.0, -1, -1)
    for trial in range(trials):
        m = int(rng.integers(1, max_modes + 1))
        depth = int(rng.integers(0, (4 * m if max_depth is None else max_depth) + 1))
        u = compile_circuit(random_circuit(m, depth, rng))
        for j in range(m):
            unit = np.zeros(m, dtype=complex)
            unit[j] = 1.0
            dev = float(np.max(np.abs(single_photon_distribution(u, j) - output_fractions(u, unit))))
            if dev > worst[0] or worst[1] < 0:
                worst = (dev, trial, j)
    return EquivalenceReport(trials, *worst)
