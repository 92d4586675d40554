"""Hot numeric kernels: Ryser permanents and threshold-detector tallies.

Each kernel exists twice, a numba ``*_numba`` version and a vectorised
``*_numpy`` version. The unsuffixed names dispatch to whichever one
:data:`linopt._accel.USE_NUMBA` selects. Both variants are public so tests
and the benchmark can compare them in one process.
"""
import numpy as np

from ._accel import HAVE_NUMBA, USE_NUMBA, njit

# Upper bound on subsets held in memory at once by the numpy fallbacks.
_SUBSET_CHUNK = 1 << 14


# ---------------------------------------------------------------------------
# Ryser permanent, Gray-code ordered (numba)
# ---------------------------------------------------------------------------


def _ryser_gray_py(a):
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    rowsum = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    size = 0
    prev = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        # column flipped between consecutive Gray codes
        diff = gray ^ prev
        j = 0
        while (diff >> j) & 1 == 0:
            j += 1
        if (gray >> j) & 1:
            for i in range(n):
                rowsum[i] += a[i, j]
            size += 1
        else:
            for i in range(n):
                rowsum[i] -= a[i, j]
            size -= 1
        prev = gray
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= rowsum[i]
        if (n - size) & 1:
            total -= prod
        else:
            total += prod
    return total


def _tally_py(counts):
    frames, modes = counts.shape
    singles = np.zeros(modes, dtype=np.int64)
    coinc = np.zeros((modes, modes), dtype=np.int64)
    clicked = np.empty(modes, dtype=np.bool_)
    for f in range(frames):
        for i in range(modes):
            clicked[i] = counts[f, i] > 0
            if clicked[i]:
                singles[i] += 1
        for i in range(modes):
            if clicked[i]:
                for j in range(i + 1, modes):
                    if clicked[j]:
                        coinc[i, j] += 1
    for i in range(modes):
        coinc[i, i] = singles[i]
        for j in range(i + 1, modes):
            coinc[j, i] = coinc[i, j]
    return singles, coinc


if HAVE_NUMBA:
    _ryser_gray_jit = njit(cache=True)(_ryser_gray_py)

    @njit(cache=True)
    def _ryser_batch_jit(stack):
        out = np.empty(stack.shape[0], dtype=np.complex128)
        for k in range(stack.shape[0]):
            out[k] = _ryser_gray_jit(stack[k])
        return out

    _tally_jit = njit(cache=True)(_tally_py)
else:  # pragma: no cover
    _ryser_gray_jit = _ryser_batch_jit = _tally_jit = None


# ---------------------------------------------------------------------------
# Public variants
# ---------------------------------------------------------------------------


def permanent_numba(a):
    return complex(_ryser_gray_jit(np.ascontiguousarray(a, dtype=np.complex128)))


def permanents_numba(stack):
    return _ryser_batch_jit(np.ascontiguousarray(stack, dtype=np.complex128))


def tally_clicks_numba(counts):
    return _tally_jit(np.ascontiguousarray(counts, dtype=np.int64))


def _subset_masks(n, start, stop):
    ks = np.arange(start, stop, dtype=np.int64)
    return ((ks[:, None] >> np.arange(n)) & 1).astype(np.float64)


def permanents_numpy(stack):
    """Ryser's formula evaluated over all column subsets at once.

    ``stack`` has shape ``(K, n, n)``; returns the ``K`` permanents.
    """
    stack = np.asarray(stack, dtype=np.complex128)
    k, n = stack.shape[0], stack.shape[1]
    if n == 0:
        return np.ones(k, dtype=np.complex128)
    out = np.zeros(k, dtype=np.complex128)
    for s0 in range(1, 1 << n, _SUBSET_CHUNK):
        s1 = min(s0 + _SUBSET_CHUNK, 1 << n)
        masks = _subset_masks(n, s0, s1)
        # keep each (batch, n, subsets) row-sum block near 4M entries
        batch = max(1, (1 << 22) // ((s1 - s0) * n))
        signs = np.where((n - masks.sum(axis=1)) % 2 == 0, 1.0, -1.0)
        for b0 in range(0, k, batch):
            rowsums = stack[b0:b0 + batch] @ masks.T
            out[b0:b0 + batch] += rowsums.prod(axis=1) @ signs
    return out


def permanent_numpy(a):
    a = np.asarray(a, dtype=np.complex128)
    return complex(permanents_numpy(a[None])[0])


def tally_clicks_numpy(counts):
    clicks = (np.asarray(counts) > 0).astype(np.int64)
    return clicks.sum(axis=0), clicks.T @ clicks


if USE_NUMBA:
    permanent = permanent_numba
    permanents = permanents_numba
    tally_clicks = tally_clicks_numba
else:
    permanent = permanent_numpy
    permanents = permanents_numpy
    tally_clicks = tally_clicks_numpy
