"""Optional numba acceleration.

Set ``LINOPT_DISABLE_NUMBA=1`` before import to force the pure-numpy kernels.
"""
import os

_FALSEY = {"", "0", "false", "no", "off"}


def _noop_jit(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(f):
        return f

    return wrap


try:
    import numba  # noqa: F401
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dep in CI
    njit = _noop_jit
    HAVE_NUMBA = False

DISABLED = os.environ.get("LINOPT_DISABLE_NUMBA", "").strip().lower() not in _FALSEY

# True when the compiled kernels are the default dispatch target
USE_NUMBA = HAVE_NUMBA and not DISABLED
