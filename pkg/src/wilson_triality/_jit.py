"""numba switch.

Set ``WILSON_TRIALITY_DISABLE_NUMBA=1`` to force the pure-numpy kernels even
when numba is importable.
"""

import os

DISABLED = os.environ.get("WILSON_TRIALITY_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if DISABLED:
        raise ImportError
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator


def use_numba() -> bool:
    return NUMBA_AVAILABLE
