"""JIT switch.

Set ``TASTELEAK_DISABLE_JIT=1`` to run every kernel on its pure-numpy path.
Numba is also skipped silently when it cannot be imported.
"""

import os

_FLAG = os.environ.get("TASTELEAK_DISABLE_JIT", "").strip().lower()
JIT_REQUESTED = _FLAG not in ("1", "true", "yes", "on")

try:
    if not JIT_REQUESTED:
        raise ImportError
    import numba as nb

    JIT_ENABLED = True
except ImportError:
    nb = None
    JIT_ENABLED = False


def njit(*args, **kwargs):
    if JIT_ENABLED:
        return nb.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda func: func
