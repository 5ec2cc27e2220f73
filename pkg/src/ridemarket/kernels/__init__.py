"""Kernel backend selection.

The hot inner-loop primitives (sigmoid learning steps, logit, nearest-idle
scan) exist twice: a compiled Cython core and a pure-Python fallback.  The
compiled core is used when it was built; ``RIDEMARKET_BACKEND=pure`` forces
the fallback (used by the benchmark and the backend-parity tests).
"""

import os

from ridemarket.kernels import pure as _pure

_forced = os.environ.get("RIDEMARKET_BACKEND", "").strip().lower()

if _forced == "pure":
    _impl = _pure
else:
    try:
        from ridemarket.kernels import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _forced == "compiled":
            raise ImportError(
                "RIDEMARKET_BACKEND=compiled but the extension is not built; "
                "run `python setup.py build_ext --inplace`"
            )
        _impl = _pure

BACKEND = _impl.BACKEND_NAME

sigmoid = _impl.sigmoid
inverse_sigmoid = _impl.inverse_sigmoid
step_cu = _impl.step_cu
logit = _impl.logit
nearest_of = _impl.nearest_of
