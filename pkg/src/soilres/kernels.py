"""Backend selection for the hot numeric kernels.

The compiled Cython extensions are used when they were built; otherwise the
pure numpy fallbacks take over with identical semantics.  Set
``SOILRES_PURE_PYTHON=1`` before import to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

ANN_CONVERGED = _kernels_py.ANN_CONVERGED
ANN_MAX_ITER = _kernels_py.ANN_MAX_ITER
ANN_STEP_UNDERFLOW = _kernels_py.ANN_STEP_UNDERFLOW
ANN_DIVERGED = _kernels_py.ANN_DIVERGED

_BACKEND = "python"
ann_train = _kernels_py.ann_train
mars_knot_scan = _kernels_py.mars_knot_scan

if os.environ.get("SOILRES_PURE_PYTHON") != "1":
    try:
        from . import _ann_fast, _mars_fast

        ann_train = _ann_fast.ann_train
        mars_knot_scan = _mars_fast.mars_knot_scan
        _BACKEND = "compiled"
    except ImportError:
        pass


def active_backend() -> str:
    """Name of the kernel backend selected at import ("compiled" or "python")."""
    return _BACKEND


def backends() -> dict[str, dict]:
    """All importable backends, for benchmarks and equivalence tests."""
    table = {
        "python": {
            "ann_train": _kernels_py.ann_train,
            "mars_knot_scan": _kernels_py.mars_knot_scan,
        }
    }
    try:
        from . import _ann_fast, _mars_fast

        table["compiled"] = {
            "ann_train": _ann_fast.ann_train,
            "mars_knot_scan": _mars_fast.mars_knot_scan,
        }
    except ImportError:
        pass
    return table
