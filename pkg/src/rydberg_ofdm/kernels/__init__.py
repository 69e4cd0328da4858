"""Hot-kernel backend selection.

The compiled extension is preferred when it imported cleanly; the pure
numpy/Python fallback is always available. Set RYDBERG_SIM_FORCE_PY=1 to
force the fallback (used by the benchmark and the parity tests).
"""

import os

from . import _kernels_py

if os.environ.get("RYDBERG_SIM_FORCE_PY") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

random_walk_gain = _impl.random_walk_gain
eit_transmission = _impl.eit_transmission
qam_hard_demap = _impl.qam_hard_demap

__all__ = [
    "BACKEND",
    "eit_transmission",
    "qam_hard_demap",
    "random_walk_gain",
]
