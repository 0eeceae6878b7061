"""Select the integrator kernel at import time.

The compiled extension is preferred; the pure-Python reference is the
fallback. ``VISCOJOINT_BACKEND=python`` forces the fallback (used by the
parity tests and the backend benchmark).
"""

import os

_forced = os.environ.get("VISCOJOINT_BACKEND", "").lower()

if _forced == "python":
    from . import _reference as kernel
    BACKEND = "python"
elif _forced in ("", "compiled"):
    try:
        from . import _speedups as kernel  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        if _forced == "compiled":
            raise
        from . import _reference as kernel  # type: ignore[no-redef]
        BACKEND = "python"
else:
    raise ValueError(f"unknown VISCOJOINT_BACKEND {_forced!r}")

simulate_arrays = kernel.simulate_arrays
