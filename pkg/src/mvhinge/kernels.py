"""Kernel backend selection.

Prefers the compiled `_kernels` extension; falls back to the numpy/scipy
implementation when the extension was not built. Set MVHINGE_PURE_PYTHON=1
to force the fallback (used by the benchmark and the backend-parity tests).
"""

from __future__ import annotations

import os

if os.environ.get("MVHINGE_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND
contact_mask = _impl.contact_mask
dice_counts = _impl.dice_counts
label_components = _impl.label_components
