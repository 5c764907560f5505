"""Pure-Python (numpy/scipy) kernel backend.

Same call signatures as the compiled `_kernels` extension; used when the
extension is unavailable or when MVHINGE_PURE_PYTHON is set.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

BACKEND = "python"

_STRUCT4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCT8 = np.ones((3, 3), dtype=bool)


def contact_mask(labels: np.ndarray, lv: int, la: int) -> np.ndarray:
    """Mask of `lv` pixels with at least one `la` 4-neighbor."""
    is_lv = labels == lv
    is_la = labels == la
    near_la = np.zeros_like(is_la)
    near_la[:-1, :] |= is_la[1:, :]
    near_la[1:, :] |= is_la[:-1, :]
    near_la[:, :-1] |= is_la[:, 1:]
    near_la[:, 1:] |= is_la[:, :-1]
    return (is_lv & near_la).astype(np.uint8)


def dice_counts(a: np.ndarray, b: np.ndarray, label: int) -> tuple[int, int, int]:
    """Pixel counts (|A|, |B|, |A n B|) for the given label."""
    am = a == label
    bm = b == label
    return (
        int(np.count_nonzero(am)),
        int(np.count_nonzero(bm)),
        int(np.count_nonzero(am & bm)),
    )


def label_components(labels: np.ndarray, target: int, connectivity: int) -> tuple[np.ndarray, int]:
    """Component ids (int32, 0 = not target, 1..k) and the component count."""
    mask = labels == target
    structure = _STRUCT4 if connectivity == 4 else _STRUCT8
    lab, n = ndimage.label(mask, structure=structure)
    return lab.astype(np.int32, copy=False), int(n)
