"""Contact-line extraction, hinge points, diameter, and centering checks.

The LV contour of the source annotations terminates where the mitral valve
leaflets hinge, so the LV-side pixels touching the LA carry the mitral
plane. The contact line is the set of LV pixels with at least one LA pixel
among their 4-neighbors; its anteriormost (leftmost) pixel is the anterior
hinge point (aMVL) and its posteriormost (rightmost) pixel the posterior
one (pMVL). No component filtering happens by default: the segmentations
are consumed as-is, mirroring the evaluation pipeline upstream.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NoContact
from .labelmap import BG, LA, LV, LabelMap

# reasons reported by diagnose_centering
LA_ABSENT = "LA_absent"
LA_TOUCHES_BOTTOM = "LA_touches_bottom"
LA_TOUCHES_SIDE = "LA_touches_side"
LA_AREA_RATIO_LOW = "LA_area_ratio_low"

DEFAULT_OFFCENTER_RATIO = 0.15


@dataclass(frozen=True)
class ContactLine:
    """LV-side boundary pixels, sorted ascending by (x, y)."""

    pixels: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.pixels:
            raise ValueError("contact line must be non-empty")
        if any(a >= b for a, b in zip(self.pixels, self.pixels[1:])):
            raise ValueError("contact pixels must be strictly sorted by (x, y)")

    def __len__(self) -> int:
        return len(self.pixels)

    def __iter__(self):
        return iter(self.pixels)


@dataclass(frozen=True)
class HingePair:
    """aMVL/pMVL hinge coordinates in px and mm plus the annulus diameter.

    `spacing` records the (sx, sy) used for the mm conversion so error
    computations can verify both pairs came from identically-spaced maps.
    """

    amvl_px: tuple[int, int]
    pmvl_px: tuple[int, int]
    amvl_mm: tuple[float, float]
    pmvl_mm: tuple[float, float]
    diameter_mm: float
    degenerate: bool
    spacing: tuple[float, float]


@dataclass(frozen=True)
class CenteringDiagnosis:
    off_center: bool
    reasons: tuple[str, ...]
    la_area_ratio: float


def _largest_only(labels: np.ndarray, label: int) -> np.ndarray:
    """Zero out all but the largest connected component of `label`."""
    lab, n = kernels.label_components(labels, label, 4)
    if n <= 1:
        return labels
    counts = np.bincount(lab.ravel(), minlength=n + 1)[1:]
    keep = int(counts.argmax()) + 1
    out = labels.copy()
    out[(labels == label) & (lab != keep)] = BG
    return out


def extract_contact_line(
    m: LabelMap, largest_components: bool = False
) -> ContactLine:
    """All LV pixels with an LA 4-neighbor, sorted ascending by (x, y).

    `largest_components` restricts the scan to the largest LV and LA
    components first; off by default since the reference pipeline applies
    no post-processing.
    """
    labels = m.labels
    if largest_components:
        labels = _largest_only(labels, LV)
        labels = _largest_only(labels, LA)
    mask = kernels.contact_mask(labels, LV, LA)
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        raise NoContact()
    order = np.lexsort((ys, xs))
    pixels = tuple(zip(xs[order].tolist(), ys[order].tolist()))
    return ContactLine(pixels)


def make_hinge_pair(
    amvl_px: tuple[int, int],
    pmvl_px: tuple[int, int],
    spacing: tuple[float, float],
) -> HingePair:
    """Assemble a HingePair from pixel coordinates and spacing."""
    sx, sy = float(spacing[0]), float(spacing[1])
    ax, ay = int(amvl_px[0]), int(amvl_px[1])
    px_, py_ = int(pmvl_px[0]), int(pmvl_px[1])
    diameter = math.hypot((px_ - ax) * sx, (py_ - ay) * sy)
    return HingePair(
        amvl_px=(ax, ay),
        pmvl_px=(px_, py_),
        amvl_mm=(ax * sx, ay * sy),
        pmvl_mm=(px_ * sx, py_ * sy),
        diameter_mm=diameter,
        degenerate=(ax, ay) == (px_, py_),
        spacing=(sx, sy),
    )


def extract_hinge_points(
    cl: ContactLine, spacing: tuple[float, float]
) -> HingePair:
    """aMVL = minimum-x contact pixel, pMVL = maximum-x; ties take min y.

    Anterior maps to image-left (+x is posterior). A single-pixel contact
    line yields a degenerate zero-diameter pair rather than an error.
    """
    pixels = cl.pixels
    amvl = pixels[0]
    max_x = pixels[-1][0]
    first_max = bisect_left(pixels, (max_x,))
    pmvl = pixels[first_max]
    return make_hinge_pair(amvl, pmvl, spacing)


def mv_diameter(hp: HingePair) -> float:
    """Mitral annulus diameter in mm (anisotropic Euclidean distance)."""
    return hp.diameter_mm


def diagnose_centering(
    m: LabelMap, ratio_threshold: float = DEFAULT_OFFCENTER_RATIO
) -> CenteringDiagnosis:
    """Heuristic detection of acquisitions cropped around the LV.

    The image counts as off-center when the LA is missing entirely, when
    its largest component runs into the bottom or side image border, or
    when the LA/LV area ratio falls below `ratio_threshold`.
    """
    labels = m.labels
    la_count = int(np.count_nonzero(labels == LA))
    lv_count = int(np.count_nonzero(labels == LV))
    if la_count == 0:
        return CenteringDiagnosis(True, (LA_ABSENT,), 0.0)

    reasons: list[str] = []
    lab, n = kernels.label_components(labels, LA, 4)
    counts = np.bincount(lab.ravel(), minlength=n + 1)[1:]
    biggest = int(counts.argmax()) + 1
    if (lab[-1, :] == biggest).any():
        reasons.append(LA_TOUCHES_BOTTOM)
    if (lab[:, 0] == biggest).any() or (lab[:, -1] == biggest).any():
        reasons.append(LA_TOUCHES_SIDE)

    ratio = la_count / lv_count if lv_count > 0 else math.inf
    if ratio < ratio_threshold:
        reasons.append(LA_AREA_RATIO_LOW)

    return CenteringDiagnosis(bool(reasons), tuple(reasons), ratio)
