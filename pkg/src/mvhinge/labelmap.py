"""Label-grid data model plus region operations.

A LabelMap is a 2-D grid over the three internal labels (background, left
ventricle, left atrium) with physical pixel spacing in mm/px. Operations:
Dice coefficient, cohort Dice, connected components.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .errors import EmptySamples, ShapeMismatch

BG = 0
LV = 1
LA = 2

LABEL_NAMES = {BG: "bg", LV: "lv", LA: "la"}
LABEL_BY_NAME = {"bg": BG, "lv": LV, "la": LA}


class LabelMap:
    """Immutable 2-D chamber-label grid with (sx, sy) spacing in mm/px.

    `labels` is a (height, width) uint8 array; every cell is BG, LV or LA.
    The array is locked after construction, so instances are safe to share
    across threads.
    """

    __slots__ = ("_labels", "_spacing")

    def __init__(self, labels, spacing: tuple[float, float] = (1.0, 1.0)):
        arr = np.array(labels, dtype=np.uint8, copy=True, order="C")
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("labels must be a non-empty 2-D grid")
        if arr.max() > LA:
            bad = int(arr[arr > LA].flat[0])
            raise ValueError(f"cell value {bad} is not a chamber label")
        sx, sy = float(spacing[0]), float(spacing[1])
        if not (sx > 0.0 and sy > 0.0):
            raise ValueError(f"spacing must be strictly positive, got ({sx}, {sy})")
        arr.flags.writeable = False
        object.__setattr__(self, "_labels", arr)
        object.__setattr__(self, "_spacing", (sx, sy))

    def __setattr__(self, name, value):
        raise AttributeError("LabelMap is immutable")

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @property
    def spacing(self) -> tuple[float, float]:
        return self._spacing

    @property
    def width(self) -> int:
        return self._labels.shape[1]

    @property
    def height(self) -> int:
        return self._labels.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabelMap):
            return NotImplemented
        return self._spacing == other._spacing and np.array_equal(
            self._labels, other._labels
        )

    def __hash__(self):
        return hash((self._spacing, self._labels.tobytes()))

    def __repr__(self) -> str:
        return f"LabelMap({self.width}x{self.height}, spacing={self._spacing})"


@dataclass(frozen=True)
class BorderContact:
    top: bool
    bottom: bool
    left: bool
    right: bool


@dataclass(frozen=True)
class Component:
    """One connected region of a single label."""

    label: int
    pixels: frozenset  # of (x, y) pixel coordinates
    touches_border: BorderContact

    @property
    def size(self) -> int:
        return len(self.pixels)


def dice(a: LabelMap, b: LabelMap, label: int) -> float:
    """Dice coefficient 2|A n B| / (|A| + |B|) for one label.

    Both sets empty counts as perfect agreement (1.0).
    """
    if (a.width, a.height) != (b.width, b.height):
        raise ShapeMismatch((a.width, a.height), (b.width, b.height))
    na, nb, ninter = kernels.dice_counts(a.labels, b.labels, label)
    if na + nb == 0:
        return 1.0
    return 2.0 * ninter / (na + nb)


@dataclass(frozen=True)
class DiceSummary:
    values: tuple[float, ...]
    mean: float


def dice_cohort(
    pairs: Iterable[tuple[LabelMap, LabelMap]], label: int
) -> DiceSummary:
    """Per-pair Dice values plus their unweighted mean.

    The mean is the CAMUS-challenge "combined" convention; per-pair values
    are kept so a different pooling can be recomputed downstream.
    """
    values: list[float] = []
    for i, (pred, truth) in enumerate(pairs):
        try:
            values.append(dice(pred, truth, label))
        except ShapeMismatch as exc:
            raise ShapeMismatch(exc.shape_a, exc.shape_b, pair_index=i) from None
    if not values:
        raise EmptySamples("map pairs")
    return DiceSummary(tuple(values), sum(values) / len(values))


def connected_components(
    m: LabelMap, label: int, connectivity: int = 4
) -> list[Component]:
    """Connected regions of `label`, largest first.

    Ties on size break on the smallest (y, x) of each component's minimum
    pixel. Returns [] when the label is absent.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    lab, n = kernels.label_components(m.labels, label, connectivity)
    if n == 0:
        return []
    h, w = lab.shape
    ys, xs = np.nonzero(lab)
    ids = lab[ys, xs]
    order = np.argsort(ids, kind="stable")  # keeps raster order inside groups
    ys, xs, ids = ys[order], xs[order], ids[order]
    starts = np.searchsorted(ids, np.arange(1, n + 2))
    comps: list[tuple[int, tuple[int, int], Component]] = []
    for k in range(n):
        lo, hi = starts[k], starts[k + 1]
        gy, gx = ys[lo:hi], xs[lo:hi]
        pixels = frozenset(zip(gx.tolist(), gy.tolist()))
        border = BorderContact(
            top=bool(gy.min() == 0),
            bottom=bool(gy.max() == h - 1),
            left=bool(gx.min() == 0),
            right=bool(gx.max() == w - 1),
        )
        # raster order puts the minimum (y, x) pixel first in each group
        comps.append(
            ((hi - lo), (int(gy[0]), int(gx[0])), Component(label, pixels, border))
        )
    comps.sort(key=lambda t: (-t[0], t[1]))
    return [c for _, _, c in comps]


def parse_label(name: str) -> int:
    """Label constant for a CLI token like "lv" or "la"."""
    try:
        return LABEL_BY_NAME[name.lower()]
    except KeyError:
        raise ValueError(f"unknown label name {name!r}") from None
