"""Synthetic LV/LA label maps with analytically known hinge geometry.

The LV body is a half-ellipse sitting above a horizontal LV-LA interface
row; the interface spans exactly the columns between the two hinge points,
and the LA fills a band of rows below it. With zero jitter the contact
line is that interface row, so the constructed hinge points are exact by
definition and serve as the ground-truth oracle for the whole pipeline.

Cohort generation perturbs the hinge columns and interface heights of a
"prediction" copy by integer pixels drawn from a per-cell error model, so
a generated cohort's systematic bias is known by construction. Per-point
vertical shifts tilt the interface linearly between the hinge columns;
the tilt slope stays <= 1 px/column so the rasterized interface steps by
at most one pixel and extraction remains exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from typing import Mapping

import numpy as np

from .errors import SpecOutOfBounds
from .hinge import (
    LA_ABSENT,
    LA_AREA_RATIO_LOW,
    LA_TOUCHES_BOTTOM,
    LA_TOUCHES_SIDE,
    DEFAULT_OFFCENTER_RATIO,
    CenteringDiagnosis,
    HingePair,
    make_hinge_pair,
)
from .labelmap import BG, LA, LV, LabelMap


@dataclass(frozen=True)
class PhantomSpec:
    """Geometry of one synthetic map; all coordinates in pixels."""

    width: int = 700
    height: int = 1000
    spacing: tuple[float, float] = (0.3, 0.15)
    lv_center_x: int = 350
    lv_apex_y: int = 240
    lv_semi_x: int = 180
    contact_y: int = 640
    hinge_x_left: int = 300
    hinge_x_right: int = 400
    la_depth: int = 250
    mis_center: int = 0
    jitter_seed: int = 0
    jitter_amp: int = 0

    def to_json(self) -> str:
        doc = asdict(self)
        doc["spacing"] = list(self.spacing)
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: Mapping) -> "PhantomSpec":
        known = {f for f in cls.__dataclass_fields__}
        kwargs = {k: v for k, v in doc.items() if k in known}
        if "spacing" in kwargs:
            sx, sy = kwargs["spacing"]
            kwargs["spacing"] = (float(sx), float(sy))
        return cls(**kwargs)


DEFAULT_SPEC = PhantomSpec()


def _validate(spec: PhantomSpec) -> None:
    s = spec
    if s.width < 1 or s.height < 1:
        raise SpecOutOfBounds(f"image size {s.width}x{s.height}")
    if not (s.spacing[0] > 0 and s.spacing[1] > 0):
        raise SpecOutOfBounds(f"spacing {s.spacing}")
    if not 0 <= s.hinge_x_left < s.hinge_x_right < s.width:
        raise SpecOutOfBounds(
            f"hinge columns [{s.hinge_x_left}, {s.hinge_x_right}] in width {s.width}"
        )
    if not 0 <= s.lv_apex_y < s.contact_y < s.height:
        raise SpecOutOfBounds(
            f"apex {s.lv_apex_y} / interface {s.contact_y} in height {s.height}"
        )
    if s.lv_semi_x < 1:
        raise SpecOutOfBounds(f"lv_semi_x {s.lv_semi_x}")
    if s.lv_center_x - s.lv_semi_x > s.hinge_x_left or s.lv_center_x + s.lv_semi_x < s.hinge_x_right:
        raise SpecOutOfBounds(
            "LV ellipse does not cover the hinge span at the interface row"
        )
    if s.la_depth < 1:
        raise SpecOutOfBounds(f"la_depth {s.la_depth}")
    if s.jitter_amp < 0:
        raise SpecOutOfBounds(f"jitter_amp {s.jitter_amp}")
    if s.contact_y - s.jitter_amp <= s.lv_apex_y:
        raise SpecOutOfBounds("jitter can push the interface above the LV apex")
    if s.contact_y + s.jitter_amp + s.la_depth > s.height - 1:
        raise SpecOutOfBounds("LA band does not fit below the interface")
    if s.mis_center < 0:
        raise SpecOutOfBounds(f"mis_center {s.mis_center}")
    if s.height - s.mis_center <= s.contact_y + s.jitter_amp:
        raise SpecOutOfBounds("mis_center crop cuts into the LV")


def _interface_rows(spec: PhantomSpec, dy_left: int, dy_right: int) -> np.ndarray:
    """Interface row per hinge-span column: linear tilt plus bounded jitter."""
    cols = np.arange(spec.hinge_x_left, spec.hinge_x_right + 1)
    span = spec.hinge_x_right - spec.hinge_x_left
    if abs(dy_right - dy_left) > span:
        raise SpecOutOfBounds(
            f"interface tilt {dy_left}..{dy_right} steeper than 1 px/column"
        )
    t = (cols - spec.hinge_x_left) / span
    ramp = np.floor(dy_left + t * (dy_right - dy_left) + 0.5).astype(np.int64)
    rows = spec.contact_y + ramp
    if spec.jitter_amp > 0:
        rng = np.random.default_rng(spec.jitter_seed)
        steps = rng.integers(-1, 2, size=cols.size)
        walk = np.clip(np.cumsum(steps), -spec.jitter_amp, spec.jitter_amp)
        rows = rows + walk
    return rows


def _rasterize(
    spec: PhantomSpec, dy_left: int = 0, dy_right: int = 0
) -> tuple[LabelMap, np.ndarray]:
    """Build the label grid; returns (map, per-column interface rows)."""
    _validate(spec)
    height = spec.height - spec.mis_center
    grid = np.zeros((height, spec.width), dtype=np.uint8)

    semi_y = spec.contact_y - spec.lv_apex_y
    iface = _interface_rows(spec, dy_left, dy_right)
    if iface.min() <= spec.lv_apex_y or iface.max() >= height:
        raise SpecOutOfBounds("perturbed interface leaves the image")

    # LV inside the hinge span: from the ellipse top down to the interface
    cols = np.arange(spec.hinge_x_left, spec.hinge_x_right + 1)
    u = (cols - spec.lv_center_x) / spec.lv_semi_x
    u = np.clip(u, -1.0, 1.0)
    top = spec.contact_y - np.floor(semi_y * np.sqrt(1.0 - u**2)).astype(np.int64)
    top = np.minimum(top, iface)
    rows = np.arange(height)[:, None]
    in_span = grid[:, spec.hinge_x_left : spec.hinge_x_right + 1]
    in_span[(rows >= top) & (rows <= iface)] = LV

    # LA band under the interface, clipped at the (possibly cropped) bottom
    la_top = iface + 1
    la_bottom = np.minimum(iface + spec.la_depth, height - 1)
    in_span[(rows >= la_top) & (rows <= la_bottom)] = LA

    # Ellipse wings outside the hinge span. A wing column only neighbors
    # the hinge-end columns, so capping wing rows at that end's interface
    # row (and at the base row) keeps wings away from every LA pixel and
    # off the contact line.
    for lo, hi, limit in (
        (
            spec.lv_center_x - spec.lv_semi_x,
            spec.hinge_x_left - 1,
            min(int(iface[0]), spec.contact_y),
        ),
        (
            spec.hinge_x_right + 1,
            spec.lv_center_x + spec.lv_semi_x,
            min(int(iface[-1]), spec.contact_y),
        ),
    ):
        lo = max(lo, 0)
        hi = min(hi, spec.width - 1)
        if lo > hi:
            continue
        wcols = np.arange(lo, hi + 1)
        wu = (wcols - spec.lv_center_x) / spec.lv_semi_x
        wu = np.clip(wu, -1.0, 1.0)
        wtop = spec.contact_y - np.floor(semi_y * np.sqrt(1.0 - wu**2)).astype(np.int64)
        wing = grid[:, lo : hi + 1]
        wing[(rows >= wtop) & (rows <= limit)] = LV

    return LabelMap(grid, spacing=spec.spacing), iface


def _truth_diagnosis(
    spec: PhantomSpec, m: LabelMap, ratio_threshold: float = DEFAULT_OFFCENTER_RATIO
) -> CenteringDiagnosis:
    """Centering truth from construction facts (no component analysis)."""
    grid = m.labels
    la_count = int(np.count_nonzero(grid == LA))
    lv_count = int(np.count_nonzero(grid == LV))
    if la_count == 0:
        return CenteringDiagnosis(True, (LA_ABSENT,), 0.0)
    reasons = []
    if (grid[-1, :] == LA).any():
        reasons.append(LA_TOUCHES_BOTTOM)
    if (grid[:, 0] == LA).any() or (grid[:, -1] == LA).any():
        reasons.append(LA_TOUCHES_SIDE)
    ratio = la_count / lv_count if lv_count > 0 else math.inf
    if ratio < ratio_threshold:
        reasons.append(LA_AREA_RATIO_LOW)
    return CenteringDiagnosis(bool(reasons), tuple(reasons), ratio)


def generate_phantom(
    spec: PhantomSpec,
) -> tuple[LabelMap, HingePair, CenteringDiagnosis]:
    """One synthetic map plus its construction-truth hinge pair and
    centering diagnosis.

    With jitter_amp = 0 the truth hinge points are exactly
    (hinge_x_left, contact_y) and (hinge_x_right, contact_y); with jitter
    they are the interface endpoints, which extraction matches only up to
    the jitter of neighboring columns.
    """
    m, iface = _rasterize(spec)
    truth = make_hinge_pair(
        (spec.hinge_x_left, int(iface[0])),
        (spec.hinge_x_right, int(iface[-1])),
        spec.spacing,
    )
    return m, truth, _truth_diagnosis(spec, m)


# error model cells: (point, axis) with point in {aMVL, pMVL}, axis in {x, y}
ModelCell = tuple[str, str]


@dataclass(frozen=True)
class ErrorModel:
    """Per-cell systematic bias and Gaussian spread, both in mm."""

    bias_mm: Mapping[ModelCell, float]
    spread_mm: Mapping[ModelCell, float]

    def cell(self, point: str, axis: str) -> tuple[float, float]:
        return (
            float(self.bias_mm.get((point, axis), 0.0)),
            float(self.spread_mm.get((point, axis), 0.0)),
        )

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ErrorModel":
        """Parse {"aMVL": {"x": [bias, spread], ...}, "pMVL": {...}}."""
        bias: dict[ModelCell, float] = {}
        spread: dict[ModelCell, float] = {}
        for point, axes in doc.items():
            for axis, pair in axes.items():
                b, s = (pair, 0.0) if isinstance(pair, (int, float)) else pair
                bias[(point, axis)] = float(b)
                spread[(point, axis)] = float(s)
        return cls(bias, spread)


ZERO_ERROR_MODEL = ErrorModel({}, {})


def _draw_px(rng: np.random.Generator, bias: float, spread: float, spacing: float) -> int:
    mm = bias if spread == 0.0 else rng.normal(bias, spread)
    return int(math.floor(mm / spacing + 0.5))


def generate_cohort(
    base: PhantomSpec,
    n: int,
    error_model: ErrorModel = ZERO_ERROR_MODEL,
    seed: int = 0,
) -> list[tuple[LabelMap, LabelMap]]:
    """(truth map, perturbed prediction map) pairs with known bias.

    The truth map is the jitter-free base phantom; each prediction shifts
    the hinge columns and interface heights by integer-pixel draws from
    the error model, quantized to the pixel grid. Deterministic for a
    fixed seed.
    """
    if n < 1:
        raise SpecOutOfBounds(f"cohort size must be >= 1, got {n}")
    base = replace(base, jitter_amp=0)
    truth_map, _, _ = generate_phantom(base)
    sx, sy = base.spacing
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        dxa = _draw_px(rng, *error_model.cell("aMVL", "x"), sx)
        dya = _draw_px(rng, *error_model.cell("aMVL", "y"), sy)
        dxp = _draw_px(rng, *error_model.cell("pMVL", "x"), sx)
        dyp = _draw_px(rng, *error_model.cell("pMVL", "y"), sy)
        pred_spec = replace(
            base,
            hinge_x_left=base.hinge_x_left + dxa,
            hinge_x_right=base.hinge_x_right + dxp,
        )
        pred_map, _ = _rasterize(pred_spec, dy_left=dya, dy_right=dyp)
        pairs.append((truth_map, pred_map))
    return pairs


def cohort_hinge_truth(
    base: PhantomSpec, n: int, error_model: ErrorModel = ZERO_ERROR_MODEL, seed: int = 0
) -> list[tuple[HingePair, HingePair]]:
    """Construction-truth (truth, prediction) hinge pairs for a cohort.

    Replays the same draws as generate_cohort, so index i here matches
    pair i there.
    """
    if n < 1:
        raise SpecOutOfBounds(f"cohort size must be >= 1, got {n}")
    base = replace(base, jitter_amp=0)
    sx, sy = base.spacing
    truth = make_hinge_pair(
        (base.hinge_x_left, base.contact_y),
        (base.hinge_x_right, base.contact_y),
        base.spacing,
    )
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        dxa = _draw_px(rng, *error_model.cell("aMVL", "x"), sx)
        dya = _draw_px(rng, *error_model.cell("aMVL", "y"), sy)
        dxp = _draw_px(rng, *error_model.cell("pMVL", "x"), sx)
        dyp = _draw_px(rng, *error_model.cell("pMVL", "y"), sy)
        pred = make_hinge_pair(
            (base.hinge_x_left + dxa, base.contact_y + dya),
            (base.hinge_x_right + dxp, base.contact_y + dyp),
            base.spacing,
        )
        out.append((truth, pred))
    return out
