"""Measurement-error statistics: signed errors, normality screening,
median-bias calibration, percentile summaries.

Each measured hinge coordinate decomposes into the true value plus a
systematic bias plus a random error. The per-cell median of signed errors
estimates the bias; subtracting it (calibration) leaves the random part,
which is characterized by its 15/50/85 percentiles because normality does
not survive a Shapiro-Wilk screen on this kind of data.

A "cell" is one (subgroup, point, axis) combination, where a subgroup is a
view/phase pair such as a4c-ED.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import (
    EmptySamples,
    MissingCell,
    SpacingMismatch,
    TooFewSamples,
    TooManySamples,
    ZeroVariance,
)
from .hinge import HingePair

VIEWS = ("a4c", "a2c")
PHASES = ("ED", "ES")
POINTS = ("aMVL", "pMVL")
AXES = ("x", "y")


@dataclass(frozen=True)
class Subgroup:
    """View/phase pair; exactly four combinations exist."""

    view: str
    phase: str

    def __post_init__(self):
        if self.view not in VIEWS:
            raise ValueError(f"view must be one of {VIEWS}, got {self.view!r}")
        if self.phase not in PHASES:
            raise ValueError(f"phase must be one of {PHASES}, got {self.phase!r}")

    def __str__(self) -> str:
        return f"{self.view}-{self.phase}"

    @classmethod
    def parse(cls, token: str) -> "Subgroup":
        """Parse "a4c-ED" style tokens, case-insensitively."""
        parts = token.strip().split("-")
        if len(parts) != 2:
            raise ValueError(f"cannot parse subgroup token {token!r}")
        return cls(parts[0].lower(), parts[1].upper())

    @classmethod
    def from_filename(cls, name: str) -> "Subgroup":
        """Infer the subgroup from a CAMUS-style file name.

        CAMUS names look like patient0007_4CH_ED*; 2CH maps to a2c and
        4CH to a4c.
        """
        match = re.search(r"_(2CH|4CH)_(ED|ES)", name)
        if not match:
            raise ValueError(f"cannot infer subgroup from file name {name!r}")
        view = "a2c" if match.group(1) == "2CH" else "a4c"
        return cls(view, match.group(2))


ALL_SUBGROUPS = (
    Subgroup("a4c", "ED"),
    Subgroup("a4c", "ES"),
    Subgroup("a2c", "ED"),
    Subgroup("a2c", "ES"),
)

Cell = tuple[Subgroup, str, str]  # (subgroup, point, axis)


@dataclass(frozen=True)
class ErrorSample:
    """One signed coordinate error in mm (predicted minus ground truth).

    Positive x means the prediction sits too far posterior (image-right),
    positive y too far toward the image bottom.
    """

    subgroup: Subgroup
    point: str
    axis: str
    error_mm: float
    case_id: str = ""

    def __post_init__(self):
        if self.point not in POINTS:
            raise ValueError(f"point must be one of {POINTS}, got {self.point!r}")
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not math.isfinite(self.error_mm):
            raise ValueError(f"error_mm must be finite, got {self.error_mm!r}")

    @property
    def cell(self) -> Cell:
        return (self.subgroup, self.point, self.axis)


def compute_errors(
    pred: HingePair, truth: HingePair, subgroup: Subgroup, case_id: str = ""
) -> list[ErrorSample]:
    """Signed mm errors for (aMVL,x), (aMVL,y), (pMVL,x), (pMVL,y)."""
    if pred.spacing != truth.spacing:
        raise SpacingMismatch(pred.spacing, truth.spacing)
    samples = []
    for point, pred_mm, truth_mm in (
        ("aMVL", pred.amvl_mm, truth.amvl_mm),
        ("pMVL", pred.pmvl_mm, truth.pmvl_mm),
    ):
        for axis_index, axis in enumerate(AXES):
            samples.append(
                ErrorSample(
                    subgroup=subgroup,
                    point=point,
                    axis=axis,
                    error_mm=pred_mm[axis_index] - truth_mm[axis_index],
                    case_id=case_id,
                )
            )
    return samples


def percentile(samples: Sequence[float], p: float) -> float:
    """Interpolated percentile at position p/100 * (n - 1) of the sort.

    The 50th percentile of an even-count vector is the mean of the two
    middle values.
    """
    values = sorted(float(v) for v in samples)
    if not values:
        raise EmptySamples()
    if not 0.0 <= p <= 100.0:
        raise ValueError(f"percentile p must be in [0, 100], got {p}")
    pos = p / 100.0 * (len(values) - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return values[lo]
    frac = pos - lo
    return values[lo] + frac * (values[hi] - values[lo])


def median(samples: Sequence[float]) -> float:
    return percentile(samples, 50.0)


# Royston (1995) AS R94 polynomial coefficients.
_SW_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_SW_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_SW_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_SW_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_SW_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_SW_C6 = (-0.4803, -0.082676, 0.0030302)
_SW_G = (-2.273, 0.459)


def _poly(coeffs: Sequence[float], x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _sw_weights(n: int) -> np.ndarray:
    """Approximate best linear unbiased weights for the W statistic."""
    if n == 3:
        root_half = math.sqrt(0.5)
        return np.array([-root_half, 0.0, root_half])
    m = ndtri((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    ssq = float(m @ m)
    rsn = 1.0 / math.sqrt(n)
    a = np.empty(n, dtype=float)
    an = float(m[-1]) / math.sqrt(ssq) + _poly(_SW_C1, rsn)
    if n > 5:
        anm1 = float(m[-2]) / math.sqrt(ssq) + _poly(_SW_C2, rsn)
        phi = (ssq - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
            1.0 - 2.0 * an**2 - 2.0 * anm1**2
        )
        a[2:-2] = m[2:-2] / math.sqrt(phi)
        a[-1], a[0] = an, -an
        a[-2], a[1] = anm1, -anm1
    else:
        phi = (ssq - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * an**2)
        a[1:-1] = m[1:-1] / math.sqrt(phi)
        a[-1], a[0] = an, -an
    return a


def _sw_pvalue(w: float, n: int) -> float:
    if n == 3:
        p = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return min(max(p, 0.0), 1.0)
    one_minus_w = 1.0 - w
    if one_minus_w <= 0.0:
        return 1.0
    y = math.log(one_minus_w)
    if n <= 11:
        gamma = _poly(_SW_G, float(n))
        if y >= gamma:
            return 0.0
        y = -math.log(gamma - y)
        mu = _poly(_SW_C3, float(n))
        sigma = math.exp(_poly(_SW_C4, float(n)))
    else:
        ln_n = math.log(n)
        mu = _poly(_SW_C5, ln_n)
        sigma = math.exp(_poly(_SW_C6, ln_n))
    z = (y - mu) / sigma
    return float(ndtr(-z))


def shapiro_wilk(samples: Sequence[float]) -> tuple[float, float]:
    """Shapiro-Wilk W statistic and p-value (Royston's AS R94 form).

    Valid for 3 <= n <= 5000; the downstream decision threshold is
    p < 0.05 (reject normality).
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 3:
        raise TooFewSamples(n)
    if n > 5000:
        raise TooManySamples(n)
    if x[0] == x[-1]:
        raise ZeroVariance()
    a = _sw_weights(n)
    # W is the squared correlation between data and weights; computing it
    # as 1 - complement on range-normalized, centered vectors keeps both
    # affine invariance and values near 1 accurate.
    xr = x / (x[-1] - x[0])
    xc = xr - xr.mean()
    ac = a - a.mean()
    sax = float(ac @ xc)
    ssa = float(ac @ ac)
    ssx = float(xc @ xc)
    ssassx = math.sqrt(ssa * ssx)
    w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx)
    w = min(1.0 - w1, 1.0)
    return w, _sw_pvalue(w, n)


class CalibrationTable:
    """Per-cell median bias in mm, fitted on one sample set and applicable
    to another."""

    def __init__(self, bias_mm: Mapping[Cell, float]):
        self._bias = dict(bias_mm)

    def __len__(self) -> int:
        return len(self._bias)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CalibrationTable):
            return NotImplemented
        return self._bias == other._bias

    def cells(self) -> list[Cell]:
        return sorted(self._bias, key=_cell_sort_key)

    def bias(self, subgroup: Subgroup, point: str, axis: str) -> float:
        try:
            return self._bias[(subgroup, point, axis)]
        except KeyError:
            raise MissingCell(subgroup, point, axis) from None

    def to_json(self) -> str:
        entries = [
            {
                "subgroup": str(sg),
                "point": point,
                "axis": axis,
                "bias_mm": self._bias[(sg, point, axis)],
            }
            for sg, point, axis in self.cells()
        ]
        return json.dumps({"bias_mm": entries}, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CalibrationTable":
        doc = json.loads(text)
        bias: dict[Cell, float] = {}
        for entry in doc["bias_mm"]:
            cell = (
                Subgroup.parse(entry["subgroup"]),
                entry["point"],
                entry["axis"],
            )
            bias[cell] = float(entry["bias_mm"])
        return cls(bias)


def _cell_sort_key(cell: Cell):
    subgroup, point, axis = cell
    return (
        ALL_SUBGROUPS.index(subgroup),
        POINTS.index(point),
        AXES.index(axis),
    )


def _group_by_cell(samples: Iterable[ErrorSample]) -> dict[Cell, list[float]]:
    cells: dict[Cell, list[float]] = {}
    for s in samples:
        cells.setdefault(s.cell, []).append(s.error_mm)
    return cells


def fit_calibration(samples: Sequence[ErrorSample]) -> CalibrationTable:
    """Median signed error per (subgroup, point, axis) cell."""
    if not samples:
        raise EmptySamples("error samples")
    cells = _group_by_cell(samples)
    return CalibrationTable({cell: median(v) for cell, v in cells.items()})


def apply_calibration(
    samples: Sequence[ErrorSample], table: CalibrationTable
) -> list[ErrorSample]:
    """Subtract each sample's cell bias; order is preserved."""
    out = []
    for s in samples:
        bias = table.bias(s.subgroup, s.point, s.axis)
        out.append(
            ErrorSample(
                subgroup=s.subgroup,
                point=s.point,
                axis=s.axis,
                error_mm=s.error_mm - bias,
                case_id=s.case_id,
            )
        )
    return out


@dataclass(frozen=True)
class SummaryRow:
    """Percentile summary of one cell (or one pooled axis)."""

    subgroup: str  # "a4c-ED" style token, or "all" for pooled rows
    point: str  # "aMVL" / "pMVL", or "all"
    axis: str
    n: int
    p15_mm: float
    p50_mm: float
    p85_mm: float
    median_abs_mm: float
    shapiro_w: float | None
    shapiro_p: float | None


@dataclass(frozen=True)
class SummaryReport:
    rows: tuple[SummaryRow, ...]

    CSV_COLUMNS = (
        "subgroup",
        "point",
        "axis",
        "n",
        "p15_mm",
        "p50_mm",
        "p85_mm",
        "median_abs_mm",
        "shapiro_w",
        "shapiro_p",
    )

    def row(self, subgroup: str, point: str, axis: str) -> SummaryRow:
        for r in self.rows:
            if (r.subgroup, r.point, r.axis) == (subgroup, point, axis):
                return r
        raise KeyError((subgroup, point, axis))

    def to_csv(self) -> str:
        """CSV per the reporting schema; mm columns use 2 decimals."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_COLUMNS)
        for r in self.rows:
            writer.writerow(
                [
                    r.subgroup,
                    r.point,
                    r.axis,
                    r.n,
                    f"{r.p15_mm:.2f}",
                    f"{r.p50_mm:.2f}",
                    f"{r.p85_mm:.2f}",
                    f"{r.median_abs_mm:.2f}",
                    "" if r.shapiro_w is None else f"{r.shapiro_w:.4f}",
                    "" if r.shapiro_p is None else f"{r.shapiro_p:.4f}",
                ]
            )
        return buf.getvalue()


def _summary_row(
    subgroup: str, point: str, axis: str, errors: Sequence[float]
) -> SummaryRow:
    w: float | None
    p: float | None
    try:
        w, p = shapiro_wilk(errors)
    except (TooFewSamples, TooManySamples, ZeroVariance):
        w, p = None, None
    return SummaryRow(
        subgroup=subgroup,
        point=point,
        axis=axis,
        n=len(errors),
        p15_mm=percentile(errors, 15.0),
        p50_mm=percentile(errors, 50.0),
        p85_mm=percentile(errors, 85.0),
        median_abs_mm=median([abs(e) for e in errors]),
        shapiro_w=w,
        shapiro_p=p,
    )


def summarize(samples: Sequence[ErrorSample]) -> SummaryReport:
    """Per-cell percentile rows plus pooled all-x and all-y rows."""
    if not samples:
        raise EmptySamples("error samples")
    cells = _group_by_cell(samples)
    rows = [
        _summary_row(str(cell[0]), cell[1], cell[2], cells[cell])
        for cell in sorted(cells, key=_cell_sort_key)
    ]
    for axis in AXES:
        pooled = [s.error_mm for s in samples if s.axis == axis]
        if pooled:
            rows.append(_summary_row("all", "all", axis, pooled))
    return SummaryReport(tuple(rows))
