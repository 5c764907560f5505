"""Paper-scale scoring gate, conditional on dataset + trained model.

Needs a full CAMUS checkout and masks exported by a trained model (a
GPU-scale run); set both env vars to enable:

    CAMUS_DIR       CAMUS root with patientNNNN/..._gt.mhd ground truth
    UNET_MASKS_DIR  masks from `unet-pipeline predict` for the test split

Everything is scored through the measurement toolkit's CLI, never by
importing it.
"""

import csv
import os
import statistics
import subprocess
from pathlib import Path

import pytest

REQUIRED_ENV = ("CAMUS_DIR", "UNET_MASKS_DIR")

pytestmark = pytest.mark.skipif(
    not all(os.environ.get(v) for v in REQUIRED_ENV),
    reason=f"paper-scale gate needs {' and '.join(REQUIRED_ENV)}",
)

# reference values: LV Dice (ED, ES), pooled median abs errors, and the
# a4c-ES median diameter underestimation
DICE_LV = {"ED": 0.931, "ES": 0.915}
DICE_TOL = 0.02
POOLED_MEDIAN_ABS = {"x": 1.35, "y": 0.75}
POOLED_TOL = 0.3
A4C_ES_UNDERESTIMATION = 0.138
UNDERESTIMATION_TOL = 0.03


@pytest.fixture(scope="module")
def evaluation(tmp_path_factory):
    camus = Path(os.environ["CAMUS_DIR"])
    masks = sorted(Path(os.environ["UNET_MASKS_DIR"]).glob("patient*.mhd"))
    assert masks, "no predicted masks found"
    rows = []
    for mask in masks:
        gt_name = mask.stem + "_gt.mhd"
        gt_matches = list(camus.rglob(gt_name))
        assert gt_matches, f"no ground truth for {mask.name}"
        rows.append((mask.stem, "", str(mask), str(gt_matches[0])))
    out = tmp_path_factory.mktemp("paper_eval")
    manifest = out / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("case_id", "subgroup", "prediction", "truth"))
        writer.writerows(rows)
    proc = subprocess.run(
        [
            "mvhinge", "evaluate", str(manifest), "--out", str(out),
            "--dice", "--fit-on-self",
            "--pred-scheme", "raw012", "--truth-scheme", "camus",
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    with open(out / "cases.csv", newline="") as fh:
        cases = [r for r in csv.DictReader(fh) if not r["error"]]
    with open(out / "summary.csv", newline="") as fh:
        summary = {
            (r["subgroup"], r["point"], r["axis"]): r for r in csv.DictReader(fh)
        }
    return cases, summary


def test_lv_dice_matches_reference(evaluation):
    cases, _ = evaluation
    for phase, reference in DICE_LV.items():
        values = [
            float(r["dice_lv"]) for r in cases if r["subgroup"].endswith(phase)
        ]
        assert values
        assert abs(statistics.fmean(values) - reference) <= DICE_TOL


def test_pooled_median_abs_errors(evaluation):
    _, summary = evaluation
    for axis, reference in POOLED_MEDIAN_ABS.items():
        got = float(summary[("all", "all", axis)]["median_abs_mm"])
        assert abs(got - reference) <= POOLED_TOL


def test_a4c_es_diameter_underestimation(evaluation):
    cases, _ = evaluation
    rows = [r for r in cases if r["subgroup"] == "a4c-ES"]
    assert rows
    pred = statistics.median(float(r["pred_diameter_mm"]) for r in rows)
    truth = statistics.median(float(r["truth_diameter_mm"]) for r in rows)
    underestimation = 1.0 - pred / truth
    assert abs(underestimation - A4C_ES_UNDERESTIMATION) <= UNDERESTIMATION_TOL
