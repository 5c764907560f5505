"""Command-line interface: extract, evaluate, dice, phantom.

Exit codes are a stable contract: 0 success, 2 input or parse error,
3 empty-result condition (no contact line, no usable cases).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import hinge, labelmap, mhd_io, phantom, stats
from .errors import MhdError, MvHingeError, NoContact, SpecOutOfBounds

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY = 3

MM_FMT = "{:.2f}"
DICE_FMT = "{:.4f}"


def _fail(message: str, code: int) -> int:
    print(f"mvhinge: {message}", file=sys.stderr)
    return code


@dataclass
class CaseRecord:
    case_id: str
    subgroup: stats.Subgroup
    prediction_path: Path
    truth_path: Path | None


def _hinge_json(hp: hinge.HingePair, diagnosis: hinge.CenteringDiagnosis) -> dict:
    return {
        "amvl_px": list(hp.amvl_px),
        "pmvl_px": list(hp.pmvl_px),
        "amvl_mm": list(hp.amvl_mm),
        "pmvl_mm": list(hp.pmvl_mm),
        "diameter_mm": hp.diameter_mm,
        "degenerate": hp.degenerate,
        "off_center": diagnosis.off_center,
    }


def _extract_pair(
    path: Path, scheme: str, largest: bool, ratio: float
) -> tuple[hinge.HingePair, hinge.CenteringDiagnosis]:
    m = mhd_io.load_label_map(path, mhd_io.MAPPINGS_BY_NAME[scheme])
    cl = hinge.extract_contact_line(m, largest_components=largest)
    hp = hinge.extract_hinge_points(cl, m.spacing)
    return hp, hinge.diagnose_centering(m, ratio_threshold=ratio)


def cmd_extract(args: argparse.Namespace) -> int:
    try:
        hp, diagnosis = _extract_pair(
            Path(args.mask), args.scheme, args.largest_components, args.offcenter_ratio
        )
    except NoContact as exc:
        return _fail(str(exc), EXIT_EMPTY)
    except (MhdError, OSError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    print(json.dumps(_hinge_json(hp, diagnosis), indent=2))
    return EXIT_OK


def cmd_dice(args: argparse.Namespace) -> int:
    label = labelmap.parse_label(args.label)
    try:
        pred = mhd_io.load_label_map(
            args.prediction, mhd_io.MAPPINGS_BY_NAME[args.pred_scheme]
        )
        truth = mhd_io.load_label_map(
            args.truth, mhd_io.MAPPINGS_BY_NAME[args.truth_scheme]
        )
        value = labelmap.dice(pred, truth, label)
    except (MvHingeError, OSError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    print(DICE_FMT.format(value))
    return EXIT_OK


def _read_manifest(path: Path) -> list[CaseRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"case_id", "subgroup", "prediction", "truth"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError(
                f"manifest must have columns case_id,subgroup,prediction,truth; "
                f"got {reader.fieldnames}"
            )
        records = []
        base = path.parent
        for row in reader:
            pred = base / row["prediction"]
            token = (row.get("subgroup") or "").strip()
            if token:
                subgroup = stats.Subgroup.parse(token)
            else:
                subgroup = stats.Subgroup.from_filename(pred.name)
            truth_cell = (row.get("truth") or "").strip()
            records.append(
                CaseRecord(
                    case_id=row["case_id"],
                    subgroup=subgroup,
                    prediction_path=pred,
                    truth_path=base / truth_cell if truth_cell else None,
                )
            )
    return records


CASE_COLUMNS = (
    "case_id",
    "subgroup",
    "pred_amvl_x_px",
    "pred_amvl_y_px",
    "pred_pmvl_x_px",
    "pred_pmvl_y_px",
    "truth_amvl_x_px",
    "truth_amvl_y_px",
    "truth_pmvl_x_px",
    "truth_pmvl_y_px",
    "pred_diameter_mm",
    "truth_diameter_mm",
    "err_amvl_x_mm",
    "err_amvl_y_mm",
    "err_pmvl_x_mm",
    "err_pmvl_y_mm",
    "pred_off_center",
    "dice_lv",
    "dice_la",
    "error",
)


def cmd_evaluate(args: argparse.Namespace) -> int:
    manifest = Path(args.manifest)
    try:
        records = _read_manifest(manifest)
    except (ValueError, OSError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    if not records:
        return _fail("no cases", EXIT_INPUT)
    if args.calibration_in and args.fit_on_self:
        return _fail("--calibration-in conflicts with --fit-on-self", EXIT_INPUT)

    applied_table: stats.CalibrationTable | None = None
    if args.calibration_in:
        try:
            applied_table = stats.CalibrationTable.from_json(
                Path(args.calibration_in).read_text()
            )
        except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
            return _fail(f"bad calibration file: {exc}", EXIT_INPUT)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    samples: list[stats.ErrorSample] = []
    case_rows: list[dict] = []
    for rec in records:
        row = {c: "" for c in CASE_COLUMNS}
        row["case_id"] = rec.case_id
        row["subgroup"] = str(rec.subgroup)
        try:
            if rec.truth_path is None:
                raise ValueError("missing truth path")
            pred_hp, pred_diag = _extract_pair(
                rec.prediction_path,
                args.pred_scheme,
                args.largest_components,
                args.offcenter_ratio,
            )
            truth_hp, _ = _extract_pair(
                rec.truth_path,
                args.truth_scheme,
                args.largest_components,
                args.offcenter_ratio,
            )
            case_samples = stats.compute_errors(
                pred_hp, truth_hp, rec.subgroup, rec.case_id
            )
            if args.dice:
                pred_map = mhd_io.load_label_map(
                    rec.prediction_path, mhd_io.MAPPINGS_BY_NAME[args.pred_scheme]
                )
                truth_map = mhd_io.load_label_map(
                    rec.truth_path, mhd_io.MAPPINGS_BY_NAME[args.truth_scheme]
                )
                row["dice_lv"] = DICE_FMT.format(
                    labelmap.dice(pred_map, truth_map, labelmap.LV)
                )
                row["dice_la"] = DICE_FMT.format(
                    labelmap.dice(pred_map, truth_map, labelmap.LA)
                )
        except (MvHingeError, ValueError, OSError) as exc:
            row["error"] = str(exc)
            case_rows.append(row)
            continue
        samples.extend(case_samples)
        row.update(
            {
                "pred_amvl_x_px": pred_hp.amvl_px[0],
                "pred_amvl_y_px": pred_hp.amvl_px[1],
                "pred_pmvl_x_px": pred_hp.pmvl_px[0],
                "pred_pmvl_y_px": pred_hp.pmvl_px[1],
                "truth_amvl_x_px": truth_hp.amvl_px[0],
                "truth_amvl_y_px": truth_hp.amvl_px[1],
                "truth_pmvl_x_px": truth_hp.pmvl_px[0],
                "truth_pmvl_y_px": truth_hp.pmvl_px[1],
                "pred_diameter_mm": MM_FMT.format(pred_hp.diameter_mm),
                "truth_diameter_mm": MM_FMT.format(truth_hp.diameter_mm),
                "err_amvl_x_mm": MM_FMT.format(case_samples[0].error_mm),
                "err_amvl_y_mm": MM_FMT.format(case_samples[1].error_mm),
                "err_pmvl_x_mm": MM_FMT.format(case_samples[2].error_mm),
                "err_pmvl_y_mm": MM_FMT.format(case_samples[3].error_mm),
                "pred_off_center": str(pred_diag.off_center).lower(),
            }
        )
        case_rows.append(row)

    cases_path = out_dir / "cases.csv"
    with open(cases_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CASE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(case_rows)
    print(f"wrote {cases_path}")

    if not samples:
        return _fail("every case failed; see cases.csv", EXIT_EMPTY)

    fitted: stats.CalibrationTable | None = None
    if args.fit_on_self or args.calibration_out:
        fitted = stats.fit_calibration(samples)
    if args.calibration_out:
        Path(args.calibration_out).write_text(fitted.to_json())
        print(f"wrote {args.calibration_out}")
    if args.fit_on_self:
        applied_table = fitted

    reported = samples
    if applied_table is not None:
        try:
            reported = stats.apply_calibration(samples, applied_table)
        except MvHingeError as exc:
            return _fail(str(exc), EXIT_INPUT)
        raw_path = out_dir / "summary_uncalibrated.csv"
        raw_path.write_text(stats.summarize(samples).to_csv())
        print(f"wrote {raw_path}")

    summary_path = out_dir / "summary.csv"
    summary_path.write_text(stats.summarize(reported).to_csv())
    print(f"wrote {summary_path}")
    return EXIT_OK


def _load_phantom_document(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("phantom spec document must be a JSON object")
    return doc


def cmd_phantom(args: argparse.Namespace) -> int:
    try:
        doc = _load_phantom_document(args.spec)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return _fail(str(exc), EXIT_INPUT)

    try:
        spec = phantom.PhantomSpec.from_dict(doc)
        subgroup = stats.Subgroup.parse(doc.get("subgroup", "a4c-ED"))
        cohort_doc = doc.get("cohort", {})
        n = args.n if args.n is not None else int(cohort_doc.get("n", 1))
        seed = args.seed if args.seed is not None else int(cohort_doc.get("seed", 0))
        model = phantom.ErrorModel.from_dict(cohort_doc.get("error_model", {}))
    except (TypeError, ValueError) as exc:
        return _fail(f"bad phantom spec: {exc}", EXIT_INPUT)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        pairs = phantom.generate_cohort(spec, n, model, seed)
        hinge_truths = phantom.cohort_hinge_truth(spec, n, model, seed)
    except SpecOutOfBounds as exc:
        return _fail(str(exc), EXIT_INPUT)

    manifest_rows = []
    truth_cases = []
    for i, ((truth_map, pred_map), (truth_hp, pred_hp)) in enumerate(
        zip(pairs, hinge_truths)
    ):
        case_id = f"phantom{i:04d}"
        truth_name = f"{case_id}_truth.mhd"
        pred_name = f"{case_id}_pred.mhd"
        mhd_io.save_label_map(truth_map, out_dir / truth_name)
        mhd_io.save_label_map(pred_map, out_dir / pred_name)
        manifest_rows.append((case_id, str(subgroup), pred_name, truth_name))
        truth_cases.append(
            {
                "case_id": case_id,
                "subgroup": str(subgroup),
                "truth": _hinge_json(truth_hp, hinge.diagnose_centering(truth_map)),
                "prediction": _hinge_json(pred_hp, hinge.diagnose_centering(pred_map)),
            }
        )

    manifest_path = out_dir / "manifest.csv"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("case_id", "subgroup", "prediction", "truth"))
    writer.writerows(manifest_rows)
    manifest_path.write_text(buf.getvalue())

    truth_path = out_dir / "truth.json"
    truth_path.write_text(json.dumps({"cases": truth_cases}, indent=2) + "\n")
    print(f"wrote {len(pairs)} case(s) to {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvhinge",
        description="Mitral valve hinge point extraction and evaluation "
        "over LV/LA label maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scheme_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--pred-scheme",
            choices=sorted(mhd_io.MAPPINGS_BY_NAME),
            default="camus",
            help="byte-to-label scheme of prediction masks (default camus)",
        )
        p.add_argument(
            "--truth-scheme",
            choices=sorted(mhd_io.MAPPINGS_BY_NAME),
            default="camus",
            help="byte-to-label scheme of ground-truth masks (default camus)",
        )

    p_extract = sub.add_parser("extract", help="hinge points of one mask, as JSON")
    p_extract.add_argument("mask", help=".mhd label mask")
    p_extract.add_argument(
        "--scheme",
        choices=sorted(mhd_io.MAPPINGS_BY_NAME),
        default="camus",
        help="byte-to-label scheme (default camus)",
    )
    p_extract.add_argument("--largest-components", action="store_true")
    p_extract.add_argument("--offcenter-ratio", type=float, default=hinge.DEFAULT_OFFCENTER_RATIO)
    p_extract.set_defaults(func=cmd_extract)

    p_dice = sub.add_parser("dice", help="Dice coefficient of two masks")
    p_dice.add_argument("prediction")
    p_dice.add_argument("truth")
    p_dice.add_argument("--label", choices=("lv", "la"), default="lv")
    add_scheme_flags(p_dice)
    p_dice.set_defaults(func=cmd_dice)

    p_eval = sub.add_parser("evaluate", help="cohort evaluation from a manifest CSV")
    p_eval.add_argument("manifest", help="CSV with case_id,subgroup,prediction,truth")
    p_eval.add_argument("--out", default=".", help="output directory (default .)")
    p_eval.add_argument("--calibration-in", help="apply a fitted calibration table")
    p_eval.add_argument("--calibration-out", help="write the table fitted on this cohort")
    p_eval.add_argument(
        "--fit-on-self",
        action="store_true",
        help="fit and apply calibration on this same cohort",
    )
    p_eval.add_argument("--dice", action="store_true", help="add per-case Dice columns")
    p_eval.add_argument("--largest-components", action="store_true")
    p_eval.add_argument("--offcenter-ratio", type=float, default=hinge.DEFAULT_OFFCENTER_RATIO)
    add_scheme_flags(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_phantom = sub.add_parser("phantom", help="generate synthetic mask cohorts")
    p_phantom.add_argument("spec", nargs="?", help="phantom spec JSON (default: built-in)")
    p_phantom.add_argument("--out", default=".", help="output directory (default .)")
    p_phantom.add_argument("--n", type=int, default=None, help="cohort size")
    p_phantom.add_argument("--seed", type=int, default=None)
    p_phantom.set_defaults(func=cmd_phantom)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
