"""CAMUS directory scanning, patient-level splitting, and array loading.

The dataset root holds one directory per patient (patientNNNN) with
per-view, per-phase image/ground-truth pairs:

    patient0007/patient0007_4CH_ED.mhd        (+ .raw)
    patient0007/patient0007_4CH_ED_gt.mhd     (+ .raw)

Ground-truth byte values are {0: background, 1: LV, 2: myocardium,
3: LA}; the myocardium is folded into background, leaving the three
training classes {0: bg, 1: LV, 2: LA}.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mhdio import read_image

NUM_CLASSES = 3
GT_TO_CLASS = np.array([0, 1, 0, 2], dtype=np.uint8)

VIEWS = ("2CH", "4CH")
PHASES = ("ED", "ES")

_PATIENT_RE = re.compile(r"^patient\d+$")


class DatasetMissing(Exception):
    def __init__(self, root):
        super().__init__(f"no CAMUS patient directories under {root}")


class SplitLeakage(Exception):
    pass


@dataclass(frozen=True)
class CaseFiles:
    patient: str
    view: str
    phase: str
    image: Path
    gt: Path

    @property
    def name(self) -> str:
        return f"{self.patient}_{self.view}_{self.phase}"


def find_patients(root: str | Path) -> dict[str, list[CaseFiles]]:
    """Patient id -> available cases, sorted. Duplicate ids are leakage."""
    root = Path(root)
    patients: dict[str, list[CaseFiles]] = {}
    if not root.is_dir():
        raise DatasetMissing(root)
    for patient_dir in sorted(root.rglob("patient*")):
        if not patient_dir.is_dir() or not _PATIENT_RE.match(patient_dir.name):
            continue
        cases = []
        for view in VIEWS:
            for phase in PHASES:
                stem = f"{patient_dir.name}_{view}_{phase}"
                image = patient_dir / f"{stem}.mhd"
                gt = patient_dir / f"{stem}_gt.mhd"
                if image.exists() and gt.exists():
                    cases.append(
                        CaseFiles(patient_dir.name, view, phase, image, gt)
                    )
        if not cases:
            continue
        if patient_dir.name in patients:
            raise SplitLeakage(
                f"patient id {patient_dir.name} appears more than once under {root}"
            )
        patients[patient_dir.name] = cases
    if not patients:
        raise DatasetMissing(root)
    return patients


def split_patients(
    patient_ids: list[str], split: tuple[int, int, int], seed: int
) -> tuple[list[str], list[str], list[str]]:
    """Deterministic patient-level split; sizes must cover every patient."""
    n_train, n_val, n_test = split
    if n_train + n_val + n_test != len(patient_ids):
        raise ValueError(
            f"split {split} sums to {n_train + n_val + n_test}, "
            f"dataset has {len(patient_ids)} patients"
        )
    order = sorted(patient_ids)
    rng = np.random.default_rng(seed)
    rng.shuffle(order)
    train = order[:n_train]
    val = order[n_train : n_train + n_val]
    test = order[n_train + n_val :]
    assert_disjoint(train, val, test)
    return train, val, test


def assert_disjoint(*groups: list[str]) -> None:
    seen: set[str] = set()
    for group in groups:
        for pid in group:
            if pid in seen:
                raise SplitLeakage(f"patient {pid} assigned to two splits")
            seen.add(pid)


def resize_nearest(arr: np.ndarray, height: int, width: int) -> np.ndarray:
    """Nearest-neighbor resampling; keeps label alphabets intact."""
    ys = np.minimum(
        (np.arange(height) + 0.5) * arr.shape[0] / height, arr.shape[0] - 1
    ).astype(np.int64)
    xs = np.minimum(
        (np.arange(width) + 0.5) * arr.shape[1] / width, arr.shape[1] - 1
    ).astype(np.int64)
    return arr[np.ix_(ys, xs)]


def load_case_arrays(
    case: CaseFiles, input_size: int
) -> tuple[np.ndarray, np.ndarray]:
    """(image[input, input, 1] float32 in [0, 1], class labels[input, input])."""
    image, _ = read_image(case.image)
    gt, _ = read_image(case.gt)
    if image.shape != gt.shape:
        raise ValueError(f"{case.name}: image/gt shapes differ")
    scale = float(image.max()) or 1.0
    image = image.astype(np.float32) / scale
    image = resize_nearest(image, input_size, input_size)
    gt = gt.astype(np.int64)
    if gt.max() > 3 or gt.min() < 0:
        raise ValueError(f"{case.gt}: ground-truth byte outside 0..3")
    labels = GT_TO_CLASS[resize_nearest(gt, input_size, input_size)]
    return image[..., np.newaxis], labels


def load_split(
    patients: dict[str, list[CaseFiles]], ids: list[str], input_size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Stacked (images, one-hot labels) for every case of the given patients."""
    images = []
    labels = []
    for pid in ids:
        for case in patients[pid]:
            img, lab = load_case_arrays(case, input_size)
            images.append(img)
            labels.append(lab)
    x = np.stack(images)
    y = np.eye(NUM_CLASSES, dtype=np.float32)[np.stack(labels)]
    return x, y
