"""Training entry point: Adam at 1e-3, categorical cross-entropy, 50 epochs,
patient-level 350/50/50 split, no data augmentation.

Emits a per-epoch CSV log (epoch, lv_dice, la_dice, loss) where the Dice
columns score argmax predictions on the validation patients, and saves the
model artifact next to it. Runs are deterministic for a fixed seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tensorflow as tf
from tensorflow import keras

from .dataset import find_patients, load_split, split_patients
from .model import build_unet

LV_CLASS = 1
LA_CLASS = 2


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters; the defaults are the reference recipe.

    The network input resolution and batch size are deliberate free
    parameters (documented defaults, no reproduction claim); everything
    else is pinned.
    """

    split: tuple[int, int, int] = (350, 50, 50)
    learning_rate: float = 1e-3
    epochs: int = 50
    batch_size: int = 8
    input_size: int = 256
    seed: int = 0


def _class_dice(pred_classes: np.ndarray, true_classes: np.ndarray, cls: int) -> float:
    values = []
    for p, t in zip(pred_classes, true_classes):
        a = p == cls
        b = t == cls
        denom = int(a.sum()) + int(b.sum())
        values.append(1.0 if denom == 0 else 2.0 * int((a & b).sum()) / denom)
    return float(np.mean(values))


class _ValidationDice(keras.callbacks.Callback):
    def __init__(self, x_val: np.ndarray, y_val: np.ndarray, batch_size: int):
        super().__init__()
        self.x_val = x_val
        self.true_classes = y_val.argmax(axis=-1)
        self.batch_size = batch_size
        self.rows: list[dict] = []

    def on_epoch_end(self, epoch, logs=None):
        scores = self.model.predict(
            self.x_val, batch_size=self.batch_size, verbose=0
        )
        pred_classes = scores.argmax(axis=-1)
        self.rows.append(
            {
                "epoch": epoch + 1,
                "lv_dice": _class_dice(pred_classes, self.true_classes, LV_CLASS),
                "la_dice": _class_dice(pred_classes, self.true_classes, LA_CLASS),
                "loss": float(logs["loss"]),
            }
        )


def train(
    config: TrainConfig, dataset_root: str | Path, out_dir: str | Path
) -> tuple[Path, list[dict]]:
    """Train on the dataset; returns (model artifact path, per-epoch rows)."""
    tf.keras.backend.clear_session()
    tf.keras.utils.set_random_seed(config.seed)
    tf.config.experimental.enable_op_determinism()

    patients = find_patients(dataset_root)
    train_ids, val_ids, test_ids = split_patients(
        sorted(patients), config.split, config.seed
    )
    x_train, y_train = load_split(patients, train_ids, config.input_size)
    x_val, y_val = load_split(patients, val_ids, config.input_size)

    model = build_unet(config.input_size)
    model.compile(
        optimizer=keras.optimizers.Adam(learning_rate=config.learning_rate),
        loss="categorical_crossentropy",
    )
    dice_log = _ValidationDice(x_val, y_val, config.batch_size)
    model.fit(
        x_train,
        y_train,
        batch_size=config.batch_size,
        epochs=config.epochs,
        shuffle=True,
        verbose=0,
        callbacks=[dice_log],
    )

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifact = out_dir / "model.keras"
    model.save(artifact)
    log_path = out_dir / "training_log.csv"
    with open(log_path, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=("epoch", "lv_dice", "la_dice", "loss"),
            lineterminator="\n",
        )
        writer.writeheader()
        for row in dice_log.rows:
            writer.writerow(
                {
                    "epoch": row["epoch"],
                    "lv_dice": f"{row['lv_dice']:.4f}",
                    "la_dice": f"{row['la_dice']:.4f}",
                    "loss": f"{row['loss']:.6f}",
                }
            )
    (out_dir / "split.csv").write_text(
        "patient,split\n"
        + "".join(f"{p},train\n" for p in train_ids)
        + "".join(f"{p},val\n" for p in val_ids)
        + "".join(f"{p},test\n" for p in test_ids)
    )
    return artifact, dice_log.rows
