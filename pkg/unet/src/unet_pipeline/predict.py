"""Mask export: run the trained model and write MetaImage label masks.

Each output mask has the dimensions and spacing of its input image and the
class alphabet {0: background, 1: LV, 2: LA}; predictions are resized back
to native resolution with nearest-neighbor interpolation so no new label
values can appear.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from tensorflow import keras

from .dataset import resize_nearest
from .mhdio import read_image, write_mask

SCORE_SUM_TOLERANCE = 1e-5


def load_model(artifact: str | Path) -> keras.Model:
    return keras.models.load_model(artifact, compile=False)


def predict_mask(model: keras.Model, image: np.ndarray) -> np.ndarray:
    """Class labels at the image's native resolution."""
    input_size = model.input_shape[1]
    scale = float(image.max()) or 1.0
    x = image.astype(np.float32) / scale
    x = resize_nearest(x, input_size, input_size)[np.newaxis, ..., np.newaxis]
    scores = model.predict(x, verbose=0)[0]
    sums = scores.sum(axis=-1)
    if np.abs(sums - 1.0).max() > SCORE_SUM_TOLERANCE:
        raise ValueError("class scores are not normalized")
    classes = scores.argmax(axis=-1).astype(np.uint8)
    return resize_nearest(classes, image.shape[0], image.shape[1])


def predict_masks(
    artifact: str | Path, image_paths: list[str | Path], out_dir: str | Path
) -> list[Path]:
    """One mask file per input image, named like the input."""
    model = load_model(artifact)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for image_path in image_paths:
        image_path = Path(image_path)
        image, spacing = read_image(image_path)
        mask = predict_mask(model, image)
        out_path = out_dir / image_path.name
        write_mask(mask, spacing, out_path)
        written.append(out_path)
    return written
