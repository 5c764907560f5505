import numpy as np
import pytest

from unet_pipeline.mhdio import write_mask


def synth_case(rng, size=48):
    """One synthetic image/gt pair with CAMUS byte semantics.

    LV blob in the upper half, LA blob below it, a thin myocardium rim
    (byte 2) around the LV, and grayscale intensities correlated with the
    classes so a couple of epochs can actually learn something.
    """
    gt = np.zeros((size, size), dtype=np.uint8)
    cx = size // 2 + int(rng.integers(-4, 5))
    top = size // 5 + int(rng.integers(-2, 3))
    mid = size // 2 + int(rng.integers(-2, 3))
    half_w = size // 5 + int(rng.integers(-2, 3))
    gt[top:mid, cx - half_w : cx + half_w] = 1
    gt[mid : mid + size // 4, cx - half_w : cx + half_w] = 3
    # myocardium rim left/right of the LV
    gt[top:mid, cx - half_w - 2 : cx - half_w] = 2
    gt[top:mid, cx + half_w : cx + half_w + 2] = 2

    intensity = np.choose(gt, [30, 110, 70, 180]).astype(np.float64)
    noisy = intensity + rng.normal(0, 10, gt.shape)
    image = np.clip(noisy, 0, 255).astype(np.uint8)
    return image, gt


@pytest.fixture(scope="session")
def camus_root(tmp_path_factory):
    """Four-patient synthetic dataset in the CAMUS directory layout."""
    root = tmp_path_factory.mktemp("camus")
    rng = np.random.default_rng(2026)
    for p in range(1, 5):
        pdir = root / f"patient{p:04d}"
        pdir.mkdir()
        for view in ("2CH", "4CH"):
            for phase in ("ED", "ES"):
                stem = f"patient{p:04d}_{view}_{phase}"
                image, gt = synth_case(rng)
                write_mask(image, (0.3, 0.15), pdir / f"{stem}.mhd")
                write_mask(gt, (0.3, 0.15), pdir / f"{stem}_gt.mhd")
    return root
