"""Command-line interface for training and mask export."""

from __future__ import annotations

import argparse
import sys

from .dataset import DatasetMissing, SplitLeakage
from .predict import predict_masks
from .train import TrainConfig, train


def cmd_train(args) -> int:
    config = TrainConfig(
        split=tuple(args.split),
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch_size,
        input_size=args.input_size,
        seed=args.seed,
    )
    try:
        artifact, rows = train(config, args.dataset, args.out)
    except (DatasetMissing, SplitLeakage, ValueError) as exc:
        print(f"unet-pipeline: {exc}", file=sys.stderr)
        return 2
    last = rows[-1]
    print(
        f"saved {artifact}; epoch {last['epoch']}: "
        f"loss {last['loss']:.4f}, LV dice {last['lv_dice']:.4f}, "
        f"LA dice {last['la_dice']:.4f}"
    )
    return 0


def cmd_predict(args) -> int:
    try:
        written = predict_masks(args.model, args.images, args.out)
    except (OSError, ValueError) as exc:
        print(f"unet-pipeline: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(written)} mask(s) to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="unet-pipeline",
        description="Train a VGG16 U-Net on CAMUS and export label masks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train")
    p_train.add_argument("dataset", help="CAMUS root with patientNNNN directories")
    p_train.add_argument("--out", default="runs/latest")
    p_train.add_argument("--split", type=int, nargs=3, default=[350, 50, 50],
                         metavar=("TRAIN", "VAL", "TEST"))
    p_train.add_argument("--epochs", type=int, default=50)
    p_train.add_argument("--batch-size", type=int, default=8)
    p_train.add_argument("--input-size", type=int, default=256)
    p_train.add_argument("--lr", type=float, default=1e-3)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.set_defaults(func=cmd_train)

    p_predict = sub.add_parser("predict")
    p_predict.add_argument("model", help="trained .keras artifact")
    p_predict.add_argument("images", nargs="+", help="input .mhd images")
    p_predict.add_argument("--out", default="masks")
    p_predict.set_defaults(func=cmd_predict)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
