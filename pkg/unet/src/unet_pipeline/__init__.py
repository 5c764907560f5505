"""Chamber-segmentation training pipeline.

Trains a VGG16-backbone U-Net on the CAMUS dataset and exports predicted
LV/LA label masks as MetaImage files; the measurement toolkit consumes
those files through its own parser, so the two packages only share a file
format, never code.
"""

from .dataset import DatasetMissing, SplitLeakage, find_patients, split_patients
from .model import build_unet
from .predict import predict_mask, predict_masks
from .train import TrainConfig, train

__version__ = "0.1.0"
