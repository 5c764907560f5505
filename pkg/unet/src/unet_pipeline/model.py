"""U-Net with a VGG16-style encoder for 3-class chamber segmentation."""

from __future__ import annotations

from tensorflow import keras
from tensorflow.keras import layers

from .dataset import NUM_CLASSES

# VGG16 convolutional ladder: (convs per block, channels)
VGG16_BLOCKS = ((2, 64), (2, 128), (3, 256), (3, 512), (3, 512))


def _conv_block(x, convs: int, channels: int, name: str):
    # He init keeps gradients alive through the deep relu ladder; a
    # randomly initialized VGG16 barely trains under the Keras default.
    for i in range(convs):
        x = layers.Conv2D(
            channels, 3, padding="same", activation="relu",
            kernel_initializer="he_normal",
            name=f"{name}_conv{i + 1}",
        )(x)
    return x


def build_unet(input_size: int, num_classes: int = NUM_CLASSES) -> keras.Model:
    """Encoder-decoder with skip connections and a softmax head.

    The input grid must be divisible by 16 (four pooling stages).
    """
    if input_size % 16 != 0:
        raise ValueError(f"input_size must be a multiple of 16, got {input_size}")
    inputs = keras.Input((input_size, input_size, 1), name="image")
    x = inputs
    skips = []
    for b, (convs, channels) in enumerate(VGG16_BLOCKS, start=1):
        x = _conv_block(x, convs, channels, f"enc{b}")
        if b < len(VGG16_BLOCKS):
            skips.append(x)
            x = layers.MaxPooling2D(2, name=f"enc{b}_pool")(x)

    for b, skip in enumerate(reversed(skips), start=1):
        channels = skip.shape[-1]
        x = layers.Conv2DTranspose(
            channels, 2, strides=2, padding="same", name=f"dec{b}_up"
        )(x)
        x = layers.Concatenate(name=f"dec{b}_skip")([x, skip])
        x = _conv_block(x, 2, channels, f"dec{b}")

    outputs = layers.Conv2D(
        num_classes, 1, activation="softmax", name="class_scores"
    )(x)
    return keras.Model(inputs, outputs, name="vgg16_unet")
