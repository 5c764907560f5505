"""Minimal MetaImage I/O for the training pipeline.

Deliberately self-contained: the trainer exchanges files with the
measurement toolkit but never links against it, so it carries its own
small reader/writer. Reads 2-D grayscale images and label masks; writes
8-bit masks with the input's spacing.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

DTYPES = {
    "MET_UCHAR": np.uint8,
    "MET_CHAR": np.int8,
    "MET_SHORT": np.int16,
    "MET_USHORT": np.uint16,
    "MET_INT": np.int32,
    "MET_UINT": np.uint32,
    "MET_FLOAT": np.float32,
    "MET_DOUBLE": np.float64,
}


def read_image(path: str | Path) -> tuple[np.ndarray, tuple[float, float]]:
    """Read a 2-D MetaImage; returns (array[h, w], (sx, sy))."""
    path = Path(path)
    data = path.read_bytes()
    fields: dict[str, str] = {}
    payload_offset = None
    offset = 0
    for line in data.splitlines(keepends=True):
        stripped = line.strip()
        offset += len(line)
        if not stripped or b"=" not in stripped:
            continue
        key, _, value = stripped.partition(b"=")
        key = key.strip().decode("ascii", "replace")
        fields[key] = value.strip().decode("ascii", "replace")
        if key == "ElementDataFile":
            payload_offset = offset
            break
    if "ElementDataFile" not in fields:
        raise ValueError(f"{path}: no ElementDataFile key")
    ndims = int(fields.get("NDims", "0"))
    dims = [int(v) for v in fields["DimSize"].split()]
    if ndims == 3 and dims[2] == 1:  # tolerate single-slice volumes
        dims = dims[:2]
    elif ndims != 2:
        raise ValueError(f"{path}: expected a 2-D image, NDims = {ndims}")
    width, height = dims[0], dims[1]
    spacing_tokens = fields.get("ElementSpacing", "1 1").split()
    spacing = (float(spacing_tokens[0]), float(spacing_tokens[1]))
    dtype = DTYPES.get(fields.get("ElementType", ""))
    if dtype is None:
        raise ValueError(f"{path}: unsupported ElementType {fields.get('ElementType')}")
    if fields.get("CompressedData", "False").lower() == "true":
        raise ValueError(f"{path}: compressed payloads not supported")
    if fields["ElementDataFile"] == "LOCAL":
        payload = data[payload_offset:]
    else:
        payload = (path.parent / fields["ElementDataFile"]).read_bytes()
    count = width * height
    arr = np.frombuffer(payload, dtype=dtype, count=count)
    if arr.size != count:
        raise ValueError(f"{path}: payload too short for {width}x{height}")
    return arr.reshape(height, width).copy(), spacing


def write_mask(
    labels: np.ndarray, spacing: tuple[float, float], path: str | Path
) -> None:
    """Write a uint8 label mask as an .mhd header plus sibling .raw file."""
    path = Path(path)
    arr = np.ascontiguousarray(labels, dtype=np.uint8)
    if arr.ndim != 2:
        raise ValueError("mask must be 2-D")
    raw_name = path.stem + ".raw"
    header = (
        "ObjectType = Image\n"
        "NDims = 2\n"
        "BinaryData = True\n"
        "BinaryDataByteOrderMSB = False\n"
        "CompressedData = False\n"
        f"DimSize = {arr.shape[1]} {arr.shape[0]}\n"
        f"ElementSpacing = {spacing[0]!r} {spacing[1]!r}\n"
        "ElementType = MET_UCHAR\n"
        f"ElementDataFile = {raw_name}\n"
    )
    path.write_text(header)
    (path.parent / raw_name).write_bytes(arr.tobytes())
