"""CAMUS-style MetaImage (.mhd header + .raw payload) parsing and writing.

Only the subset the label-map pipeline needs: 2-D, uncompressed, 8-bit
unsigned rasters stored row-major with the top row first. Header text is
line-oriented `Key = Value`; keys are matched case-sensitively and unknown
keys are carried along untouched.

Payload bytes are re-mapped to the internal 3-label scheme on read. The
CAMUS ground-truth alphabet is {0: background, 1: LV, 2: myocardium,
3: LA}; myocardium is folded into background because it plays no role in
mitral valve measurement. Prediction masks that already use {0, 1, 2}
load through RAW012_MAPPING instead.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadValue,
    CompressedPayload,
    LengthMismatch,
    MissingKey,
    UnknownLabel,
    UnsafeDataFile,
    UnsupportedDims,
    UnsupportedElementType,
)
from .labelmap import BG, LA, LV, LabelMap

ELEMENT_TYPE_UCHAR = "MET_UCHAR"
LOCAL_MARKER = "LOCAL"

# byte value in the file -> internal label
CAMUS_GT_MAPPING: dict[int, int] = {0: BG, 1: LV, 2: BG, 3: LA}
RAW012_MAPPING: dict[int, int] = {0: BG, 1: LV, 2: LA}

# internal label -> byte value written out (CAMUS convention, myocardium unused)
DEFAULT_WRITE_MAPPING: dict[int, int] = {BG: 0, LV: 1, LA: 3}

MAPPINGS_BY_NAME = {"camus": CAMUS_GT_MAPPING, "raw012": RAW012_MAPPING}

_KNOWN_KEYS = frozenset(
    {
        "NDims",
        "DimSize",
        "ElementSpacing",
        "ElementType",
        "ElementDataFile",
        "CompressedData",
        "BinaryDataByteOrderMSB",
        "ElementByteOrderMSB",
    }
)


@dataclass(frozen=True)
class ImageMeta:
    """Parsed header fields of one 2-D MetaImage."""

    ndims: int
    dim_size: tuple[int, int]  # (width, height) in px
    element_spacing: tuple[float, float]  # (sx, sy) in mm/px
    element_type: str
    data_file: str
    byte_order_msb: bool = False
    extra: tuple[tuple[str, str], ...] = ()  # unknown keys, order preserved
    warnings: tuple[str, ...] = ()

    @property
    def width(self) -> int:
        return self.dim_size[0]

    @property
    def height(self) -> int:
        return self.dim_size[1]


def _parse_bool(key: str, value: str) -> bool:
    v = value.lower()
    if v == "true":
        return True
    if v == "false":
        return False
    raise BadValue(key, f"expected True/False, got {value!r}")


def _parse_ints(key: str, value: str, count: int) -> tuple[int, ...]:
    parts = value.split()
    if len(parts) != count:
        raise BadValue(key, f"expected {count} integers, got {len(parts)}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise BadValue(key, f"non-integer token in {value!r}") from None


def _parse_floats(key: str, value: str, count: int) -> tuple[float, ...]:
    parts = value.split()
    if len(parts) != count:
        raise BadValue(key, f"expected {count} decimals, got {len(parts)}")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise BadValue(key, f"non-numeric token in {value!r}") from None
    if not all(np.isfinite(v) for v in vals):
        raise BadValue(key, f"non-finite value in {value!r}")
    return vals


def parse_mhd_header(text: bytes | str) -> ImageMeta:
    """Parse MetaImage header text into an ImageMeta.

    Every input either yields an ImageMeta or raises a typed MhdError
    subclass; nothing else escapes.
    """
    if isinstance(text, bytes):
        text = text.decode("latin-1")
    fields: dict[str, str] = {}
    extra: list[tuple[str, str]] = []
    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        if "=" not in line:
            raise BadValue("header", f"line without '=': {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise BadValue("header", f"empty key in line {line!r}")
        if key in _KNOWN_KEYS:
            fields[key] = value
        else:
            extra.append((key, value))

    for required in ("NDims", "DimSize", "ElementType", "ElementDataFile"):
        if required not in fields:
            raise MissingKey(required)

    (ndims,) = _parse_ints("NDims", fields["NDims"], 1)
    if ndims != 2:
        raise UnsupportedDims(ndims)

    dim_size = _parse_ints("DimSize", fields["DimSize"], ndims)
    if any(d < 1 for d in dim_size):
        raise BadValue("DimSize", f"dimensions must be >= 1, got {dim_size}")

    element_type = fields["ElementType"]
    if element_type != ELEMENT_TYPE_UCHAR:
        raise UnsupportedElementType(element_type)

    warnings: list[str] = []
    if "ElementSpacing" in fields:
        spacing = _parse_floats("ElementSpacing", fields["ElementSpacing"], ndims)
        if any(s <= 0 for s in spacing):
            raise BadValue(
                "ElementSpacing", f"spacing must be strictly positive, got {spacing}"
            )
    else:
        spacing = (1.0, 1.0)
        warnings.append("ElementSpacing missing; defaulted to (1.0, 1.0)")

    if "CompressedData" in fields and _parse_bool(
        "CompressedData", fields["CompressedData"]
    ):
        raise CompressedPayload()

    byte_order_msb = False
    for key in ("BinaryDataByteOrderMSB", "ElementByteOrderMSB"):
        if key in fields:
            byte_order_msb = _parse_bool(key, fields[key])

    data_file = fields["ElementDataFile"]
    if not data_file:
        raise BadValue("ElementDataFile", "empty value")

    return ImageMeta(
        ndims=ndims,
        dim_size=(dim_size[0], dim_size[1]),
        element_spacing=(spacing[0], spacing[1]),
        element_type=element_type,
        data_file=data_file,
        byte_order_msb=byte_order_msb,
        extra=tuple(extra),
        warnings=tuple(warnings),
    )


def _mapping_lut(mapping: dict[int, int]) -> np.ndarray:
    lut = np.full(256, 255, dtype=np.uint8)
    for byte_value, label in mapping.items():
        lut[byte_value] = label
    return lut


def read_label_map(
    meta: ImageMeta, payload: bytes, mapping: dict[int, int] | None = None
) -> LabelMap:
    """Decode a raw payload into a LabelMap using a byte-to-label mapping.

    Default mapping is the CAMUS ground-truth convention (myocardium byte 2
    folds into background).
    """
    if mapping is None:
        mapping = CAMUS_GT_MAPPING
    expected = meta.width * meta.height
    if len(payload) != expected:
        raise LengthMismatch(expected, len(payload))
    raw = np.frombuffer(payload, dtype=np.uint8).reshape(meta.height, meta.width)
    lut = _mapping_lut(mapping)
    mapped = lut[raw]
    if (mapped == 255).any():
        bad = int(raw[mapped == 255].flat[0])
        raise UnknownLabel(bad)
    return LabelMap(mapped, spacing=meta.element_spacing)


def write_label_map(
    m: LabelMap,
    data_file: str = LOCAL_MARKER,
    write_mapping: dict[int, int] | None = None,
) -> tuple[bytes, bytes]:
    """Encode a LabelMap as (header bytes, payload bytes).

    Round-trips bit-exactly: parse_mhd_header + read_label_map over the
    output reproduce the input map. Spacing values are formatted with
    repr(), which is the shortest exact float representation.
    """
    if write_mapping is None:
        write_mapping = DEFAULT_WRITE_MAPPING
    sx, sy = m.spacing
    header = (
        "ObjectType = Image\n"
        "NDims = 2\n"
        "BinaryData = True\n"
        "BinaryDataByteOrderMSB = False\n"
        "CompressedData = False\n"
        f"DimSize = {m.width} {m.height}\n"
        f"ElementSpacing = {sx!r} {sy!r}\n"
        "ElementType = MET_UCHAR\n"
        f"ElementDataFile = {data_file}\n"
    ).encode("ascii")
    lut = np.zeros(256, dtype=np.uint8)
    for label, byte_value in write_mapping.items():
        lut[label] = byte_value
    payload = lut[m.labels].tobytes()
    return header, payload


def _safe_data_file(name: str) -> str:
    """Reject anything but a bare same-directory file name."""
    if os.path.isabs(name) or "/" in name or "\\" in name or name in (".", ".."):
        raise UnsafeDataFile(name)
    return name


def _split_header_and_local_payload(data: bytes) -> tuple[bytes, bytes]:
    """Split file bytes at the end of the ElementDataFile line.

    ElementDataFile is the last header entry by convention; with a LOCAL
    marker the payload follows immediately after its newline.
    """
    offset = 0
    for line in data.splitlines(keepends=True):
        end = offset + len(line)
        key = line.split(b"=")[0].strip()
        if key == b"ElementDataFile":
            return data[:end], data[end:]
        offset = end
    return data, b""


def read_mhd_file(path: str | Path) -> tuple[ImageMeta, bytes]:
    """Read header and payload bytes from an .mhd (or single-file) image."""
    path = Path(path)
    data = path.read_bytes()
    header, local_payload = _split_header_and_local_payload(data)
    meta = parse_mhd_header(header)
    if meta.data_file == LOCAL_MARKER:
        payload = local_payload
    else:
        name = _safe_data_file(meta.data_file)
        payload = (path.parent / name).read_bytes()
    return meta, payload


def load_label_map(
    path: str | Path, mapping: dict[int, int] | None = None
) -> LabelMap:
    """Load a label map from an .mhd file (payload LOCAL or sibling .raw)."""
    meta, payload = read_mhd_file(path)
    return read_label_map(meta, payload, mapping)


def save_label_map(
    m: LabelMap, path: str | Path, write_mapping: dict[int, int] | None = None
) -> Path:
    """Write `m` as an .mhd header plus a sibling .raw payload file."""
    path = Path(path)
    raw_name = path.stem + ".raw"
    header, payload = write_label_map(m, data_file=raw_name, write_mapping=write_mapping)
    path.write_bytes(header)
    raw_path = path.parent / raw_name
    raw_path.write_bytes(payload)
    return raw_path
