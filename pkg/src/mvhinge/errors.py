"""Typed errors raised across the toolkit.

Every failure mode callers are expected to handle has its own class; the
CLI maps them onto exit codes (2 for input/parse problems, 3 for
empty-result conditions).
"""

from __future__ import annotations


class MvHingeError(Exception):
    """Base class for all toolkit errors."""


# ---------------------------------------------------------------- mhd_io

class MhdError(MvHingeError):
    """Base class for MetaImage parse/read failures."""


class MissingKey(MhdError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"required header key missing: {name}")


class BadValue(MhdError):
    def __init__(self, name: str, detail: str = ""):
        self.name = name
        msg = f"unparsable value for header key {name}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class UnsupportedDims(MhdError):
    def __init__(self, ndims: int):
        self.ndims = ndims
        super().__init__(f"only 2-D images are supported, got NDims = {ndims}")


class UnsupportedElementType(MhdError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"only MET_UCHAR payloads are supported, got {token}")


class CompressedPayload(MhdError):
    def __init__(self):
        super().__init__("compressed payloads are not supported")


class UnsafeDataFile(MhdError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(
            f"ElementDataFile must be LOCAL or a bare same-directory "
            f"file name, got {path!r}"
        )


class LengthMismatch(MhdError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"payload length mismatch: expected {expected} bytes, got {actual}"
        )


class UnknownLabel(MhdError):
    def __init__(self, value: int):
        self.value = value
        super().__init__(f"payload byte {value} maps to no configured label")


# -------------------------------------------------------------- labelmap

class ShapeMismatch(MvHingeError):
    def __init__(self, shape_a, shape_b, pair_index: int | None = None):
        self.shape_a = shape_a
        self.shape_b = shape_b
        self.pair_index = pair_index
        where = f"pair {pair_index}: " if pair_index is not None else ""
        super().__init__(
            f"{where}label map shapes differ: {shape_a} vs {shape_b}"
        )


# ----------------------------------------------------------------- hinge

class NoContact(MvHingeError):
    def __init__(self):
        super().__init__("no LV-LA contact line")


# ----------------------------------------------------------------- stats

class StatsError(MvHingeError):
    """Base class for statistics failures."""


class EmptySamples(StatsError):
    def __init__(self, what: str = "samples"):
        super().__init__(f"no {what} to operate on")


class SpacingMismatch(StatsError):
    def __init__(self, a, b):
        self.a = a
        self.b = b
        super().__init__(f"hinge pairs use different pixel spacing: {a} vs {b}")


class TooFewSamples(StatsError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"Shapiro-Wilk needs at least 3 samples, got {n}")


class TooManySamples(StatsError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"Shapiro-Wilk supports at most 5000 samples, got {n}")


class ZeroVariance(StatsError):
    def __init__(self):
        super().__init__("all samples are equal; W is undefined")


class MissingCell(StatsError):
    def __init__(self, subgroup, point: str, axis: str):
        self.subgroup = subgroup
        self.point = point
        self.axis = axis
        super().__init__(
            f"calibration table has no entry for ({subgroup}, {point}, {axis})"
        )


# --------------------------------------------------------------- phantom

class SpecOutOfBounds(MvHingeError):
    def __init__(self, detail: str):
        super().__init__(f"phantom spec out of bounds: {detail}")
