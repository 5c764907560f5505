import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mvhinge import mhd_io
from mvhinge.errors import (
    BadValue,
    CompressedPayload,
    LengthMismatch,
    MhdError,
    MissingKey,
    UnknownLabel,
    UnsafeDataFile,
    UnsupportedDims,
    UnsupportedElementType,
)
from mvhinge.labelmap import BG, LA, LV, LabelMap

GOOD_HEADER = (
    "NDims = 2\n"
    "DimSize = 600 800\n"
    "ElementSpacing = 0.3 0.15\n"
    "ElementType = MET_UCHAR\n"
    "ElementDataFile = img.raw\n"
)


def header_without(key: str) -> str:
    return "".join(
        line + "\n"
        for line in GOOD_HEADER.splitlines()
        if not line.startswith(key + " ")
    )


class TestParseHeader:
    def test_camus_style_header(self):
        meta = mhd_io.parse_mhd_header(GOOD_HEADER.encode())
        assert meta.ndims == 2
        assert meta.dim_size == (600, 800)
        assert meta.element_spacing == (0.3, 0.15)
        assert meta.element_type == "MET_UCHAR"
        assert meta.data_file == "img.raw"
        assert meta.byte_order_msb is False
        assert meta.warnings == ()

    def test_missing_spacing_defaults_with_warning(self):
        meta = mhd_io.parse_mhd_header(header_without("ElementSpacing"))
        assert meta.element_spacing == (1.0, 1.0)
        assert len(meta.warnings) == 1
        assert "ElementSpacing" in meta.warnings[0]

    def test_ndims_3_rejected(self):
        header = GOOD_HEADER.replace("NDims = 2", "NDims = 3").replace(
            "DimSize = 600 800", "DimSize = 600 800 10"
        )
        with pytest.raises(UnsupportedDims):
            mhd_io.parse_mhd_header(header)

    @pytest.mark.parametrize(
        "key", ["NDims", "DimSize", "ElementType", "ElementDataFile"]
    )
    def test_missing_required_key(self, key):
        with pytest.raises(MissingKey) as excinfo:
            mhd_io.parse_mhd_header(header_without(key))
        assert excinfo.value.name == key

    def test_unknown_keys_preserved_in_order(self):
        header = "Comment = hello\n" + GOOD_HEADER + "Offset = 0 0\n"
        meta = mhd_io.parse_mhd_header(header)
        assert meta.extra == (("Comment", "hello"), ("Offset", "0 0"))

    def test_keys_are_case_sensitive(self):
        header = GOOD_HEADER.replace("NDims", "ndims")
        with pytest.raises(MissingKey):
            mhd_io.parse_mhd_header(header)

    def test_value_whitespace_stripped(self):
        header = GOOD_HEADER.replace("img.raw", "img.raw   \t")
        assert mhd_io.parse_mhd_header(header).data_file == "img.raw"

    def test_compressed_rejected(self):
        header = GOOD_HEADER + "CompressedData = True\n"
        with pytest.raises(CompressedPayload):
            mhd_io.parse_mhd_header(header)

    def test_compressed_false_accepted(self):
        header = GOOD_HEADER + "CompressedData = False\n"
        assert mhd_io.parse_mhd_header(header).dim_size == (600, 800)

    def test_byte_order_flag(self):
        header = GOOD_HEADER + "BinaryDataByteOrderMSB = True\n"
        assert mhd_io.parse_mhd_header(header).byte_order_msb is True

    @pytest.mark.parametrize(
        "bad,key",
        [
            ("NDims = two", "NDims"),
            ("DimSize = 600", "DimSize"),
            ("DimSize = 600 800 900", "DimSize"),
            ("DimSize = 600 8.5", "DimSize"),
            ("DimSize = 0 800", "DimSize"),
            ("ElementSpacing = 0.3", "ElementSpacing"),
            ("ElementSpacing = 0.3 abc", "ElementSpacing"),
            ("ElementSpacing = 0.3 0.0", "ElementSpacing"),
            ("ElementSpacing = 0.3 -0.15", "ElementSpacing"),
            ("ElementSpacing = 0.3 nan", "ElementSpacing"),
        ],
    )
    def test_bad_values(self, bad, key):
        lines = {line.split(" =")[0]: line for line in GOOD_HEADER.splitlines()}
        lines[bad.split(" =")[0]] = bad
        header = "".join(v + "\n" for v in lines.values())
        with pytest.raises(BadValue) as excinfo:
            mhd_io.parse_mhd_header(header)
        assert excinfo.value.name == key

    @pytest.mark.parametrize("token", ["MET_SHORT", "MET_FLOAT", "MET_CHAR", "uchar"])
    def test_unsupported_element_type(self, token):
        header = GOOD_HEADER.replace("MET_UCHAR", token)
        with pytest.raises(UnsupportedElementType):
            mhd_io.parse_mhd_header(header)


# Malformed inputs that must produce a typed MhdError, never anything else.
FUZZ_CORPUS = [
    b"",
    b"\n\n\n",
    b"garbage",
    b"= value\n",
    b"NDims\n",
    b"NDims = \n" + GOOD_HEADER.replace("NDims = 2\n", "").encode(),
    b"NDims = 2\nNDims = x\nDimSize = 2 2\nElementType = MET_UCHAR\nElementDataFile = a.raw\n",
    GOOD_HEADER.replace("2", "-2", 1).encode(),
    GOOD_HEADER.replace("600 800", "99999999999999999999999999 1").encode(),
    GOOD_HEADER.replace("0.3 0.15", "1e400 0.15").encode(),
    GOOD_HEADER.replace("0.3 0.15", "inf 0.15").encode(),
    GOOD_HEADER.encode() + b"CompressedData = maybe\n",
    GOOD_HEADER.encode() + b"BinaryDataByteOrderMSB = 7\n",
    GOOD_HEADER.replace("ElementDataFile = img.raw", "ElementDataFile =").encode(),
    b"\x00\x01\x02\x03\xff\xfe",
    b"NDims = 2\x00\n",
    "NDims = é\n".encode("latin-1"),
    b"ElementDataFile = a.raw\nNDims = 2\n",  # missing DimSize/ElementType
    b"DimSize = 2 2\nElementType = MET_UCHAR\nElementDataFile = LOCAL\n",
    b"NDims = 02\nDimSize = 2 2\nElementType = MET_UCHAR\nElementDataFile",
    GOOD_HEADER.replace("=", "==", 1).encode(),
    b"NDims = 1\nDimSize = 4\nElementType = MET_UCHAR\nElementDataFile = a.raw\n",
]


class TestParserTotality:
    @pytest.mark.parametrize("blob", FUZZ_CORPUS, ids=range(len(FUZZ_CORPUS)))
    def test_fuzz_corpus_yields_typed_errors(self, blob):
        try:
            meta = mhd_io.parse_mhd_header(blob)
        except MhdError:
            return
        assert isinstance(meta, mhd_io.ImageMeta)

    @given(st.binary(max_size=400))
    @settings(max_examples=300)
    def test_random_bytes_never_crash(self, blob):
        try:
            mhd_io.parse_mhd_header(blob)
        except MhdError:
            pass


class TestReadLabelMap:
    def meta(self, w, h, spacing=(1.0, 1.0)):
        return mhd_io.ImageMeta(
            ndims=2,
            dim_size=(w, h),
            element_spacing=spacing,
            element_type="MET_UCHAR",
            data_file="LOCAL",
        )

    def test_camus_mapping(self):
        m = mhd_io.read_label_map(self.meta(2, 2), bytes([0, 1, 1, 3]))
        assert m.labels.tolist() == [[BG, LV], [LV, LA]]

    def test_myocardium_folds_to_background(self):
        m = mhd_io.read_label_map(self.meta(2, 2), bytes([0, 1, 2, 3]))
        assert m.labels.tolist() == [[BG, LV], [BG, LA]]

    def test_raw012_mapping(self):
        m = mhd_io.read_label_map(
            self.meta(2, 2), bytes([0, 1, 2, 2]), mhd_io.RAW012_MAPPING
        )
        assert m.labels.tolist() == [[BG, LV], [LA, LA]]

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch) as excinfo:
            mhd_io.read_label_map(self.meta(600, 800), bytes(479999))
        assert excinfo.value.expected == 480000
        assert excinfo.value.actual == 479999

    def test_unknown_label(self):
        with pytest.raises(UnknownLabel) as excinfo:
            mhd_io.read_label_map(self.meta(2, 1), bytes([0, 7]))
        assert excinfo.value.value == 7

    def test_row_major_top_row_first(self):
        m = mhd_io.read_label_map(self.meta(3, 2), bytes([1, 1, 1, 3, 3, 3]))
        assert m.labels[0].tolist() == [LV, LV, LV]
        assert m.labels[1].tolist() == [LA, LA, LA]

    def test_spacing_copied(self):
        m = mhd_io.read_label_map(self.meta(1, 1, (0.3, 0.15)), bytes([0]))
        assert m.spacing == (0.3, 0.15)


def roundtrip(m: LabelMap) -> LabelMap:
    header, payload = mhd_io.write_label_map(m)
    meta = mhd_io.parse_mhd_header(header)
    return mhd_io.read_label_map(meta, payload)


class TestWriteLabelMap:
    def test_roundtrip_identity(self):
        m = LabelMap([[BG, LV], [LV, LA]], spacing=(0.3, 0.15))
        assert roundtrip(m) == m

    def test_header_spacing_line(self):
        m = LabelMap([[LV]], spacing=(0.3, 0.15))
        header, _ = mhd_io.write_label_map(m)
        assert b"ElementSpacing = 0.3 0.15" in header

    def test_single_background_pixel_payload(self):
        _, payload = mhd_io.write_label_map(LabelMap([[BG]]))
        assert payload == b"\x00"

    def test_la_written_as_camus_byte_3(self):
        _, payload = mhd_io.write_label_map(LabelMap([[LA]]))
        assert payload == b"\x03"

    @given(
        arrays(np.uint8, st.tuples(st.integers(1, 24), st.integers(1, 24)),
               elements=st.integers(0, 2)),
        st.floats(0.01, 10.0, allow_nan=False),
        st.floats(0.01, 10.0, allow_nan=False),
    )
    @settings(max_examples=200, deadline=None)
    def test_roundtrip_property(self, labels, sx, sy):
        m = LabelMap(labels, spacing=(sx, sy))
        back = roundtrip(m)
        assert np.array_equal(back.labels, m.labels)
        assert back.spacing == m.spacing


class TestFileIo:
    def test_save_load_pair(self, tmp_path):
        m = LabelMap([[BG, LV], [LV, LA]], spacing=(0.3, 0.15))
        raw = mhd_io.save_label_map(m, tmp_path / "case.mhd")
        assert raw == tmp_path / "case.raw"
        assert mhd_io.load_label_map(tmp_path / "case.mhd") == m

    def test_load_local_payload(self, tmp_path):
        m = LabelMap([[LV, LA]], spacing=(2.0, 3.0))
        header, payload = mhd_io.write_label_map(m, data_file="LOCAL")
        path = tmp_path / "inline.mha"
        path.write_bytes(header + payload)
        assert mhd_io.load_label_map(path) == m

    @pytest.mark.parametrize("name", ["/abs/path.raw", "../up.raw", "sub/dir.raw"])
    def test_unsafe_data_file_rejected(self, tmp_path, name):
        m = LabelMap([[LV]])
        header, _ = mhd_io.write_label_map(m, data_file=name)
        path = tmp_path / "evil.mhd"
        path.write_bytes(header)
        with pytest.raises(UnsafeDataFile):
            mhd_io.load_label_map(path)

    def test_missing_raw_file(self, tmp_path):
        path = tmp_path / "orphan.mhd"
        path.write_bytes(GOOD_HEADER.encode())
        with pytest.raises(OSError):
            mhd_io.load_label_map(path)
