"""Image, dictionary and report files."""

import struct

import numpy as np
import pytest

from src.errors import ChecksumError, IoError, UnsupportedFormat, VersionError
from src.models.dictionary import CoupledDictionary
from src.models.image import MultiBandImage
from src.tools.io_tools import (
    decode_dictionary,
    encode_dictionary,
    load_dictionary,
    load_image,
    quantize,
    read_report,
    save_dictionary,
    save_image,
    write_report,
)


def _with_checksum(payload: bytes) -> bytes:
    total = int(np.frombuffer(payload, dtype=np.uint8).sum(dtype=np.uint64))
    return payload + struct.pack("<Q", total)


@pytest.fixture
def dictionary(rng):
    d_ms = rng.standard_normal((12, 5))
    d_b = rng.standard_normal((12, 5))
    return CoupledDictionary(
        d_ms=d_ms / np.linalg.norm(d_ms, axis=0),
        d_b=d_b / np.linalg.norm(d_b, axis=0),
    )


class TestDictionaryFile:
    def test_save_and_load_preserve_atoms(self, dictionary, tmp_path):
        path = save_dictionary(dictionary, tmp_path / "dict.cdlf")
        loaded = load_dictionary(path)
        np.testing.assert_array_equal(loaded.d_ms, dictionary.d_ms)
        np.testing.assert_array_equal(loaded.d_b, dictionary.d_b)

    def test_header_layout(self, dictionary):
        blob = encode_dictionary(dictionary)
        assert blob[:4] == b"CDLF"
        assert struct.unpack_from("<III", blob, 4) == (1, 12, 5)
        assert len(blob) == 16 + 2 * 8 * 12 * 5 + 8

    def test_corrupted_byte(self, dictionary):
        blob = bytearray(encode_dictionary(dictionary))
        blob[40] ^= 0x01
        with pytest.raises(ChecksumError):
            decode_dictionary(bytes(blob))

    def test_unknown_version(self, dictionary):
        payload = bytearray(encode_dictionary(dictionary)[:-8])
        struct.pack_into("<I", payload, 4, 2)
        with pytest.raises(VersionError):
            decode_dictionary(_with_checksum(bytes(payload)))

    def test_bad_magic(self, dictionary):
        blob = b"XXXX" + encode_dictionary(dictionary)[4:]
        with pytest.raises(UnsupportedFormat):
            decode_dictionary(blob)

    def test_length_disagrees_with_header(self, dictionary):
        payload = bytearray(encode_dictionary(dictionary)[:-8])
        struct.pack_into("<I", payload, 12, 6)
        with pytest.raises(IoError):
            decode_dictionary(_with_checksum(bytes(payload)))

    def test_truncated(self):
        with pytest.raises(IoError):
            decode_dictionary(b"CDLF")

    def test_non_unit_atoms_rejected(self, dictionary):
        payload = bytearray(encode_dictionary(dictionary)[:-8])
        struct.pack_into("<d", payload, 16, 5.0)
        with pytest.raises(IoError):
            decode_dictionary(_with_checksum(bytes(payload)))

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            load_dictionary(tmp_path / "absent.cdlf")


class TestImageFiles:
    def test_rgb_png(self, ms_image, tmp_path):
        path = save_image(ms_image, tmp_path / "ms.png")
        loaded = load_image(path)
        assert loaded.bands == 3
        assert loaded.bit_depth_origin == 8
        np.testing.assert_allclose(loaded.data, ms_image.data, atol=0.5 / 255 + 1e-12)

    def test_gray_png(self, sar_image, tmp_path):
        loaded = load_image(save_image(sar_image, tmp_path / "sar.png"))
        assert loaded.bands == 1
        assert loaded.shape == sar_image.shape

    def test_sixteen_bit_tiff(self, ms_image, sar_image, tmp_path):
        for image, name in ((ms_image, "ms.tif"), (sar_image, "sar.tiff")):
            loaded = load_image(save_image(image, tmp_path / name, depth=16))
            assert loaded.bit_depth_origin == 16
            assert loaded.bands == image.bands
            np.testing.assert_allclose(loaded.data, image.data, atol=0.5 / 65535 + 1e-12)

    def test_quantize_matches_reload(self, ms_image, tmp_path):
        loaded = load_image(save_image(ms_image, tmp_path / "ms.png"))
        np.testing.assert_array_equal(quantize(ms_image, 8).data, loaded.data)

    def test_sixteen_bit_rgb_png_is_refused(self, ms_image, tmp_path):
        with pytest.raises(UnsupportedFormat):
            save_image(ms_image, tmp_path / "ms.png", depth=16)
        assert not list(tmp_path.iterdir())

    def test_unknown_extension(self, ms_image, tmp_path):
        with pytest.raises(UnsupportedFormat):
            save_image(ms_image, tmp_path / "ms.jpg")
        (tmp_path / "ms.bmp").write_bytes(b"BM")
        with pytest.raises(UnsupportedFormat):
            load_image(tmp_path / "ms.bmp")

    def test_missing_image(self, tmp_path):
        with pytest.raises(IoError):
            load_image(tmp_path / "absent.png")

    def test_rejects_depth_outside_eight_and_sixteen(self, sar_image):
        with pytest.raises(UnsupportedFormat):
            quantize(sar_image, 12)


class TestReports:
    def test_values_read_back_exactly(self, tmp_path):
        value = 0.1 + 0.2
        path = write_report(
            tmp_path / "report.txt",
            {"metrics": {"cc.overall": value, "cc_sar.mean": None}, "config": {"rounds": 3, "match_sar": True}},
        )
        sections = read_report(path)
        assert float(sections["metrics"]["cc.overall"]) == value
        assert sections["metrics"]["cc_sar.mean"] == "undefined"
        assert sections["config"] == {"rounds": "3", "match_sar": "true"}

    def test_identical_sections_render_identically(self, tmp_path):
        sections = {"metrics": {"a": 1.0 / 3.0, "b": 2}}
        first = write_report(tmp_path / "a.txt", sections).read_text()
        second = write_report(tmp_path / "b.txt", sections).read_text()
        assert first == second

    def test_malformed_report(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("key = value\n")
        with pytest.raises(IoError):
            read_report(path)
