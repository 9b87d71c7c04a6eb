"""Image, dictionary and report file I/O.

Every writer goes through a temporary file in the target directory followed
by a rename, so readers never observe a partial file.
"""

import logging
import os
import struct
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, Mapping, Optional

import numpy as np
import tifffile
from PIL import Image

from src.config.settings import DICTIONARY_MAGIC, DICTIONARY_VERSION
from src.errors import ChecksumError, IoError, UnsupportedFormat, VersionError
from src.models.dictionary import UNIT_NORM_TOL, CoupledDictionary
from src.models.image import MultiBandImage

logger = logging.getLogger(__name__)

PNG_SUFFIXES = (".png",)
TIFF_SUFFIXES = (".tif", ".tiff")
SIXTEEN_BIT_MODES = ("I;16", "I;16L", "I;16B", "I;16N")
LOADED_NORM_TOL = 1e-6

_HEADER = struct.Struct("<4sIII")
_CHECKSUM = struct.Struct("<Q")


@contextmanager
def atomic_path(path: Path) -> Iterator[Path]:
    """Yield a temporary sibling of `path`; rename it over `path` on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.stem}-", suffix=path.suffix)
    os.close(fd)
    tmp_path = Path(tmp)
    try:
        yield tmp_path
        os.replace(tmp_path, path)
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e
    finally:
        if tmp_path.exists():
            tmp_path.unlink()


def _depth_of(dtype: np.dtype) -> int:
    if dtype == np.uint8:
        return 8
    if dtype == np.uint16:
        return 16
    raise UnsupportedFormat(f"unsupported sample type {dtype}; expected 8- or 16-bit")


def _read_png(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        mode = img.mode
        if mode in ("L", "RGB"):
            return np.array(img)
        if mode in SIXTEEN_BIT_MODES:
            return np.array(img).astype(np.uint16)
        if mode == "I":
            arr = np.array(img)
            if arr.min() < 0 or arr.max() > np.iinfo(np.uint16).max:
                raise UnsupportedFormat(f"{path}: 32-bit samples outside the 16-bit range")
            return arr.astype(np.uint16)
    raise UnsupportedFormat(f"{path}: unsupported PNG mode '{mode}'")


def _read_tiff(path: Path) -> np.ndarray:
    arr = tifffile.imread(path)
    if arr.ndim == 3 and arr.shape[0] == 3 and arr.shape[-1] != 3:
        arr = np.moveaxis(arr, 0, -1)
    return arr


def load_image(path: Path) -> MultiBandImage:
    """Read an 8/16-bit grayscale or 3-channel PNG/TIFF into [0, 1]."""
    path = Path(path)
    if not path.is_file():
        raise IoError(f"image not found: {path}")
    suffix = path.suffix.lower()
    try:
        if suffix in PNG_SUFFIXES:
            arr = _read_png(path)
        elif suffix in TIFF_SUFFIXES:
            arr = _read_tiff(path)
        else:
            raise UnsupportedFormat(f"{path}: unsupported extension '{suffix}'")
    except (OSError, ValueError, tifffile.TiffFileError) as e:
        raise IoError(f"cannot read {path}: {e}") from e

    depth = _depth_of(arr.dtype)
    if arr.ndim == 2:
        planes = arr[np.newaxis]
    elif arr.ndim == 3 and arr.shape[-1] == 3:
        planes = np.moveaxis(arr, -1, 0)
    else:
        raise UnsupportedFormat(f"{path}: expected 1 or 3 channels, got shape {arr.shape}")

    data = planes.astype(np.float64) / float(2 ** depth - 1)
    logger.debug("loaded %s: %d band(s), %dx%d, %d-bit", path, planes.shape[0],
                 planes.shape[1], planes.shape[2], depth)
    return MultiBandImage(data=data, bit_depth_origin=depth)


def _to_integers(image: MultiBandImage, depth: int) -> np.ndarray:
    if depth not in (8, 16):
        raise UnsupportedFormat(f"output depth must be 8 or 16, got {depth}")
    scale = float(2 ** depth - 1)
    dtype = np.uint8 if depth == 8 else np.uint16
    return np.round(image.data * scale).astype(dtype)


def quantize(image: MultiBandImage, depth: int) -> MultiBandImage:
    """The image exactly as `load_image` would return it after `save_image`."""
    samples = _to_integers(image, depth)
    return MultiBandImage(data=samples.astype(np.float64) / float(2 ** depth - 1), bit_depth_origin=depth)


def save_image(image: MultiBandImage, path: Path, depth: int = 8) -> Path:
    """Write an image as PNG or TIFF at 8 or 16 bits."""
    path = Path(path)
    samples = _to_integers(image, depth)
    arr = samples[0] if image.bands == 1 else np.moveaxis(samples, 0, -1)
    suffix = path.suffix.lower()
    if suffix in PNG_SUFFIXES:
        if depth == 16 and image.bands == 3:
            raise UnsupportedFormat("16-bit RGB PNG is not supported; write a TIFF instead")
        with atomic_path(path) as tmp:
            Image.fromarray(arr).save(tmp, format="PNG")
    elif suffix in TIFF_SUFFIXES:
        photometric = "minisblack" if image.bands == 1 else "rgb"
        with atomic_path(path) as tmp:
            tifffile.imwrite(tmp, arr, photometric=photometric)
    else:
        raise UnsupportedFormat(f"{path}: unsupported extension '{suffix}'")
    logger.info("wrote %s (%d-bit)", path, depth)
    return path


def _byte_sum(payload: bytes) -> int:
    return int(np.frombuffer(payload, dtype=np.uint8).sum(dtype=np.uint64))


def encode_dictionary(dictionary: CoupledDictionary) -> bytes:
    """CDLF layout: header, D_MS, D_B (row-major float64 LE), byte-sum checksum."""
    header = _HEADER.pack(DICTIONARY_MAGIC, DICTIONARY_VERSION, dictionary.patch_dim, dictionary.atom_count)
    payload = (
        header
        + np.ascontiguousarray(dictionary.d_ms, dtype="<f8").tobytes()
        + np.ascontiguousarray(dictionary.d_b, dtype="<f8").tobytes()
    )
    return payload + _CHECKSUM.pack(_byte_sum(payload))


def decode_dictionary(blob: bytes) -> CoupledDictionary:
    if len(blob) < _HEADER.size + _CHECKSUM.size:
        raise IoError("dictionary file is truncated")
    magic, version, p, atoms = _HEADER.unpack_from(blob)
    if magic != DICTIONARY_MAGIC:
        raise UnsupportedFormat(f"not a dictionary file (magic {magic!r})")
    payload, (stored,) = blob[:-_CHECKSUM.size], _CHECKSUM.unpack(blob[-_CHECKSUM.size:])
    if _byte_sum(payload) != stored:
        raise ChecksumError("dictionary checksum mismatch")
    if version != DICTIONARY_VERSION:
        raise VersionError(f"dictionary format version {version} is not supported")
    expected = _HEADER.size + 2 * 8 * p * atoms
    if len(payload) != expected:
        raise IoError(f"dictionary payload has {len(payload)} bytes, expected {expected}")

    body = np.frombuffer(payload, dtype="<f8", offset=_HEADER.size).astype(np.float64)
    d_ms = body[: p * atoms].reshape(p, atoms)
    d_b = body[p * atoms:].reshape(p, atoms)
    for name, matrix in (("D_MS", d_ms), ("D_B", d_b)):
        deviation = np.max(np.abs(np.linalg.norm(matrix, axis=0) - 1.0))
        if deviation > LOADED_NORM_TOL:
            raise IoError(f"{name} atoms are not unit-norm (deviation {deviation:.3g})")
    if max(np.max(np.abs(np.linalg.norm(d_ms, axis=0) - 1.0)),
           np.max(np.abs(np.linalg.norm(d_b, axis=0) - 1.0))) > UNIT_NORM_TOL:
        d_ms = d_ms / np.linalg.norm(d_ms, axis=0)
        d_b = d_b / np.linalg.norm(d_b, axis=0)
    return CoupledDictionary(d_ms=d_ms, d_b=d_b)


def save_dictionary(dictionary: CoupledDictionary, path: Path) -> Path:
    path = Path(path)
    with atomic_path(path) as tmp:
        tmp.write_bytes(encode_dictionary(dictionary))
    logger.info("wrote dictionary %s (p=%d, A=%d)", path, dictionary.patch_dim, dictionary.atom_count)
    return path


def load_dictionary(path: Path) -> CoupledDictionary:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise IoError(f"cannot read dictionary {path}: {e}") from e
    return decode_dictionary(blob)


def format_value(value: object) -> str:
    """Report value formatting; floats keep every bit."""
    if value is None:
        return "undefined"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_report(sections: Mapping[str, Mapping[str, object]], title: Optional[str] = None) -> str:
    lines = [f"# {title}"] if title else []
    for name, entries in sections.items():
        if lines:
            lines.append("")
        lines.append(f"[{name}]")
        lines.extend(f"{key} = {format_value(value)}" for key, value in entries.items())
    return "\n".join(lines) + "\n"


def write_report(
    path: Path,
    sections: Mapping[str, Mapping[str, object]],
    title: Optional[str] = "SAR / multispectral fusion report",
) -> Path:
    """Write `[section]` blocks of `key = value` lines."""
    path = Path(path)
    with atomic_path(path) as tmp:
        tmp.write_text(render_report(sections, title), encoding="utf-8")
    logger.info("wrote report %s", path)
    return path


def read_report(path: Path) -> Dict[str, Dict[str, str]]:
    """Parse a report back into sections of raw string values."""
    sections: Dict[str, Dict[str, str]] = {}
    current: Optional[Dict[str, str]] = None
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot read report {path}: {e}") from e
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = sections.setdefault(line[1:-1], {})
            continue
        if current is None or "=" not in line:
            raise IoError(f"malformed report line: {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        current[key] = value
    return sections
