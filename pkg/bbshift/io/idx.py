"""
BBShift IDX Files

Reader and writer for the big-endian IDX format used by MNIST-style image
datasets. Images (magic 0x00000803) are stored as unsigned bytes with a
count, rows, columns header; labels (magic 0x00000801) with a count header.
Files ending in ``.gz`` are decompressed transparently.
"""

import gzip
import struct
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from bbshift.core.exceptions import FormatError
from bbshift.core.types import LabelSpace
from bbshift.model.dataset import Dataset
from bbshift.utils.logger import get_logger

logger = get_logger(__name__)

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801

PathLike = Union[str, Path]


def _read_bytes(path: PathLike) -> bytes:
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as f:
        return f.read()


def _header(payload: bytes, path: PathLike, magic: int, dims: int) -> Tuple[int, ...]:
    size = 4 * (1 + dims)
    if len(payload) < size:
        raise FormatError(f"{path}: truncated IDX header ({len(payload)} bytes)")
    fields = struct.unpack(f">{1 + dims}I", payload[:size])
    if fields[0] != magic:
        raise FormatError(f"{path}: bad magic number 0x{fields[0]:08x}, expected 0x{magic:08x}")
    return fields[1:]


def read_idx_images(path: PathLike) -> np.ndarray:
    """Raw images as a uint8 array of shape (count, rows, cols)."""
    payload = _read_bytes(path)
    count, rows, cols = _header(payload, path, IMAGES_MAGIC, 3)
    expected = count * rows * cols
    body = payload[16:]
    if len(body) < expected:
        raise FormatError(f"{path}: truncated payload, {len(body)} of {expected} pixel bytes")
    return np.frombuffer(body[:expected], dtype=np.uint8).reshape(count, rows, cols)


def read_idx_labels(path: PathLike) -> np.ndarray:
    """Raw labels as a uint8 vector."""
    payload = _read_bytes(path)
    (count,) = _header(payload, path, LABELS_MAGIC, 1)
    body = payload[8:]
    if len(body) < count:
        raise FormatError(f"{path}: truncated payload, {len(body)} of {count} label bytes")
    return np.frombuffer(body[:count], dtype=np.uint8)


def load_idx(images_path: PathLike, labels_path: PathLike, space: Optional[LabelSpace] = None) -> Dataset:
    """
    Load an image/label IDX pair as a Dataset.

    Pixels are flattened row-major and divided by 255.

    Args:
        images_path: Images file
        labels_path: Labels file
        space: Label space (default: 10 classes, or more if the labels need it)

    Returns:
        Dataset with one row per image
    """
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise FormatError(f"Count mismatch: {images.shape[0]} images but {labels.shape[0]} labels")

    if space is None:
        space = LabelSpace(max(10, int(labels.max()) + 1 if labels.size else 10))
    features = images.reshape(images.shape[0], -1).astype(np.float64) / 255.0
    logger.info(f"Loaded {images.shape[0]} images of {images.shape[1]}x{images.shape[2]} from {images_path}")
    return Dataset(features, labels.astype(np.int64), space)


def save_idx(
    images: np.ndarray,
    labels: np.ndarray,
    images_path: PathLike,
    labels_path: PathLike,
) -> None:
    """
    Write uint8 images (count×rows×cols) and labels as an IDX pair.

    Paths ending in ``.gz`` are gzip-compressed.
    """
    images = np.asarray(images)
    labels = np.asarray(labels)
    if images.ndim != 3:
        raise FormatError(f"Images must be count×rows×cols, got shape {images.shape}")
    if np.any(images < 0) or np.any(images > 255) or np.any(labels < 0) or np.any(labels > 255):
        raise FormatError("IDX unsigned-byte payloads must lie in 0..255")

    count, rows, cols = images.shape
    image_bytes = struct.pack(">4I", IMAGES_MAGIC, count, rows, cols) + images.astype(np.uint8).tobytes()
    label_bytes = struct.pack(">2I", LABELS_MAGIC, labels.size) + labels.astype(np.uint8).tobytes()

    for path, payload in ((images_path, image_bytes), (labels_path, label_bytes)):
        path = Path(path)
        opener = gzip.open if path.suffix == ".gz" else open
        with opener(path, "wb") as f:
            f.write(payload)
