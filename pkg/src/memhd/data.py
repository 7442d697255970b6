"""Dataset ingestion: IDX image/label containers and the ISOLET CSV pair.

All loaders produce a LabeledDataset with features scaled into [0, 1]
(pixels by /255, ISOLET by train-set min-max) and integer labels in
[0, k). Files ending in .gz are decompressed transparently.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .rng import Xoshiro256, derive_seed

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


class DataFormatError(ValueError):
    """A dataset file violates its container format."""


class BadMagicError(DataFormatError):
    pass


class TruncatedFileError(DataFormatError):
    pass


class CountMismatchError(DataFormatError):
    pass


@dataclass
class LabeledDataset:
    """f-dimensional feature vectors with class labels in [0, k)."""

    name: str
    f: int
    k: int
    features: np.ndarray  # (n, f) float64 in [0, 1]
    labels: np.ndarray    # (n,) int32

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int32)
        if feats.ndim != 2 or feats.shape[1] != self.f:
            raise ValueError(f"features must be (n, {self.f}), got {feats.shape}")
        if labels.shape != (feats.shape[0],):
            raise ValueError("labels must align with feature rows")
        if not np.isfinite(feats).all():
            raise DataFormatError(f"{self.name}: non-finite feature value")
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise ValueError(f"labels must lie in [0, {self.k})")
        self.features = feats
        self.labels = labels

    def __len__(self) -> int:
        return self.labels.size

    def __getitem__(self, i: int) -> tuple[np.ndarray, int]:
        return self.features[i], int(self.labels[i])

    def feature_matrix(self) -> np.ndarray:
        return self.features

    def label_vector(self) -> np.ndarray:
        return self.labels

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices)
        return LabeledDataset(self.name, self.f, self.k, self.features[idx], self.labels[idx])


def _read_exact(fh, n: int, path, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise TruncatedFileError(f"{path}: truncated while reading {what} "
                                 f"(wanted {n} bytes, got {len(data)})")
    return data


def _open_maybe_gz(path):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _read_idx_images(path) -> np.ndarray:
    with _open_maybe_gz(path) as fh:
        magic, = struct.unpack(">I", _read_exact(fh, 4, path, "magic"))
        if magic != IDX_IMAGE_MAGIC:
            raise BadMagicError(
                f"{path}: image magic 0x{magic:08x}, expected 0x{IDX_IMAGE_MAGIC:08x}"
            )
        count, rows, cols = struct.unpack(">III", _read_exact(fh, 12, path, "dimensions"))
        raw = _read_exact(fh, count * rows * cols, path, f"{count} images")
        return np.frombuffer(raw, dtype=np.uint8).reshape(count, rows * cols)


def _read_idx_labels(path) -> np.ndarray:
    with _open_maybe_gz(path) as fh:
        magic, = struct.unpack(">I", _read_exact(fh, 4, path, "magic"))
        if magic != IDX_LABEL_MAGIC:
            raise BadMagicError(
                f"{path}: label magic 0x{magic:08x}, expected 0x{IDX_LABEL_MAGIC:08x}"
            )
        count, = struct.unpack(">I", _read_exact(fh, 4, path, "count"))
        raw = _read_exact(fh, count, path, f"{count} labels")
        return np.frombuffer(raw, dtype=np.uint8).astype(np.int32)


def load_idx(images_path, labels_path, name: str = "idx") -> LabeledDataset:
    """Load an IDX image/label file pair (row-major pixels scaled by /255)."""
    images = _read_idx_images(images_path)
    labels = _read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise CountMismatchError(
            f"{images_path} has {images.shape[0]} images but "
            f"{labels_path} has {labels.shape[0]} labels"
        )
    k = int(labels.max()) + 1 if labels.size else 1
    return LabeledDataset(name, images.shape[1], k, images / 255.0, labels)


def write_idx(images_path, labels_path, pixels: np.ndarray, labels: np.ndarray) -> None:
    """Write raw uint8 images of shape (n, rows, cols) as an IDX pair."""
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    if pixels.ndim != 3 or pixels.shape[0] != labels.shape[0]:
        raise ValueError("pixels must be (n, rows, cols) aligned with labels")
    n, rows, cols = pixels.shape
    with open(images_path, "wb") as fh:
        fh.write(struct.pack(">IIII", IDX_IMAGE_MAGIC, n, rows, cols))
        fh.write(pixels.tobytes())
    with open(labels_path, "wb") as fh:
        fh.write(struct.pack(">II", IDX_LABEL_MAGIC, n))
        fh.write(labels.tobytes())


ISOLET_FEATURES = 617
ISOLET_CLASSES = 26


def _parse_isolet_csv(path, f: int) -> tuple[np.ndarray, np.ndarray]:
    feats: list[np.ndarray] = []
    labels: list[int] = []
    with _open_maybe_gz(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.decode("ascii").strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != f + 1:
                raise DataFormatError(
                    f"{path}:{lineno}: expected {f + 1} comma-separated values, got {len(parts)}"
                )
            try:
                row = np.array([float(p) for p in parts], dtype=np.float64)
            except ValueError as e:
                raise DataFormatError(f"{path}:{lineno}: {e}") from None
            label = int(row[-1])
            if row[-1] != label or not 1 <= label <= ISOLET_CLASSES:
                raise DataFormatError(
                    f"{path}:{lineno}: label {parts[-1]!r} outside 1..{ISOLET_CLASSES}"
                )
            feats.append(row[:-1])
            labels.append(label - 1)
    if not feats:
        raise DataFormatError(f"{path}: no data rows")
    return np.array(feats), np.array(labels, dtype=np.int32)


def load_isolet(train_csv, test_csv, f: int = ISOLET_FEATURES) -> tuple[LabeledDataset, LabeledDataset]:
    """Load the ISOLET train/test CSVs.

    Features are min-max scaled to [0, 1] using the training split's
    statistics on both splits (zero-range columns scale to 0); scaled
    test values are clipped into [0, 1].
    """
    xtr, ytr = _parse_isolet_csv(train_csv, f)
    xte, yte = _parse_isolet_csv(test_csv, f)
    lo = xtr.min(axis=0)
    span = xtr.max(axis=0) - lo
    span[span == 0] = 1.0
    xtr = (xtr - lo) / span
    xte = np.clip((xte - lo) / span, 0.0, 1.0)
    return (
        LabeledDataset("isolet-train", f, ISOLET_CLASSES, xtr, ytr),
        LabeledDataset("isolet-test", f, ISOLET_CLASSES, xte, yte),
    )


def shuffle_split(ds: LabeledDataset, seed: int, fraction: float) -> tuple[LabeledDataset, LabeledDataset]:
    """Seeded permutation then split; the first part gets floor(n*fraction)."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    rng = Xoshiro256(derive_seed(seed, "shuffle-split"))
    perm = rng.permutation(len(ds))
    cut = int(len(ds) * fraction)
    return ds.subset(perm[:cut]), ds.subset(perm[cut:])
