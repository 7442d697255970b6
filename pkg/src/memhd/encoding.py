"""Seeded encoder structures and feature-vector-to-hypervector conversion.

Two encoders are provided:

* random projection: a bipolar f x D base-vector matrix; a feature vector
  maps to sign(x @ M) with the strict rule that an exactly-zero
  accumulator produces bit 0.
* ID/Level: one random ID row per feature position plus L level rows;
  a sample is the coordinatewise sign of the summed elementwise products
  ID_i * Level(x_i).

All bits come from the versioned stream in `memhd.rng` (see PRNG_ID), so
an encoder regenerates bit-exactly from (seed, shape) on any platform.
Stream layout: projection tables consume f*ceil(D/64) words row-major
from the stream seeded by derive_seed(seed, "projection-em"); ID/Level
tables consume (f+L)*ceil(D/64) words (ID rows first, then level rows)
from derive_seed(seed, "idlevel-em").
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    BitHypervector,
    mask_pad_bits,
    pack_bits,
    unpack_bits,
    words_for,
)
from .rng import Xoshiro256, derive_seed


class EncodingError(ValueError):
    """Invalid input to an encoder (bad shape, non-finite, out of range)."""


def _check_features(x: np.ndarray, expected: int, sample_index: int | None = None) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    where = "" if sample_index is None else f" (sample {sample_index})"
    if x.ndim != 1 or x.size != expected:
        raise EncodingError(
            f"expected {expected} features, got shape {x.shape}{where}"
        )
    if not np.isfinite(x).all():
        raise EncodingError(f"non-finite feature value{where}")
    return x


def _generate_rows(stream: Xoshiro256, n_rows: int, dim: int) -> np.ndarray:
    nw = words_for(dim)
    words = stream.fill_words(n_rows * nw).reshape(n_rows, nw)
    return mask_pad_bits(words, dim)


@dataclass
class ProjectionMatrix:
    """Bipolar random-projection encoder (f base vectors of dimension D)."""

    features: int
    dim: int
    seed: int
    rows: np.ndarray  # (f, words_for(dim)) packed base vectors
    _pm1_cache: np.ndarray | None = field(default=None, repr=False, compare=False)

    kind = "projection"
    levels = 0

    def row(self, i: int) -> BitHypervector:
        return BitHypervector(self.dim, self.rows[i])

    def pm1(self) -> np.ndarray:
        """The +-1 base-vector matrix as float64, cached after first use."""
        if self._pm1_cache is None:
            bits = unpack_bits(self.rows, self.dim)
            self._pm1_cache = bits.astype(np.float64) * 2.0 - 1.0
        return self._pm1_cache

    def encode(self, x: np.ndarray) -> BitHypervector:
        return encode_project(self, x)

    def encode_batch(self, X: np.ndarray) -> np.ndarray:
        return encode_project_batch(self, X)


def generate_projection(seed: int, features: int, dim: int) -> ProjectionMatrix:
    """Deterministic f x D bipolar projection matrix for the given seed."""
    if features < 1 or dim < 1:
        raise EncodingError(f"features and dim must be >= 1, got f={features}, D={dim}")
    stream = Xoshiro256(derive_seed(seed, "projection-em"))
    rows = _generate_rows(stream, features, dim)
    return ProjectionMatrix(features, dim, seed, rows)


def encode_project(m: ProjectionMatrix, x: np.ndarray) -> BitHypervector:
    """Project one feature vector and sign-binarize (zero maps to bit 0)."""
    x = _check_features(x, m.features)
    raw = x @ m.pm1()
    return BitHypervector.from_bools(raw > 0)


def encode_project_batch(m: ProjectionMatrix, X: np.ndarray) -> np.ndarray:
    """Packed hypervectors for an (n, f) feature matrix; rows stay in order."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != m.features:
        raise EncodingError(f"expected (n, {m.features}) features, got {X.shape}")
    bad = ~np.isfinite(X).all(axis=1)
    if bad.any():
        raise EncodingError(f"non-finite feature value (sample {int(np.flatnonzero(bad)[0])})")
    pm = m.pm1()
    out = np.empty((X.shape[0], words_for(m.dim)), dtype=np.uint64)
    step = max(1, int(64e6) // max(1, m.dim * 8))
    for lo in range(0, X.shape[0], step):
        hi = min(lo + step, X.shape[0])
        raw = X[lo:hi] @ pm
        out[lo:hi] = pack_bits(raw > 0)
    return out


@dataclass
class IdLevelTables:
    """ID/Level encoder tables: f position rows and L level rows."""

    features: int
    levels: int
    dim: int
    seed: int
    id_rows: np.ndarray     # (f, words) packed
    level_rows: np.ndarray  # (L, words) packed
    _id_bits: np.ndarray | None = field(default=None, repr=False, compare=False)
    _level_bits: np.ndarray | None = field(default=None, repr=False, compare=False)

    kind = "id_level"

    def id_row(self, i: int) -> BitHypervector:
        return BitHypervector(self.dim, self.id_rows[i])

    def level_row(self, j: int) -> BitHypervector:
        return BitHypervector(self.dim, self.level_rows[j])

    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        if self._id_bits is None:
            self._id_bits = unpack_bits(self.id_rows, self.dim)
            self._level_bits = unpack_bits(self.level_rows, self.dim)
        return self._id_bits, self._level_bits

    def encode(self, x: np.ndarray) -> BitHypervector:
        return encode_id_level(self, x)

    def encode_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.features:
            raise EncodingError(f"expected (n, {self.features}) features, got {X.shape}")
        out = np.empty((X.shape[0], words_for(self.dim)), dtype=np.uint64)
        for i in range(X.shape[0]):
            try:
                out[i] = encode_id_level(self, X[i]).words
            except EncodingError as e:
                raise EncodingError(f"{e} (sample {i})") from None
        return out


def generate_id_level(seed: int, features: int, levels: int, dim: int) -> IdLevelTables:
    """Deterministic ID/Level tables; ID rows precede level rows in the stream."""
    if features < 1 or levels < 1 or dim < 1:
        raise EncodingError(
            f"features, levels and dim must be >= 1, got f={features}, L={levels}, D={dim}"
        )
    stream = Xoshiro256(derive_seed(seed, "idlevel-em"))
    id_rows = _generate_rows(stream, features, dim)
    level_rows = _generate_rows(stream, levels, dim)
    return IdLevelTables(features, levels, dim, seed, id_rows, level_rows)


def level_index(x: np.ndarray, levels: int) -> np.ndarray:
    """Uniform level quantization of values in [0,1]: min(L-1, floor(x*L))."""
    idx = np.floor(np.asarray(x, dtype=np.float64) * levels).astype(np.int64)
    return np.minimum(idx, levels - 1)


def encode_id_level(t: IdLevelTables, x: np.ndarray) -> BitHypervector:
    """Sum of per-position ID*Level bipolar products, sign-binarized."""
    x = _check_features(x, t.features)
    if (x < 0).any() or (x > 1).any():
        bad = int(np.flatnonzero((x < 0) | (x > 1))[0])
        raise EncodingError(f"feature {bad} value {x[bad]!r} outside [0, 1]")
    id_bits, level_bits = t._tables()
    idx = level_index(x, t.levels)
    # product of two bipolar rows is +1 exactly where the bits agree
    agree = id_bits == level_bits[idx]
    acc = 2 * agree.sum(axis=0, dtype=np.int64) - t.features
    return BitHypervector.from_bools(acc > 0)


Encoder = ProjectionMatrix | IdLevelTables


class EncodedDataset:
    """Sequence of (BitHypervector, label) backed by one packed matrix."""

    __slots__ = ("dim", "packed", "labels")

    def __init__(self, dim: int, packed: np.ndarray, labels: np.ndarray):
        packed = np.ascontiguousarray(packed, dtype=np.uint64)
        labels = np.ascontiguousarray(labels, dtype=np.int32)
        if packed.ndim != 2 or packed.shape[0] != labels.size:
            raise ValueError("packed matrix and labels disagree on sample count")
        if packed.shape[1] != words_for(dim):
            raise ValueError("packed matrix width does not match dim")
        self.dim = dim
        self.packed = packed
        self.labels = labels

    def __len__(self) -> int:
        return self.labels.size

    def __getitem__(self, i: int) -> tuple[BitHypervector, int]:
        return BitHypervector(self.dim, self.packed[i]), int(self.labels[i])

    def bits(self, i: int) -> BitHypervector:
        return BitHypervector(self.dim, self.packed[i])

    def subset(self, indices) -> "EncodedDataset":
        idx = np.asarray(indices)
        return EncodedDataset(self.dim, self.packed[idx], self.labels[idx])

    def pm1_matrix(self, dtype=np.float32) -> np.ndarray:
        """(n, D) +-1 expansion of all samples."""
        bits = unpack_bits(self.packed, self.dim)
        return bits.astype(dtype) * 2 - 1


def encode_dataset(encoder: Encoder, dataset) -> EncodedDataset:
    """Encode every sample of a LabeledDataset, preserving order."""
    X, y = dataset.feature_matrix(), dataset.label_vector()
    if X.shape[0] == 0:
        return EncodedDataset(encoder.dim, np.zeros((0, words_for(encoder.dim)), dtype=np.uint64), y)
    packed = encoder.encode_batch(X)
    return EncodedDataset(encoder.dim, packed, y)
