"""Packed binary hypervectors and the similarity primitives built on them.

Representation
--------------
A hypervector of dimension D is stored as ceil(D/64) little-endian 64-bit
words; bit i of word w holds coordinate 64*w + i. Bit value 1 means
bipolar +1, bit value 0 means bipolar -1. Pad bits past D in the final
word are always zero (constructors enforce this), so word-level equality
and popcounts are well defined.

Similarity is the bipolar dot product:

    dot(a, b) = sum_i a_i * b_i = D - 2 * popcount(a XOR b)

which preserves the ranking of the unpacked +-1 dot product exactly while
costing one XOR and one popcount per word.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def words_for(dim: int) -> int:
    """Number of 64-bit words backing a dim-bit vector."""
    return (dim + 63) // 64


def _pad_mask(dim: int) -> int:
    """Mask of valid bits in the final word."""
    rem = dim % 64
    return MASK_ALL if rem == 0 else (1 << rem) - 1


MASK_ALL = (1 << 64) - 1


def mask_pad_bits(words: np.ndarray, dim: int) -> np.ndarray:
    """Zero the pad bits of the last word (in place; returns the array)."""
    if words.size:
        words[..., -1] &= np.uint64(_pad_mask(dim))
    return words


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 (or bool) matrix of shape (..., D) into uint64 words.

    Returns shape (..., words_for(D)); bit order matches the module
    convention (bit i of word w = column 64*w + i).
    """
    bits = np.asarray(bits, dtype=np.uint8)
    dim = bits.shape[-1]
    nw = words_for(dim)
    lead = bits.shape[:-1]
    packed = np.packbits(bits.reshape(-1, dim), axis=-1, bitorder="little")
    buf = np.zeros((packed.shape[0], nw * 8), dtype=np.uint8)
    buf[:, : packed.shape[1]] = packed
    words = buf.view("<u8").astype(np.uint64, copy=False)
    return words.reshape(*lead, nw)


def unpack_bits(words: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of pack_bits; returns a uint8 0/1 matrix of shape (..., dim)."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    lead = words.shape[:-1]
    raw = words.reshape(-1, words.shape[-1]).astype("<u8").view(np.uint8)
    bits = np.unpackbits(raw, axis=-1, bitorder="little")[:, :dim]
    return bits.reshape(*lead, dim)


def expand_pm1(words: np.ndarray, dim: int, dtype=np.float32) -> np.ndarray:
    """Expand packed vectors to their +-1 representation."""
    bits = unpack_bits(words, dim)
    return (bits.astype(dtype) * 2) - 1


def popcount_words(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words)


class BitHypervector:
    """An immutable D-dimensional bipolar vector packed into 64-bit words."""

    __slots__ = ("dim", "words")

    def __init__(self, dim: int, words: np.ndarray):
        if dim < 1:
            raise ValueError(f"hypervector dim must be >= 1, got {dim}")
        words = np.ascontiguousarray(words, dtype=np.uint64).copy()
        if words.shape != (words_for(dim),):
            raise ValueError(
                f"expected {words_for(dim)} words for dim {dim}, got shape {words.shape}"
            )
        mask_pad_bits(words, dim)
        words.setflags(write=False)
        self.dim = dim
        self.words = words

    @classmethod
    def from_bools(cls, bits: np.ndarray) -> "BitHypervector":
        bits = np.asarray(bits)
        return cls(bits.shape[-1], pack_bits(bits))

    def to_bools(self) -> np.ndarray:
        return unpack_bits(self.words, self.dim)

    def to_pm1(self, dtype=np.int8) -> np.ndarray:
        return ((self.to_bools().astype(dtype) * 2) - 1).astype(dtype)

    def popcount(self) -> int:
        return int(popcount_words(self.words).sum())

    def complement(self) -> "BitHypervector":
        return BitHypervector(self.dim, ~self.words)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitHypervector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.dim, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitHypervector(dim={self.dim}, popcount={self.popcount()})"


def dot_similarity(a: BitHypervector, b: BitHypervector) -> int:
    """Bipolar dot product of two packed hypervectors; range [-D, D]."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    ham = int(popcount_words(a.words ^ b.words).sum())
    return a.dim - 2 * ham


def argmax_tiebreak(scores) -> int:
    """Index of the maximum score; ties resolve to the lowest index."""
    scores = np.asarray(scores)
    if scores.size == 0:
        raise ValueError("argmax of an empty score sequence")
    return int(np.argmax(scores))


@dataclass(frozen=True)
class ClassMap:
    """Assignment of associative-memory columns to class labels.

    `labels[j]` is the class of column j; every class in [0, k) must own
    at least one column.
    """

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int32, copy=True)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        if self.k < 1:
            raise ValueError("class count must be >= 1")
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("class map needs at least one column")
        if labels.min() < 0 or labels.max() >= self.k:
            raise ValueError(f"column labels must lie in [0, {self.k})")
        owned = np.unique(labels)
        if owned.size != self.k:
            missing = sorted(set(range(self.k)) - set(owned.tolist()))
            raise ValueError(f"classes without any column: {missing}")

    @property
    def cols(self) -> int:
        return int(self.labels.size)

    def columns_of(self, label: int) -> np.ndarray:
        """Column indices owned by a class, in ascending order."""
        if not 0 <= label < self.k:
            raise ValueError(f"class {label} outside [0, {self.k})")
        return np.flatnonzero(self.labels == label)

    @classmethod
    def identity(cls, k: int) -> "ClassMap":
        return cls(np.arange(k, dtype=np.int32), k)

    @classmethod
    def from_counts(cls, counts) -> "ClassMap":
        """Grouped layout: class 0's columns first, then class 1's, ..."""
        counts = np.asarray(counts, dtype=np.int64)
        return cls(np.repeat(np.arange(len(counts), dtype=np.int32), counts), len(counts))


class FloatAM:
    """Floating-point associative memory: a D x C matrix of class vectors.

    Column j is the class vector for class `class_map.labels[j]`. This is
    the trainable form; inference uses its 1-bit quantization (BinaryAM).
    """

    __slots__ = ("dim", "values", "class_map")

    def __init__(self, values: np.ndarray, class_map: ClassMap):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("FloatAM values must be a D x C matrix")
        if not np.isfinite(values).all():
            raise ValueError("FloatAM values must be finite")
        if values.shape[1] != class_map.cols:
            raise ValueError(
                f"class map has {class_map.cols} columns, matrix has {values.shape[1]}"
            )
        self.dim = values.shape[0]
        self.values = values
        self.class_map = class_map

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    def copy(self) -> "FloatAM":
        return FloatAM(self.values.copy(), self.class_map)


class BinaryAM:
    """1-bit associative memory: C packed columns of dimension D.

    Backed by a (C, words_for(D)) uint64 matrix; row j is column j's
    packed bits, so the whole memory XORs against a query in one
    vectorized sweep.
    """

    __slots__ = ("dim", "words", "class_map")

    def __init__(self, dim: int, words: np.ndarray, class_map: ClassMap):
        words = np.ascontiguousarray(words, dtype=np.uint64).copy()
        if words.ndim != 2 or words.shape != (class_map.cols, words_for(dim)):
            raise ValueError(
                f"expected ({class_map.cols}, {words_for(dim)}) words, got {words.shape}"
            )
        mask_pad_bits(words, dim)
        words.setflags(write=False)
        self.dim = dim
        self.words = words
        self.class_map = class_map

    @property
    def cols(self) -> int:
        return self.words.shape[0]

    @classmethod
    def from_columns(cls, columns, class_map: ClassMap) -> "BinaryAM":
        columns = list(columns)
        if not columns:
            raise ValueError("BinaryAM needs at least one column")
        dim = columns[0].dim
        for c in columns:
            if c.dim != dim:
                raise ValueError("all columns must share one dimension")
        return cls(dim, np.stack([c.words for c in columns]), class_map)

    def column(self, j: int) -> BitHypervector:
        return BitHypervector(self.dim, self.words[j])

    @property
    def columns(self) -> list[BitHypervector]:
        return [self.column(j) for j in range(self.cols)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryAM):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.words, other.words)
            and np.array_equal(self.class_map.labels, other.class_map.labels)
        )


def batch_similarity(am: BinaryAM, q: BitHypervector) -> np.ndarray:
    """Dot similarity of a query against every AM column.

    Output order follows the class map's column order; entry j equals
    dot_similarity(column j, q).
    """
    if am.dim != q.dim:
        raise ValueError(f"dimension mismatch: AM dim {am.dim}, query dim {q.dim}")
    ham = popcount_words(am.words ^ q.words).sum(axis=1, dtype=np.int64)
    return am.dim - 2 * ham


def similarity_matrix(am: BinaryAM, queries: np.ndarray) -> np.ndarray:
    """batch_similarity for many packed queries at once.

    `queries` is an (N, words_for(D)) uint64 matrix with pad bits zeroed.
    Returns an (N, C) int64 score matrix.
    """
    if queries.shape[1] != am.words.shape[1]:
        raise ValueError("query word count does not match AM dimension")
    out = np.empty((queries.shape[0], am.cols), dtype=np.int64)
    # chunk to keep the (chunk, C, words) XOR temporaries modest
    step = max(1, 1 << 22 >> max(1, am.cols * am.words.shape[1]).bit_length())
    step = max(step, 64)
    for lo in range(0, queries.shape[0], step):
        hi = min(lo + step, queries.shape[0])
        x = queries[lo:hi, None, :] ^ am.words[None, :, :]
        out[lo:hi] = popcount_words(x).sum(axis=2, dtype=np.int64)
    return am.dim - 2 * out
