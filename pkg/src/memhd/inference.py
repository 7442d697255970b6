"""Associative search and accuracy evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BinaryAM, BitHypervector, argmax_tiebreak, batch_similarity, similarity_matrix
from .encoding import EncodedDataset


@dataclass
class ConfusionMatrix:
    """k x k misclassification counts; entry (t, p) = true t predicted p."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError("confusion matrix must be square")
        if (counts < 0).any():
            raise ValueError("confusion counts must be non-negative")
        self.counts = counts

    @property
    def k(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def mispredictions_per_class(self) -> np.ndarray:
        """Off-diagonal row sums: per true class, how many samples it lost."""
        return self.counts.sum(axis=1) - np.diag(self.counts)

    @classmethod
    def from_predictions(cls, true_labels, predicted, k: int) -> "ConfusionMatrix":
        counts = np.zeros((k, k), dtype=np.int64)
        np.add.at(counts, (np.asarray(true_labels), np.asarray(predicted)), 1)
        return cls(counts)


@dataclass
class EvalResult:
    accuracy: float
    confusion: ConfusionMatrix
    n_samples: int


def predict(am: BinaryAM, q: BitHypervector) -> int:
    """Class of the most similar AM column (ties to the lowest column index)."""
    scores = batch_similarity(am, q)
    return int(am.class_map.labels[argmax_tiebreak(scores)])


def predict_batch(am: BinaryAM, packed_queries: np.ndarray) -> np.ndarray:
    """Vectorized predict over an (n, words) packed query matrix."""
    scores = similarity_matrix(am, packed_queries)
    cols = scores.argmax(axis=1)  # np.argmax takes the first maximum
    return am.class_map.labels[cols].astype(np.int32)


def evaluate(am: BinaryAM, encoded: EncodedDataset) -> EvalResult:
    """Accuracy and confusion matrix of an AM over an encoded dataset."""
    n = len(encoded)
    if n == 0:
        raise ValueError("cannot evaluate on an empty dataset (accuracy undefined)")
    if encoded.dim != am.dim:
        raise ValueError(f"dimension mismatch: AM dim {am.dim}, data dim {encoded.dim}")
    preds = predict_batch(am, encoded.packed)
    k = am.class_map.k
    if encoded.labels.min() < 0 or encoded.labels.max() >= k:
        raise ValueError(f"dataset labels outside [0, {k})")
    confusion = ConfusionMatrix.from_predictions(encoded.labels, preds, k)
    accuracy = float(np.trace(confusion.counts)) / n
    return EvalResult(accuracy=accuracy, confusion=confusion, n_samples=n)
