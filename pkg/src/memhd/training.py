"""Quantization-aware iterative learning for the multi-centroid memory.

The float AM carries the training state; every epoch the samples are
scored against its 1-bit shadow, mispredictions pull the float columns
(true-class target up, mispredicted target down), and at epoch end the
columns are re-normalized and re-binarized. Also provides the
single-column-per-class baselines: single-pass accumulation and plain
iterative learning.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    BinaryAM,
    BitHypervector,
    ClassMap,
    FloatAM,
    argmax_tiebreak,
    batch_similarity,
    pack_bits,
    similarity_matrix,
    unpack_bits,
)
from .encoding import EncodedDataset
from .rng import Xoshiro256, derive_seed

THRESHOLD_MODES = ("global_mean", "per_column_mean")
NORMALIZE_MODES = ("per_column_standardize", "none")
REFRESH_MODES = ("epoch", "sample")


@dataclass
class TrainConfig:
    lr: float = 0.05
    epochs: int = 100
    seed: int = 0
    shuffle: bool = True
    threshold_mode: str = "global_mean"
    normalize_mode: str = "per_column_standardize"
    refresh: str = "epoch"   # re-binarization cadence; "sample" is for study runs

    def __post_init__(self):
        # lr == 0 is allowed so no-op learning passes stay expressible
        if self.lr < 0:
            raise ValueError(f"learning rate must be >= 0, got {self.lr}")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ValueError(f"threshold_mode must be one of {THRESHOLD_MODES}")
        if self.normalize_mode not in NORMALIZE_MODES:
            raise ValueError(f"normalize_mode must be one of {NORMALIZE_MODES}")
        if self.refresh not in REFRESH_MODES:
            raise ValueError(f"refresh must be one of {REFRESH_MODES}")


@dataclass
class EpochStats:
    updates: int
    train_accuracy: float


@dataclass
class TrainReport:
    """Per-epoch trace plus the best and final models.

    epoch_stats[e] holds the update count of epoch e and the training
    accuracy of the model the epoch started from; final_train_accuracy
    is the accuracy of the last model, measured after the final epoch.
    """

    epoch_stats: list[EpochStats] = field(default_factory=list)
    final_train_accuracy: float = 0.0
    best_accuracy: float = 0.0
    best_epoch: int = 0
    best_bam: BinaryAM | None = None
    final_bam: BinaryAM | None = None
    final_fam: FloatAM | None = None


def quantize_am(am: FloatAM, mode: str = "global_mean") -> BinaryAM:
    """1-bit quantization: bit set iff the value strictly exceeds the mean.

    global_mean thresholds at the mean over all D*C entries;
    per_column_mean uses each column's own mean.
    """
    if mode == "global_mean":
        mu = am.values.mean()
        bits = am.values > mu
    elif mode == "per_column_mean":
        bits = am.values > am.values.mean(axis=0, keepdims=True)
    else:
        raise ValueError(f"unknown threshold mode {mode!r}")
    return BinaryAM(am.dim, pack_bits(bits.T), am.class_map)


@dataclass(frozen=True)
class UpdateTargets:
    """Columns selected for one misprediction update (global column indices)."""

    pred_class: int
    pred_col: int
    true_class: int
    true_col: int


def select_update_targets(
    am: BinaryAM, h: BitHypervector, true_class: int
) -> UpdateTargets | None:
    """Overall argmax column and the true class's best column.

    Returns None when the overall argmax already belongs to the true
    class (correct prediction, no update). Ties resolve to the lowest
    column index, both overall and within the true class.
    """
    scores = batch_similarity(am, h)
    pred_col = argmax_tiebreak(scores)
    pred_class = int(am.class_map.labels[pred_col])
    if pred_class == true_class:
        return None
    own = am.class_map.columns_of(true_class)
    true_col = int(own[argmax_tiebreak(scores[own])])
    return UpdateTargets(pred_class, pred_col, true_class, true_col)


def apply_update(fam: FloatAM, targets: UpdateTargets, h: BitHypervector, lr: float) -> None:
    """Pull the true-class column toward h and the mispredicted one away."""
    hpm = h.to_pm1(np.int8).astype(np.float64)
    fam.values[:, targets.true_col] += lr * hpm
    fam.values[:, targets.pred_col] -= lr * hpm


def normalize_am(fam: FloatAM, mode: str = "per_column_standardize") -> None:
    """Center each column and scale it to unit L2 norm (zero columns stay zero)."""
    if mode == "none":
        return
    if mode != "per_column_standardize":
        raise ValueError(f"unknown normalize mode {mode!r}")
    vals = fam.values
    vals -= vals.mean(axis=0, keepdims=True)
    norms = np.linalg.norm(vals, axis=0)
    nz = norms > 0
    vals[:, nz] /= norms[nz]


def _shuffle_order(n: int, cfg: TrainConfig, epoch: int) -> np.ndarray:
    if not cfg.shuffle:
        return np.arange(n)
    rng = Xoshiro256(derive_seed(cfg.seed, "epoch-shuffle", epoch))
    return rng.permutation(n)


def _epoch_end(fam: FloatAM, cfg: TrainConfig) -> BinaryAM:
    normalize_am(fam, cfg.normalize_mode)
    return quantize_am(fam, cfg.threshold_mode)


_CHUNK = 2048


def train_epoch(
    fam: FloatAM,
    bam: BinaryAM,
    encoded_train: EncodedDataset,
    cfg: TrainConfig,
    epoch: int = 0,
) -> tuple[BinaryAM, EpochStats]:
    """One pass in seeded-shuffle order; float updates against a fixed shadow.

    The binary AM stays fixed for the whole pass (its similarity decides
    the updates) and is refreshed from the normalized float AM at epoch
    end. With refresh="sample" it is instead re-binarized after every
    update, which is exact but much slower.
    """
    n = len(encoded_train)
    order = _shuffle_order(n, cfg, epoch)
    labels = encoded_train.labels
    updates = 0
    correct = 0

    if cfg.refresh == "sample":
        current = bam
        for i in order:
            h = encoded_train.bits(int(i))
            targets = select_update_targets(current, h, int(labels[i]))
            if targets is None:
                correct += 1
            else:
                apply_update(fam, targets, h, cfg.lr)
                current = quantize_am(fam, cfg.threshold_mode)
                updates += 1
        return _epoch_end(fam, cfg), EpochStats(updates, correct / n)

    class_cols = [am_cols for am_cols in map(bam.class_map.columns_of, range(bam.class_map.k))]
    col_class = bam.class_map.labels
    for lo in range(0, n, _CHUNK):
        idx = order[lo : lo + _CHUNK]
        scores = similarity_matrix(bam, encoded_train.packed[idx])
        pred_cols = scores.argmax(axis=1)
        true = labels[idx]
        wrong = np.flatnonzero(col_class[pred_cols] != true)
        correct += idx.size - wrong.size
        if wrong.size == 0:
            continue
        hpm = (
            unpack_bits(encoded_train.packed[idx[wrong]], encoded_train.dim).astype(np.float64) * 2.0
            - 1.0
        )
        for row, s in enumerate(wrong):
            own = class_cols[int(true[s])]
            true_col = int(own[np.argmax(scores[s, own])])
            fam.values[:, true_col] += cfg.lr * hpm[row]
            fam.values[:, int(pred_cols[s])] -= cfg.lr * hpm[row]
            updates += 1
    return _epoch_end(fam, cfg), EpochStats(updates, correct / n)


def _run_epochs(fam, encoded_train, cfg, epoch_fn) -> TrainReport:
    report = TrainReport()
    bam = quantize_am(fam, cfg.threshold_mode)
    best_acc, best_epoch, best_bam = -1.0, 0, bam
    for epoch in range(cfg.epochs):
        new_bam, stats = epoch_fn(fam, bam, epoch)
        report.epoch_stats.append(stats)
        if stats.train_accuracy > best_acc:
            best_acc, best_epoch, best_bam = stats.train_accuracy, epoch, bam
        bam = new_bam
    final_acc = _train_accuracy(bam, encoded_train)
    if final_acc > best_acc:
        best_acc, best_epoch, best_bam = final_acc, cfg.epochs, bam
    report.final_train_accuracy = final_acc
    report.best_accuracy = best_acc
    report.best_epoch = best_epoch
    report.best_bam = best_bam
    report.final_bam = bam
    report.final_fam = fam
    return report


def _train_accuracy(bam: BinaryAM, encoded: EncodedDataset) -> float:
    scores = similarity_matrix(bam, encoded.packed)
    preds = bam.class_map.labels[scores.argmax(axis=1)]
    return float(np.mean(preds == encoded.labels))


def fit(fam: FloatAM, encoded_train: EncodedDataset, cfg: TrainConfig) -> TrainReport:
    """Quantize once, then run cfg.epochs learning epochs.

    Tracks the binary AM with the best training accuracy seen (including
    the initial and final models). The float AM is modified in place.
    """
    if len(encoded_train) == 0:
        raise ValueError("cannot train on an empty dataset")
    return _run_epochs(
        fam,
        encoded_train,
        cfg,
        lambda f, b, e: train_epoch(f, b, encoded_train, cfg, epoch=e),
    )


def single_pass_train(encoded_train: EncodedDataset, k: int, dim: int) -> FloatAM:
    """One column per class: the sum of the class's +-1 sample expansions."""
    if encoded_train.dim != dim:
        raise ValueError(f"encoded dim {encoded_train.dim} != requested dim {dim}")
    counts = np.bincount(encoded_train.labels, minlength=k)
    if (counts == 0).any():
        raise ValueError(f"class {int(np.flatnonzero(counts == 0)[0])} has no samples")
    acc = np.zeros((k, dim), dtype=np.float64)
    n = len(encoded_train)
    # +-1 expansions are exact in float32; accumulate in float64
    chunk = max(64, 16_000_000 // dim)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        pm = unpack_bits(encoded_train.packed[lo:hi], dim).astype(np.float32) * 2 - 1
        for c in np.unique(encoded_train.labels[lo:hi]):
            acc[c] += pm[encoded_train.labels[lo:hi] == c].sum(axis=0, dtype=np.float64)
    return FloatAM(acc.T, ClassMap.identity(k))


def _basic_epoch(
    fam: FloatAM,
    bam: BinaryAM,
    encoded_train: EncodedDataset,
    cfg: TrainConfig,
    epoch: int,
) -> tuple[BinaryAM, EpochStats]:
    """Plain iterative epoch: targets are the unique per-class columns."""
    n = len(encoded_train)
    order = _shuffle_order(n, cfg, epoch)
    labels = encoded_train.labels
    class_col = {int(c): int(cols[0]) for c, cols in
                 ((c, bam.class_map.columns_of(c)) for c in range(bam.class_map.k))}
    updates = 0
    correct = 0
    for lo in range(0, n, _CHUNK):
        idx = order[lo : lo + _CHUNK]
        scores = similarity_matrix(bam, encoded_train.packed[idx])
        pred_cols = scores.argmax(axis=1)
        true = labels[idx]
        wrong = np.flatnonzero(bam.class_map.labels[pred_cols] != true)
        correct += idx.size - wrong.size
        if wrong.size == 0:
            continue
        hpm = (
            unpack_bits(encoded_train.packed[idx[wrong]], encoded_train.dim).astype(np.float64) * 2.0
            - 1.0
        )
        for row, s in enumerate(wrong):
            fam.values[:, class_col[int(true[s])]] += cfg.lr * hpm[row]
            fam.values[:, int(pred_cols[s])] -= cfg.lr * hpm[row]
            updates += 1
    return _epoch_end(fam, cfg), EpochStats(updates, correct / n)


def iterative_train_basic(
    fam: FloatAM, encoded_train: EncodedDataset, cfg: TrainConfig
) -> TrainReport:
    """Iterative learning for a single-column-per-class AM."""
    counts = np.bincount(fam.class_map.labels, minlength=fam.class_map.k)
    if (counts != 1).any():
        raise ValueError("iterative_train_basic requires exactly one column per class")
    if len(encoded_train) == 0:
        raise ValueError("cannot train on an empty dataset")
    return _run_epochs(
        fam,
        encoded_train,
        cfg,
        lambda f, b, e: _basic_epoch(f, b, encoded_train, cfg, epoch=e),
    )
