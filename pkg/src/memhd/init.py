"""Clustering-based initialization of the multi-centroid associative memory.

Pipeline: split the encoded training set by class, run K-means per class
to fill a fraction R of the memory columns, then repeatedly grant one
column (configurable batch) to the classes with the most training-set
mispredictions until every column is used.

K-means operates on the +-1 expansions of the binarized sample
hypervectors. Assignment picks the centroid minimizing Euclidean
distance, computed from dot products as dot(x, c) - ||c||^2 / 2 (for
+-1 samples ||x||^2 is the constant D, so this is the distance ranking
expressed through the dot-similarity scores the search hardware
produces). This norm-corrected form, unlike raw max-dot assignment,
makes the summed-similarity objective provably non-decreasing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BitHypervector, ClassMap, FloatAM
from .encoding import EncodedDataset
from .inference import ConfusionMatrix, evaluate  # noqa: F401  (ConfusionMatrix re-exported)
from .rng import Xoshiro256, derive_seed
from .training import quantize_am


@dataclass
class InitConfig:
    """Knobs for clustering-based initialization."""

    ratio: float           # R: fraction of columns filled by per-class K-means
    cols: int              # C: total AM columns
    k: int                 # number of classes
    seed: int = 0
    max_kmeans_iters: int = 100
    alloc_batch: int = 1   # classes granted a column per allocation round

    def __post_init__(self):
        if not 0.0 < self.ratio <= 1.0:
            raise ValueError(f"ratio must be in (0, 1], got {self.ratio}")
        if self.cols < self.k:
            raise ValueError(
                f"cols ({self.cols}) must be >= class count ({self.k}); every class needs a column"
            )
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.alloc_batch < 1:
            raise ValueError("alloc_batch must be >= 1")
        if self.max_kmeans_iters < 1:
            raise ValueError("max_kmeans_iters must be >= 1")


def initial_clusters_per_class(cfg: InitConfig) -> int:
    """n = max(1, floor(C*R/k)); the epsilon absorbs float representation of R."""
    return max(1, int(np.floor(cfg.cols * cfg.ratio / cfg.k + 1e-9)))


def _as_encoded(samples) -> tuple[np.ndarray, int]:
    """Coerce a hypervector sequence to (+-1 float32 matrix, dim)."""
    if isinstance(samples, EncodedDataset):
        return samples.pm1_matrix(np.float32), samples.dim
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    dim = samples[0].dim
    rows = []
    for s in samples:
        if s.dim != dim:
            raise ValueError("samples must share one dimension")
        rows.append(s.to_pm1(np.int8))
    return np.array(rows, dtype=np.float32), dim


def _seed_centroids(X: np.ndarray, n: int, rng: Xoshiro256) -> np.ndarray:
    """K-means++-style seeding with Hamming distance (D - dot)/2 as the metric."""
    N, D = X.shape
    chosen = [rng.randbelow(N)]
    # min Hamming distance to any chosen center so far
    dist = (D - X @ X[chosen[0]]) * 0.5
    for _ in range(1, n):
        w = dist * dist
        taken = np.zeros(N, dtype=bool)
        taken[chosen] = True
        w[taken] = 0.0
        if w.sum() <= 0.0:
            # duplicates everywhere: fall back to a uniform pick among the rest
            free = np.flatnonzero(~taken)
            pick = int(free[rng.randbelow(len(free))])
        else:
            pick = rng.choice_weighted(w)
        chosen.append(pick)
        dist = np.minimum(dist, (D - X @ X[pick]) * 0.5)
    return X[chosen].astype(np.float32, copy=True)


def _kmeans_pm1(
    X: np.ndarray,
    n: int,
    rng: Xoshiro256,
    max_iters: int,
    trace: list | None = None,
) -> np.ndarray:
    """Lloyd iterations on a +-1 sample matrix; returns (n, D) float32 centroids."""
    N, D = X.shape
    if n < 1:
        raise ValueError("cluster count must be >= 1")
    if n > N:
        raise ValueError(f"cannot seed {n} clusters from {N} samples")
    cent = _seed_centroids(X, n, rng)
    prev_assign = None
    prev_obj = -np.inf
    for _ in range(max_iters):
        scores = X @ cent.T - 0.5 * (cent * cent).sum(axis=1)
        assign = scores.argmax(axis=1)
        counts = np.bincount(assign, minlength=n)

        reseeded = False
        for c in np.flatnonzero(counts == 0):
            # hand the worst-fitting sample (lowest similarity to its own
            # centroid) to the empty cluster; donors must keep >= 2 members
            sim = np.einsum("ij,ij->i", X, cent[assign])
            sim[counts[assign] < 2] = np.inf
            worst = int(np.argmin(sim))
            if not np.isfinite(sim[worst]):
                break  # nothing can donate; keep the stale centroid
            counts[assign[worst]] -= 1
            assign[worst] = c
            counts[c] = 1
            cent[c] = X[worst]
            reseeded = True

        for c in range(n):
            if counts[c] > 0:
                cent[c] = X[assign == c].mean(axis=0, dtype=np.float32)

        obj = float(np.einsum("ij,ij->", X, cent[assign]))
        if trace is not None:
            trace.append(obj)
        assert obj >= prev_obj - 1e-5 * max(1.0, abs(prev_obj)), (
            f"k-means objective decreased: {prev_obj} -> {obj}"
        )
        prev_obj = obj

        if prev_assign is not None and not reseeded and np.array_equal(assign, prev_assign):
            break
        prev_assign = assign
    return cent


def kmeans_dot(samples, n: int, seed: int, max_iters: int = 100, trace: list | None = None) -> np.ndarray:
    """Cluster hypervectors under the dot-similarity geometry.

    Returns an (n, D) float64 matrix of centroids (means of the +-1
    expansions of their members). `trace`, when given, collects the
    summed sample-to-centroid similarity after every iteration.
    """
    X, _ = _as_encoded(samples)
    cent = _kmeans_pm1(X, n, Xoshiro256(derive_seed(seed, "kmeans")), max_iters, trace)
    return cent.astype(np.float64)


def _class_indices(encoded: EncodedDataset, k: int) -> list[np.ndarray]:
    out = []
    for c in range(k):
        idx = np.flatnonzero(encoded.labels == c)
        if idx.size == 0:
            raise ValueError(f"class {c} has no training samples")
        out.append(idx)
    return out


def _cluster_class(
    encoded: EncodedDataset, idx: np.ndarray, label: int, n: int, cfg: InitConfig
) -> np.ndarray:
    if n > idx.size:
        raise ValueError(
            f"class {label}: cannot seed {n} clusters from {idx.size} samples"
        )
    X = encoded.subset(idx).pm1_matrix(np.float32)
    rng = Xoshiro256(derive_seed(cfg.seed, "kmeans", label, n))
    return _kmeans_pm1(X, n, rng, cfg.max_kmeans_iters)


def classwise_cluster(encoded: EncodedDataset, per_class_n, cfg: InitConfig) -> FloatAM:
    """Per-class K-means; centroids become the initial AM columns.

    Columns are laid out grouped by class (class 0 first). per_class_n[c]
    gives the cluster count for class c; the total must not exceed C.
    """
    per_class_n = np.asarray(per_class_n, dtype=np.int64)
    if per_class_n.size != cfg.k:
        raise ValueError(f"per_class_n must have k={cfg.k} entries")
    if (per_class_n < 1).any():
        raise ValueError("every class needs at least one cluster")
    if int(per_class_n.sum()) > cfg.cols:
        raise ValueError(
            f"requested {int(per_class_n.sum())} columns exceed C={cfg.cols}"
        )
    indices = _class_indices(encoded, cfg.k)
    blocks = [
        _cluster_class(encoded, indices[c], c, int(per_class_n[c]), cfg)
        for c in range(cfg.k)
    ]
    values = np.concatenate(blocks, axis=0).T.astype(np.float64)
    return FloatAM(values, ClassMap.from_counts(per_class_n))


def allocate_clusters(am: FloatAM, encoded_train: EncodedDataset, cfg: InitConfig) -> FloatAM:
    """Grow the AM to exactly C columns, guided by training-set confusion.

    Each round: quantize, evaluate on the full training set, grant one
    new cluster to each of the alloc_batch classes with the most
    mispredictions (ties to the lower class id), and re-cluster only
    those classes. Classes whose cluster count has reached their sample
    count cannot grow further and are passed over.
    """
    if am.cols > cfg.cols:
        raise ValueError(f"AM already has {am.cols} columns, more than C={cfg.cols}")
    k = cfg.k
    indices = _class_indices(encoded_train, k)
    counts = np.bincount(am.class_map.labels, minlength=k).astype(np.int64)
    blocks = {c: am.values[:, am.class_map.columns_of(c)].T.copy() for c in range(k)}

    def assemble() -> FloatAM:
        values = np.concatenate([blocks[c] for c in range(k)], axis=0).T
        return FloatAM(np.ascontiguousarray(values), ClassMap.from_counts(counts))

    current = assemble()
    while current.cols < cfg.cols:
        result = evaluate(quantize_am(current, "global_mean"), encoded_train)
        mis = result.confusion.mispredictions_per_class()
        growable = np.array([counts[c] < indices[c].size for c in range(k)])
        if not growable.any():
            raise ValueError(
                "cannot reach full utilization: every class already has one "
                "cluster per training sample"
            )
        order = np.lexsort((np.arange(k), -mis))
        order = [c for c in order if growable[c]]
        batch = min(cfg.alloc_batch, cfg.cols - current.cols, len(order))
        for c in order[:batch]:
            counts[c] += 1
            blocks[c] = _cluster_class(encoded_train, indices[c], c, int(counts[c]), cfg)
        current = assemble()
    return current


def initialize_am(encoded_train: EncodedDataset, cfg: InitConfig) -> FloatAM:
    """classwise_cluster at n = max(1, floor(C*R/k)) followed by allocation."""
    n = initial_clusters_per_class(cfg)
    indices = _class_indices(encoded_train, cfg.k)
    # a class with fewer samples than n simply starts with fewer clusters
    per_class = [min(n, idx.size) for idx in indices]
    am = classwise_cluster(encoded_train, per_class, cfg)
    return allocate_clusters(am, encoded_train, cfg)


def random_sampling_init(
    encoded_train: EncodedDataset, cfg: InitConfig
) -> FloatAM:
    """Baseline initializer: C random training hypervectors as columns.

    One sample per class is drawn first so every class owns a column;
    the remaining columns are drawn uniformly from the rest. Columns are
    the +-1 expansions of the picked samples, grouped by class.
    """
    rng = Xoshiro256(derive_seed(cfg.seed, "random-sampling-init"))
    labels = encoded_train.labels
    indices = _class_indices(encoded_train, cfg.k)
    if cfg.cols > len(encoded_train):
        raise ValueError(
            f"C={cfg.cols} exceeds the {len(encoded_train)} available training samples"
        )
    picked = []
    for c in range(cfg.k):
        idx = indices[c]
        picked.append(int(idx[rng.randbelow(idx.size)]))
    taken = set(picked)
    free = np.array([i for i in range(len(encoded_train)) if i not in taken])
    perm = rng.permutation(free.size)
    need = cfg.cols - cfg.k
    picked.extend(int(i) for i in free[perm[:need]])
    picked.sort(key=lambda i: (int(labels[i]), i))
    columns = encoded_train.subset(np.array(picked, dtype=np.int64)).pm1_matrix(np.float64)
    class_map = ClassMap(labels[np.array(picked)], cfg.k)
    return FloatAM(np.ascontiguousarray(columns.T), class_map)
