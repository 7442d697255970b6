import os
from pathlib import Path

import numpy as np
import pytest

from memhd.core import BitHypervector
from memhd.data import LabeledDataset, write_idx


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One line per acceptance criterion at the end of the run."""
    entries = []
    for outcome in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call" and outcome != "skipped":
                continue
            if "test_acceptance.py" in rep.nodeid:
                name = rep.nodeid.split("::")[-1]
                entries.append((name, outcome.upper()))
    if entries:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, outcome in sorted(set(entries)):
            terminalreporter.write_line(f"{outcome:8s} {name}")


def rand_hv(rng: np.random.Generator, dim: int) -> BitHypervector:
    return BitHypervector.from_bools(rng.integers(0, 2, size=dim, dtype=np.uint8))


def rand_bit_matrix(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    return rng.integers(0, 2, size=(n, dim), dtype=np.uint8)


def blob_dataset(seed: int, k: int = 4, f: int = 24, modes: int = 3,
                 n_train: int = 480, n_test: int = 240) -> tuple[LabeledDataset, LabeledDataset]:
    """Multi-modal synthetic classification data (each class = several blobs)."""
    rng = np.random.default_rng(seed)
    n = n_train + n_test
    per = n // (k * modes) + 1
    X, y = [], []
    for c in range(k):
        for _ in range(modes):
            center = rng.uniform(0.1, 0.9, f)
            X.append(np.clip(center + rng.normal(0, 0.07, (per, f)), 0, 1))
            y.extend([c] * per)
    X = np.vstack(X)
    y = np.array(y, dtype=np.int32)
    perm = rng.permutation(len(y))
    X, y = X[perm][:n], y[perm][:n]
    return (
        LabeledDataset("blobs-train", f, k, X[:n_train], y[:n_train]),
        LabeledDataset("blobs-test", f, k, X[n_train:], y[n_train:]),
    )


def make_idx_pair(tmp_path: Path, n: int = 90, seed: int = 110):
    """Separable 3-class 5x5 IDX fixture; returns (images_path, labels_path)."""
    rng = np.random.default_rng(seed)
    pixels = np.zeros((n, 5, 5), dtype=np.uint8)
    labels = (np.arange(n) % 3).astype(np.uint8)
    for i, c in enumerate(labels):
        base = rng.integers(0, 60, size=(5, 5))
        base[c, :] = rng.integers(180, 255, size=5)
        base[:, c + 1] = rng.integers(180, 255, size=5)
        pixels[i] = base
    ip, lp = tmp_path / f"img-{seed}", tmp_path / f"lab-{seed}"
    write_idx(ip, lp, pixels, labels)
    return str(ip), str(lp)


DATA_DIR = Path(os.environ.get("MEMHD_DATA_DIR", Path(__file__).resolve().parent.parent / "data"))


def dataset_available(name: str) -> bool:
    root = DATA_DIR / name
    if name in ("mnist", "fmnist"):
        stems = ["train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                 "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"]
    elif name == "isolet":
        stems = ["isolet1+2+3+4.data", "isolet5.data"]
    else:
        return False
    return all((root / s).exists() or (root / (s + ".gz")).exists() for s in stems)


def require_dataset(name: str):
    if not dataset_available(name):
        pytest.skip(
            f"{name} files not found under {DATA_DIR} (offline sandbox; "
            f"fetch with scripts/fetch_datasets.py and set MEMHD_DATA_DIR)"
        )


@pytest.fixture(scope="session")
def mnist():
    require_dataset("mnist")
    from memhd.data import load_idx

    def find(stem):
        p = DATA_DIR / "mnist" / stem
        return p if p.exists() else p.with_name(stem + ".gz")

    train = load_idx(find("train-images-idx3-ubyte"), find("train-labels-idx1-ubyte"), "mnist-train")
    test = load_idx(find("t10k-images-idx3-ubyte"), find("t10k-labels-idx1-ubyte"), "mnist-test")
    return train, test


@pytest.fixture(scope="session")
def isolet():
    require_dataset("isolet")
    from memhd.data import load_isolet

    def find(stem):
        p = DATA_DIR / "isolet" / stem
        return p if p.exists() else p.with_name(stem + ".gz")

    return load_isolet(find("isolet1+2+3+4.data"), find("isolet5.data"))
