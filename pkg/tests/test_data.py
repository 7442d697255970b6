import gzip

import numpy as np
import pytest

from memhd.data import (
    BadMagicError,
    CountMismatchError,
    DataFormatError,
    LabeledDataset,
    TruncatedFileError,
    load_idx,
    load_isolet,
    shuffle_split,
    write_idx,
)


def write_pair(tmp_path, pixels, labels, suffix=""):
    ip = tmp_path / f"images{suffix}"
    lp = tmp_path / f"labels{suffix}"
    write_idx(ip, lp, pixels, labels)
    return ip, lp


def test_idx_roundtrip(tmp_path):
    rng = np.random.default_rng(90)
    pixels = rng.integers(0, 256, size=(3, 4, 5), dtype=np.uint8)
    labels = np.array([2, 0, 1], dtype=np.uint8)
    ip, lp = write_pair(tmp_path, pixels, labels)
    ds = load_idx(ip, lp, name="synthetic")
    assert len(ds) == 3 and ds.f == 20 and ds.k == 3
    assert np.array_equal(ds.labels, labels.astype(np.int32))
    assert np.array_equal(ds.features, pixels.reshape(3, 20) / 255.0)
    assert ds.features.min() >= 0 and ds.features.max() <= 1


def test_idx_gzip_transparent(tmp_path):
    rng = np.random.default_rng(91)
    pixels = rng.integers(0, 256, size=(2, 3, 3), dtype=np.uint8)
    labels = np.array([0, 1], dtype=np.uint8)
    ip, lp = write_pair(tmp_path, pixels, labels)
    gzi, gzl = tmp_path / "i.gz", tmp_path / "l.gz"
    gzi.write_bytes(gzip.compress(ip.read_bytes()))
    gzl.write_bytes(gzip.compress(lp.read_bytes()))
    a = load_idx(ip, lp)
    b = load_idx(gzi, gzl)
    assert np.array_equal(a.features, b.features)


def test_idx_bad_magic_named(tmp_path):
    rng = np.random.default_rng(92)
    ip, lp = write_pair(tmp_path, rng.integers(0, 256, (2, 2, 2), dtype=np.uint8), np.zeros(2, np.uint8))
    with pytest.raises(BadMagicError, match="0x00000801.*expected 0x00000803"):
        load_idx(lp, lp)  # labels file where images are expected
    with pytest.raises(BadMagicError, match="expected 0x00000801"):
        load_idx(ip, ip)


def test_idx_truncated(tmp_path):
    rng = np.random.default_rng(93)
    ip, lp = write_pair(tmp_path, rng.integers(0, 256, (4, 2, 2), dtype=np.uint8), np.zeros(4, np.uint8))
    data = ip.read_bytes()
    short = tmp_path / "short"
    short.write_bytes(data[:-5])
    with pytest.raises(TruncatedFileError):
        load_idx(short, lp)


def test_idx_count_mismatch(tmp_path):
    rng = np.random.default_rng(94)
    ip, _ = write_pair(tmp_path, rng.integers(0, 256, (3, 2, 2), dtype=np.uint8), np.zeros(3, np.uint8))
    _, lp2 = write_pair(tmp_path, rng.integers(0, 256, (2, 2, 2), dtype=np.uint8), np.zeros(2, np.uint8), "_b")
    with pytest.raises(CountMismatchError):
        load_idx(ip, lp2)


def isolet_csv(tmp_path, rows, name, f=6):
    path = tmp_path / name
    lines = [",".join(f"{v:.4f}" for v in feats) + f",{label}." for feats, label in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def test_isolet_roundtrip(tmp_path):
    rng = np.random.default_rng(95)
    rows_tr = [(rng.uniform(-1, 1, 6), int(rng.integers(1, 27))) for _ in range(20)]
    rows_te = [(rng.uniform(-1, 1, 6), int(rng.integers(1, 27))) for _ in range(8)]
    tr = isolet_csv(tmp_path, rows_tr, "train.csv")
    te = isolet_csv(tmp_path, rows_te, "test.csv")
    train, test = load_isolet(tr, te, f=6)
    assert train.f == 6 and train.k == 26
    assert len(train) == 20 and len(test) == 8
    assert train.labels.min() >= 0 and train.labels.max() < 26
    assert train.features.min() >= 0.0 and train.features.max() <= 1.0
    assert test.features.min() >= 0.0 and test.features.max() <= 1.0
    # scaling uses train stats: train min maps to 0, max to 1 per column
    assert np.allclose(train.features.min(axis=0), 0.0)
    assert np.allclose(train.features.max(axis=0), 1.0)


def test_isolet_parsed_values(tmp_path):
    rows = [(np.array([0.0, 1.0]), 1), (np.array([1.0, 3.0]), 26)]
    tr = isolet_csv(tmp_path, rows, "t.csv", f=2)
    train, test = load_isolet(tr, tr, f=2)
    assert np.allclose(train.features, [[0.0, 0.0], [1.0, 1.0]])
    assert train.labels.tolist() == [0, 25]


def test_isolet_constant_column_scales_to_zero(tmp_path):
    rows = [(np.array([5.0, 1.0]), 1), (np.array([5.0, 2.0]), 2)]
    tr = isolet_csv(tmp_path, rows, "c.csv", f=2)
    train, _ = load_isolet(tr, tr, f=2)
    assert np.allclose(train.features[:, 0], 0.0)


def test_isolet_errors(tmp_path):
    bad_arity = tmp_path / "a.csv"
    bad_arity.write_text("1.0,2.0,1.\n")
    ok = isolet_csv(tmp_path, [(np.zeros(6), 1)], "ok.csv")
    with pytest.raises(DataFormatError, match="expected 7"):
        load_isolet(bad_arity, ok, f=6)
    bad_num = tmp_path / "n.csv"
    bad_num.write_text("1.0,x,0,0,0,0,1.\n")
    with pytest.raises(DataFormatError):
        load_isolet(bad_num, ok, f=6)
    bad_label = tmp_path / "l.csv"
    bad_label.write_text("0,0,0,0,0,0,27.\n")
    with pytest.raises(DataFormatError, match="outside 1..26"):
        load_isolet(bad_label, ok, f=6)


def make_ds(n=10, f=3, k=2, seed=0):
    rng = np.random.default_rng(seed)
    return LabeledDataset("toy", f, k, rng.uniform(0, 1, (n, f)), rng.integers(0, k, n))


def test_shuffle_split_half():
    a, b = shuffle_split(make_ds(10), seed=1, fraction=0.5)
    assert len(a) == 5 and len(b) == 5


def test_shuffle_split_deterministic():
    ds = make_ds(20, seed=3)
    a1, b1 = shuffle_split(ds, seed=7, fraction=0.3)
    a2, b2 = shuffle_split(ds, seed=7, fraction=0.3)
    assert np.array_equal(a1.features, a2.features)
    assert np.array_equal(b1.labels, b2.labels)


def test_shuffle_split_union_is_original_multiset():
    ds = make_ds(17, seed=4)
    a, b = shuffle_split(ds, seed=9, fraction=0.4)
    merged = np.vstack([a.features, b.features])
    key = lambda m: sorted(map(tuple, np.round(m, 12)))
    assert key(merged) == key(ds.features)
    assert sorted(np.r_[a.labels, b.labels].tolist()) == sorted(ds.labels.tolist())


def test_shuffle_split_fraction_range():
    with pytest.raises(ValueError):
        shuffle_split(make_ds(), seed=0, fraction=0.0)
    with pytest.raises(ValueError):
        shuffle_split(make_ds(), seed=0, fraction=1.0)


def test_dataset_rejects_nonfinite():
    with pytest.raises(DataFormatError):
        LabeledDataset("bad", 2, 2, np.array([[0.0, np.nan]]), np.array([0]))
