import numpy as np

from memhd.rng import PRNG_ID, Xoshiro256, derive_seed, splitmix64

# Frozen stream vectors (verified against an independent C build of the
# published splitmix64 / xoshiro256** algorithms). Saved models depend on
# this exact stream; any change must bump PRNG_ID.
SPLITMIX_FROM_0 = [
    16294208416658607535,
    7960286522194355700,
    487617019471545679,
    17909611376780542444,
]
XOSHIRO_SEED0_FIRST6 = [
    11091344671253066420,
    13793997310169335082,
    1900383378846508768,
    7684712102626143532,
    13521403990117723737,
    18442103541295991498,
]


def test_prng_id_pinned():
    assert PRNG_ID == "xoshiro256ss-v1"


def test_splitmix_reference_vector():
    s, outs = 0, []
    for _ in range(4):
        s, o = splitmix64(s)
        outs.append(o)
    assert outs == SPLITMIX_FROM_0


def test_xoshiro_reference_vector():
    g = Xoshiro256(0)
    assert [g.next_u64() for _ in range(6)] == XOSHIRO_SEED0_FIRST6


def test_fill_words_matches_scalar_stream():
    a = Xoshiro256(42).fill_words(100)
    g = Xoshiro256(42)
    b = np.array([g.next_u64() for _ in range(100)], dtype=np.uint64)
    assert np.array_equal(a, b)


def test_uniform_range_and_determinism():
    g = Xoshiro256(7)
    vals = [g.uniform() for _ in range(1000)]
    assert all(0.0 <= v < 1.0 for v in vals)
    g2 = Xoshiro256(7)
    assert vals == [g2.uniform() for _ in range(1000)]


def test_randbelow_bounds():
    g = Xoshiro256(9)
    for n in (1, 2, 7, 1000):
        for _ in range(200):
            assert 0 <= g.randbelow(n) < n


def test_permutation_is_permutation():
    g = Xoshiro256(11)
    p = g.permutation(500)
    assert sorted(p.tolist()) == list(range(500))


def test_derive_seed_separates_streams():
    a = derive_seed(0, "encoder")
    b = derive_seed(0, "init")
    c = derive_seed(1, "encoder")
    assert len({a, b, c}) == 3
    assert derive_seed(0, "encoder") == a  # stable
    assert derive_seed(0, "kmeans", 3, 7) != derive_seed(0, "kmeans", 7, 3)


def test_choice_weighted_respects_zeros():
    g = Xoshiro256(13)
    w = np.array([0.0, 0.0, 5.0, 0.0])
    assert all(g.choice_weighted(w) == 2 for _ in range(50))
