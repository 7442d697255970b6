import math

import numpy as np
import pytest

from memhd.imc_cost import (
    ArrayConfig,
    MappingPlan,
    MatrixShape,
    compare_mappings,
    energy_comparison,
    memory_report,
    pct_display,
    plan_cost,
    tile_cycles,
)

ARRAY = ArrayConfig(rows=128, cols=128)


def test_tile_cycles_reference_points():
    assert tile_cycles(MatrixShape(784, 10240), ARRAY) == 560
    assert tile_cycles(MatrixShape(128, 128), ARRAY) == 1
    assert tile_cycles(MatrixShape(512, 128), ARRAY) == 4


def test_tile_cycles_monotone():
    rng = np.random.default_rng(80)
    for _ in range(200):
        r, c = int(rng.integers(1, 2000)), int(rng.integers(1, 2000))
        ar, ac = int(rng.integers(1, 300)), int(rng.integers(1, 300))
        v = tile_cycles(MatrixShape(r, c), ArrayConfig(ar, ac))
        assert v >= 1
        assert v == math.ceil(r / ar) * math.ceil(c / ac)
        assert tile_cycles(MatrixShape(r + 7, c), ArrayConfig(ar, ac)) >= v
        assert tile_cycles(MatrixShape(r, c), ArrayConfig(ar + 3, ac)) <= v


def basic_plan(f=784, d=10240, k=10):
    return MappingPlan("basic", MatrixShape(f, d), MatrixShape(d, k), ARRAY)


def part_plan(p, f=784, d=10240, k=10):
    return MappingPlan("partitioned", MatrixShape(f, d), MatrixShape(d, k), ARRAY, partitions=p)


def memhd_plan(dim, cols, f=784):
    return MappingPlan("memhd", MatrixShape(f, dim), MatrixShape(dim, cols), ARRAY)


def test_plan_cost_basic_mnist():
    rep = plan_cost(basic_plan())
    assert (rep.cycles_em, rep.cycles_am, rep.cycles_total) == (560, 80, 640)
    assert (rep.arrays_em, rep.arrays_am, rep.arrays_total) == (560, 80, 640)
    assert rep.am_utilization == 10 / 128
    assert str(pct_display(rep.am_utilization)) == "7.81"


def test_plan_cost_partitioned_mnist():
    rep = plan_cost(part_plan(10))
    assert rep.cycles_am == 80  # folding never reduces cycles
    assert rep.arrays_am == 8
    assert rep.arrays_total == 568
    assert rep.am_utilization == 100 / 128
    assert str(pct_display(rep.am_utilization)) == "78.13"
    rep5 = plan_cost(part_plan(5))
    assert rep5.arrays_am == 16
    assert str(pct_display(rep5.am_utilization)) == "39.06"


def test_plan_cost_memhd_mnist():
    rep = plan_cost(memhd_plan(128, 128))
    assert (rep.cycles_em, rep.cycles_am, rep.cycles_total) == (7, 1, 8)
    assert (rep.arrays_em, rep.arrays_am, rep.arrays_total) == (7, 1, 8)
    assert rep.am_utilization == 1.0


def test_partition_overflow_errors():
    with pytest.raises(ValueError, match="larger array or fewer partitions"):
        plan_cost(part_plan(20))  # 10 * 20 = 200 folded columns > 128


def test_partitioning_invariance():
    base = plan_cost(basic_plan())
    for p in (2, 4, 5, 8, 10, 12):
        rep = plan_cost(part_plan(p))
        assert rep.cycles_am == base.cycles_am
        assert rep.energy_am == base.energy_am
        assert rep.arrays_am == math.ceil(10240 / (p * 128)) * math.ceil(10 * p / 128)
        assert rep.arrays_am <= base.arrays_am


def test_memhd_one_shot_when_matched_to_array():
    for dim, cols in ((128, 128), (64, 128), (128, 64)):
        rep = plan_cost(MappingPlan("memhd", MatrixShape(784, dim), MatrixShape(dim, cols), ARRAY))
        assert rep.cycles_am == 1
    matched = plan_cost(memhd_plan(128, 128))
    assert matched.cycles_am == 1 and matched.am_utilization == 1.0


def test_1x1_array_degenerate():
    tiny = ArrayConfig(rows=1, cols=1)
    assert tile_cycles(MatrixShape(13, 7), tiny) == 13 * 7


def test_energy_ratios():
    basic = basic_plan()
    lehdc = MappingPlan("basic", MatrixShape(1040, 400), MatrixShape(400, 10), ARRAY)
    ours = memhd_plan(128, 128)
    rows = energy_comparison([basic, lehdc, ours])
    assert rows[0].energy_am / rows[2].energy_am == 80
    assert rows[1].energy_am / rows[2].energy_am == 4
    same = energy_comparison([ours, ours])
    assert same[0].energy_am / same[1].energy_am == 1
    assert max(r.normalized_energy for r in rows) == 1.0


def test_memory_report_table_values():
    memhd = memory_report("memhd", f=784, D=128, k=10, C=128)
    assert (memhd.em_bits, memhd.am_bits) == (100352, 16384)
    assert memhd.am_bits == 2 * 8192  # 2 KiB
    basic = memory_report("basic", f=784, D=10240, k=10)
    assert (basic.em_bits, basic.am_bits) == (8028160, 102400)
    searchd = memory_report("searchd", f=784, D=10240, k=10, L=256, N=64)
    assert searchd.am_bits == 6553600
    assert searchd.em_bits == (784 + 256) * 10240
    quanthd = memory_report("quanthd", f=784, D=10240, k=10, L=256)
    lehdc = memory_report("lehdc", f=784, D=10240, k=10, L=256)
    assert quanthd == lehdc
    assert quanthd.am_bits == 102400


def test_memory_report_errors():
    with pytest.raises(ValueError):
        memory_report("nope", f=1, D=1, k=1)
    with pytest.raises(ValueError):
        memory_report("memhd", f=784, D=128, k=10)  # missing C
    with pytest.raises(ValueError):
        memory_report("searchd", f=784, D=128, k=10, L=256)  # missing N


def test_compare_mappings_improvements_mnist():
    cmp = compare_mappings(784, 10240, 10, 128, 128, (5, 10))
    imp = cmp.improvements
    assert imp["cycles_total"] == 80
    assert imp["arrays_total"] == 71
    assert imp["arrays_am"] == 8
    assert str(imp["utilization_points"]) == "21.87"
    assert imp["energy_am"] == 80


def test_compare_mappings_improvements_isolet():
    cmp = compare_mappings(617, 10240, 26, 512, 128, (2, 4))
    imp = cmp.improvements
    assert imp["cycles_total"] == 20
    assert imp["arrays_total"] == 17.5
    assert imp["arrays_am"] == 5
    assert str(imp["utilization_points"]) == "18.75"
    utils = [str(pct_display(r.am_utilization)) for r in cmp.reports]
    assert utils == ["20.31", "40.63", "81.25", "100.00"]
