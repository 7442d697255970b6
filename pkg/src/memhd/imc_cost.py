"""Cost model for mapping encoder and associative-memory matrices onto
fixed-size in-memory-computing arrays.

Cycles count array activations: one tile matrix-vector multiply is one
cycle, so a matrix needs ceil(rows/R) * ceil(cols/S) cycles on an R x S
array, and the same number of arrays to stay resident. Partitioned
mappings fold a tall single-column-per-class memory into (D/P) x (k*P),
which shrinks the array count but never the cycle count. Energy is
activations times a configurable per-activation constant, which is
enough to reproduce every relative claim; absolute device energy is out
of scope. Memory footprints follow the per-model formulas (projection
models: f*D encoder; ID/Level models: (f+L)*D; memories: k*D, k*D*N for
N-vector quantization, C*D for the multi-centroid layout).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

MAPPING_KINDS = ("basic", "partitioned", "memhd")
MODEL_KINDS = ("searchd", "quanthd", "lehdc", "basic", "memhd")


@dataclass(frozen=True)
class ArrayConfig:
    rows: int = 128
    cols: int = 128
    e_read: float = 1.0  # energy per array activation, arbitrary units

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("array dimensions must be >= 1")
        if self.e_read <= 0:
            raise ValueError("e_read must be positive")


@dataclass(frozen=True)
class MatrixShape:
    n_rows: int
    n_cols: int

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError(f"matrix shape must be positive, got {self.n_rows}x{self.n_cols}")

    def __str__(self) -> str:
        return f"{self.n_rows}x{self.n_cols}"


def tile_cycles(shape: MatrixShape, array: ArrayConfig) -> int:
    """Activations (= resident arrays) for one matrix: ceil-tiled products."""
    return math.ceil(shape.n_rows / array.rows) * math.ceil(shape.n_cols / array.cols)


@dataclass(frozen=True)
class MappingPlan:
    """One way of placing an encoder matrix and an AM onto arrays.

    am_shape is always the logical matrix (D x k for single-column
    models, D x C for the multi-centroid one); partitioned plans fold it
    into ceil(D/P) x (k*P) for placement only.
    """

    kind: str
    em_shape: MatrixShape
    am_shape: MatrixShape
    array: ArrayConfig = field(default_factory=ArrayConfig)
    partitions: int = 1

    def __post_init__(self):
        if self.kind not in MAPPING_KINDS:
            raise ValueError(f"kind must be one of {MAPPING_KINDS}, got {self.kind!r}")
        if self.partitions < 1:
            raise ValueError("partitions must be >= 1")
        if self.kind != "partitioned" and self.partitions != 1:
            raise ValueError("partitions only apply to partitioned plans")

    def folded_am_shape(self) -> MatrixShape:
        if self.kind != "partitioned":
            return self.am_shape
        return MatrixShape(
            math.ceil(self.am_shape.n_rows / self.partitions),
            self.am_shape.n_cols * self.partitions,
        )


@dataclass(frozen=True)
class CostReport:
    cycles_em: int
    cycles_am: int
    arrays_em: int
    arrays_am: int
    am_utilization: float      # fraction in (0, 1]
    energy_am: float
    memory_em_bits: int
    memory_am_bits: int
    am_tail_cols: int          # true occupancy of the final AM column block

    @property
    def cycles_total(self) -> int:
        return self.cycles_em + self.cycles_am

    @property
    def arrays_total(self) -> int:
        return self.arrays_em + self.arrays_am


def plan_cost(plan: MappingPlan) -> CostReport:
    """Cycle, array, utilization, energy and memory accounting for a plan."""
    array = plan.array
    cycles_em = tile_cycles(plan.em_shape, array)
    arrays_em = cycles_em  # the encoder matrix stays resident
    # cycles always follow the logical AM: folding trades columns for rows
    cycles_am = tile_cycles(plan.am_shape, array)
    placed = plan.folded_am_shape()
    arrays_am = tile_cycles(placed, array)

    if plan.kind == "partitioned" and placed.n_cols > array.cols:
        raise ValueError(
            f"folded AM has {placed.n_cols} columns, more than the array's "
            f"{array.cols}: use a larger array or fewer partitions"
        )
    utilization = min(1.0, placed.n_cols / array.cols)
    tail = placed.n_cols - (math.ceil(placed.n_cols / array.cols) - 1) * array.cols

    return CostReport(
        cycles_em=cycles_em,
        cycles_am=cycles_am,
        arrays_em=arrays_em,
        arrays_am=arrays_am,
        am_utilization=utilization,
        energy_am=cycles_am * array.e_read,
        memory_em_bits=plan.em_shape.n_rows * plan.em_shape.n_cols,
        memory_am_bits=plan.am_shape.n_rows * plan.am_shape.n_cols,
        am_tail_cols=tail,
    )


@dataclass(frozen=True)
class EnergyRow:
    plan: MappingPlan
    cycles_am: int
    arrays_am: int
    energy_am: float
    normalized_energy: float


def energy_comparison(plans) -> list[EnergyRow]:
    """Per-plan AM energy normalized to the largest entry, with cycles/arrays."""
    plans = list(plans)
    if not plans:
        raise ValueError("need at least one plan to compare")
    reports = [plan_cost(p) for p in plans]
    peak = max(r.energy_am for r in reports)
    return [
        EnergyRow(p, r.cycles_am, r.arrays_am, r.energy_am, r.energy_am / peak)
        for p, r in zip(plans, reports)
    ]


@dataclass(frozen=True)
class MemoryReport:
    em_bits: int
    am_bits: int

    @property
    def total_bits(self) -> int:
        return self.em_bits + self.am_bits


def memory_report(
    kind: str,
    f: int,
    D: int,
    k: int,
    C: int | None = None,
    L: int | None = None,
    N: int | None = None,
) -> MemoryReport:
    """Encoder/AM bit footprints per model family."""
    if f < 1 or D < 1 or k < 1:
        raise ValueError("f, D and k must be >= 1")
    if kind in ("searchd", "quanthd", "lehdc"):
        if L is None or L < 1:
            raise ValueError(f"{kind} needs a positive level count L")
        em = (f + L) * D
        if kind == "searchd":
            if N is None or N < 1:
                raise ValueError("searchd needs a positive quantization factor N")
            return MemoryReport(em, k * D * N)
        return MemoryReport(em, k * D)
    if kind == "basic":
        return MemoryReport(f * D, k * D)
    if kind == "memhd":
        if C is None or C < 1:
            raise ValueError("memhd needs a positive column count C")
        return MemoryReport(f * D, C * D)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


# ----------------------------------------------------------------------
# Side-by-side mapping comparison (basic vs partitioned vs multi-centroid)
# ----------------------------------------------------------------------


def pct_display(fraction: float) -> Decimal:
    """Utilization percent, two decimals, round-half-up (58.125% -> 58.13)."""
    return (Decimal(repr(fraction)) * 100).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


def ratio_display(value: float) -> str:
    return f"{value:g}x"


@dataclass
class MappingComparison:
    """Cost reports for a basic mapping, its partitioned variants, and the
    array-matched multi-centroid mapping, plus the improvement summary."""

    labels: list[str]
    plans: list[MappingPlan]
    reports: list[CostReport]
    improvements: dict

    @property
    def memhd_index(self) -> int:
        return len(self.plans) - 1


def compare_mappings(
    f: int,
    d_basic: int,
    k: int,
    memhd_dim: int,
    memhd_cols: int,
    partitions: tuple[int, ...] = (),
    array: ArrayConfig | None = None,
) -> MappingComparison:
    array = array or ArrayConfig()
    plans = [MappingPlan("basic", MatrixShape(f, d_basic), MatrixShape(d_basic, k), array)]
    labels = ["Basic"]
    for p in partitions:
        plans.append(
            MappingPlan(
                "partitioned", MatrixShape(f, d_basic), MatrixShape(d_basic, k), array, partitions=p
            )
        )
        labels.append(f"P={p}")
    plans.append(
        MappingPlan("memhd", MatrixShape(f, memhd_dim), MatrixShape(memhd_dim, memhd_cols), array)
    )
    labels.append("MEMHD")
    reports = [plan_cost(p) for p in plans]

    base = reports[:-1]
    ours = reports[-1]
    best_util = max(pct_display(r.am_utilization) for r in base)
    improvements = {
        "cycles_em": min(r.cycles_em for r in base) / ours.cycles_em,
        "cycles_am": min(r.cycles_am for r in base) / ours.cycles_am,
        "cycles_total": min(r.cycles_total for r in base) / ours.cycles_total,
        "arrays_em": min(r.arrays_em for r in base) / ours.arrays_em,
        "arrays_am": min(r.arrays_am for r in base) / ours.arrays_am,
        "arrays_total": min(r.arrays_total for r in base) / ours.arrays_total,
        "utilization_points": pct_display(ours.am_utilization) - best_util,
        "energy_am": max(r.energy_am for r in base) / ours.energy_am,
    }
    return MappingComparison(labels, plans, reports, improvements)


def render_comparison_text(cmp: MappingComparison) -> str:
    """Aligned table: AM structure, cycles, arrays and utilization per plan."""
    imp = cmp.improvements
    headers = ["Metric", *cmp.labels, "Improv."]
    rows: list[list[str]] = [
        ["AM Structure", *[str(p.folded_am_shape()) for p in cmp.plans], "-"],
    ]
    metric_rows = [
        ("Cycles EM", [r.cycles_em for r in cmp.reports], ratio_display(imp["cycles_em"])),
        ("Cycles AM", [r.cycles_am for r in cmp.reports], ratio_display(imp["cycles_am"])),
        ("Cycles Total", [r.cycles_total for r in cmp.reports], ratio_display(imp["cycles_total"])),
        ("Arrays EM", [r.arrays_em for r in cmp.reports], ratio_display(imp["arrays_em"])),
        ("Arrays AM", [r.arrays_am for r in cmp.reports], ratio_display(imp["arrays_am"])),
        ("Arrays Total", [r.arrays_total for r in cmp.reports], ratio_display(imp["arrays_total"])),
    ]
    for name, vals, improv in metric_rows:
        rows.append([name, *[str(v) for v in vals], improv])
    rows.append(
        [
            "Utilization AM",
            *[f"{pct_display(r.am_utilization)}%" for r in cmp.reports],
            f"+{imp['utilization_points']}%",
        ]
    )
    widths = [max(len(headers[i]), *(len(r[i]) for r in rows)) for i in range(len(headers))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines)


def comparison_csv_rows(cmp: MappingComparison) -> list[list[str]]:
    """CSV form of the comparison: one row per plan."""
    rows = [
        [
            "mapping",
            "am_structure",
            "cycles_em",
            "cycles_am",
            "cycles_total",
            "arrays_em",
            "arrays_am",
            "arrays_total",
            "utilization_pct",
            "energy_am",
        ]
    ]
    for label, plan, rep in zip(cmp.labels, cmp.plans, cmp.reports):
        rows.append(
            [
                label,
                str(plan.folded_am_shape()),
                str(rep.cycles_em),
                str(rep.cycles_am),
                str(rep.cycles_total),
                str(rep.arrays_em),
                str(rep.arrays_am),
                str(rep.arrays_total),
                str(pct_display(rep.am_utilization)),
                f"{rep.energy_am:g}",
            ]
        )
    return rows
