"""Command-line front end.

Subcommands: train, eval, cost, sweep, compare-init, sweep-ratio. All
runs are deterministic given their flags and seed; every CSV written is
byte-identical across re-runs. Exit codes: 0 success, 2 I/O or file
format, 3 configuration, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import FloatAM
from .data import (
    DataFormatError,
    LabeledDataset,
    load_idx,
    load_isolet,
)
from .encoding import (
    EncodedDataset,
    EncodingError,
    encode_dataset,
    generate_id_level,
    generate_projection,
)
from .imc_cost import (
    ArrayConfig,
    MappingPlan,
    MatrixShape,
    compare_mappings,
    comparison_csv_rows,
    energy_comparison,
    memory_report,
    render_comparison_text,
)
from .inference import evaluate
from .init import InitConfig, initialize_am, random_sampling_init
from .io_bin import (
    ModelFile,
    ModelFormatError,
    load_dataset_cache,
    load_model,
    save_dataset_cache,
    save_model,
)
from .rng import derive_seed
from .training import (
    TrainConfig,
    TrainReport,
    fit,
    iterative_train_basic,
    quantize_am,
    single_pass_train,
    train_epoch,
)

EXIT_OK = 0
EXIT_IO = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4


class ConfigError(ValueError):
    """Bad flag/config-file combination."""


class NumericError(RuntimeError):
    """The pipeline produced non-finite values."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map config errors to 3
        raise ConfigError(message)


# ----------------------------------------------------------------------
# datasets
# ----------------------------------------------------------------------

DATASET_PRESETS = {
    "mnist": {
        "loader": "idx",
        "files": (
            "train-images-idx3-ubyte",
            "train-labels-idx1-ubyte",
            "t10k-images-idx3-ubyte",
            "t10k-labels-idx1-ubyte",
        ),
        "alpha": 0.05,
    },
    "fmnist": {
        "loader": "idx",
        "files": (
            "train-images-idx3-ubyte",
            "train-labels-idx1-ubyte",
            "t10k-images-idx3-ubyte",
            "t10k-labels-idx1-ubyte",
        ),
        "alpha": 0.05,
    },
    "isolet": {
        "loader": "csv",
        "files": ("isolet1+2+3+4.data", "isolet5.data"),
        "alpha": 0.02,
    },
}

COST_PRESETS = {
    "mnist": dict(f=784, d_basic=10240, k=10, memhd_dim=128, memhd_cols=128, partitions=(5, 10)),
    "fmnist": dict(f=784, d_basic=10240, k=10, memhd_dim=128, memhd_cols=128, partitions=(5, 10)),
    "isolet": dict(f=617, d_basic=10240, k=26, memhd_dim=512, memhd_cols=128, partitions=(2, 4)),
}


def _find_file(directory: Path, stem: str) -> Path:
    for candidate in (directory / stem, directory / (stem + ".gz")):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"dataset file {stem}[.gz] not found under {directory}")


def data_dir(args) -> Path:
    return Path(args.data_dir or os.environ.get("MEMHD_DATA_DIR", "data"))


def cache_dir() -> Path | None:
    val = os.environ.get("MEMHD_CACHE_DIR")
    return Path(val) if val else None


def _load_named(name: str, base: Path) -> tuple[LabeledDataset, LabeledDataset]:
    preset = DATASET_PRESETS[name]
    cache = cache_dir()
    if cache is not None:
        train_bin = cache / name / "train.bin"
        test_bin = cache / name / "test.bin"
        if train_bin.exists() and test_bin.exists():
            return load_dataset_cache(train_bin), load_dataset_cache(test_bin)
    root = base / name
    if preset["loader"] == "idx":
        ti, tl, ei, el = (_find_file(root, f) for f in preset["files"])
        train = load_idx(ti, tl, name=f"{name}-train")
        test = load_idx(ei, el, name=f"{name}-test")
    else:
        tr, te = (_find_file(root, f) for f in preset["files"])
        train, test = load_isolet(tr, te)
    if cache is not None:
        (cache / name).mkdir(parents=True, exist_ok=True)
        save_dataset_cache(cache / name / "train.bin", train)
        save_dataset_cache(cache / name / "test.bin", test)
    return train, test


def resolve_dataset(args) -> tuple[LabeledDataset, LabeledDataset, str]:
    """Named preset directory layout, explicit IDX paths, or explicit CSVs."""
    if getattr(args, "train_images", None):
        if not getattr(args, "train_labels", None):
            raise ConfigError("--train-images requires --train-labels")
        train = load_idx(args.train_images, args.train_labels, name="train")
        if not (getattr(args, "test_images", None) and getattr(args, "test_labels", None)):
            raise ConfigError("--test-images/--test-labels are required with --train-images")
        test = load_idx(args.test_images, args.test_labels, name="test")
        return train, test, args.dataset or "custom-idx"
    if getattr(args, "train_csv", None):
        if not getattr(args, "test_csv", None):
            raise ConfigError("--train-csv requires --test-csv")
        train, test = load_isolet(args.train_csv, args.test_csv)
        return train, test, args.dataset or "custom-csv"
    if not args.dataset:
        raise ConfigError("no dataset given: use --dataset or explicit file paths")
    if args.dataset not in DATASET_PRESETS:
        raise ConfigError(
            f"unknown dataset {args.dataset!r}; known: {sorted(DATASET_PRESETS)} "
            "(or pass explicit file paths)"
        )
    train, test = _load_named(args.dataset, data_dir(args))
    return train, test, args.dataset


# ----------------------------------------------------------------------
# config files
# ----------------------------------------------------------------------


def read_config_file(path) -> dict[str, str]:
    """Flat key=value lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


_CONFIG_COERCERS = {
    "dataset": str, "data_dir": str, "encoder": str, "model": str,
    "dim": int, "cols": int, "levels": int, "epochs": int, "seed": int,
    "alloc_batch": int, "threads": int,
    "ratio": float, "alpha": float,
    "threshold_mode": str, "normalize_mode": str,
}


def apply_config_file(args) -> None:
    """Fill unset flags (None) from the --config file."""
    if not getattr(args, "config", None):
        return
    values = read_config_file(args.config)
    for key, raw in values.items():
        if key not in _CONFIG_COERCERS:
            raise ConfigError(f"{args.config}: unknown config key {key!r}")
        if getattr(args, key, None) is None:
            try:
                setattr(args, key, _CONFIG_COERCERS[key](raw))
            except ValueError:
                raise ConfigError(f"{args.config}: bad value for {key}: {raw!r}") from None


def _default(args, key, value):
    if getattr(args, key, None) is None:
        setattr(args, key, value)


# ----------------------------------------------------------------------
# pipeline helpers
# ----------------------------------------------------------------------


def make_encoder(kind: str, seed: int, features: int, dim: int, levels: int):
    enc_seed = derive_seed(seed, "encoder")
    if kind == "projection":
        return generate_projection(enc_seed, features, dim)
    if kind == "id_level":
        return generate_id_level(enc_seed, features, levels, dim)
    raise ConfigError(f"unknown encoder {kind!r}; expected projection or id_level")


def _check_finite_am(fam: FloatAM) -> None:
    if not np.isfinite(fam.values).all():
        raise NumericError("training produced non-finite AM values")


def train_pipeline(
    train: LabeledDataset,
    test: LabeledDataset,
    *,
    model_kind: str,
    encoder_kind: str,
    dim: int,
    cols: int,
    ratio: float,
    alpha: float,
    epochs: int,
    seed: int,
    levels: int,
    threshold_mode: str = "global_mean",
    normalize_mode: str = "per_column_standardize",
    init_kind: str = "clustering",
    alloc_batch: int = 1,
):
    """Full run: encode, initialize, learn. Returns (model, report, test_acc)."""
    encoder = make_encoder(encoder_kind, seed, train.f, dim, levels)
    enc_train = encode_dataset(encoder, train)
    enc_test = encode_dataset(encoder, test)
    tcfg = TrainConfig(
        lr=alpha,
        epochs=epochs,
        seed=derive_seed(seed, "train"),
        threshold_mode=threshold_mode,
        normalize_mode=normalize_mode,
    )
    if model_kind == "basic":
        fam = single_pass_train(enc_train, train.k, dim)
        report = iterative_train_basic(fam, enc_train, tcfg)
        ratio_meta = 1.0
    elif model_kind == "memhd":
        icfg = InitConfig(
            ratio=ratio, cols=cols, k=train.k, seed=derive_seed(seed, "init"),
            alloc_batch=alloc_batch,
        )
        if init_kind == "clustering":
            fam = initialize_am(enc_train, icfg)
        elif init_kind == "random":
            fam = random_sampling_init(enc_train, icfg)
        else:
            raise ConfigError(f"unknown init {init_kind!r}")
        report = fit(fam, enc_train, tcfg)
        ratio_meta = ratio
    else:
        raise ConfigError(f"unknown model {model_kind!r}; expected memhd or basic")
    _check_finite_am(report.final_fam)
    test_acc = evaluate(report.best_bam, enc_test).accuracy
    model = ModelFile(
        encoder_kind=encoder_kind,
        seed=seed,
        features=train.f,
        dim=dim,
        levels=levels if encoder_kind == "id_level" else 0,
        bam=report.best_bam,
        lr=alpha,
        epochs=epochs,
        ratio=ratio_meta,
        dataset=train.name.removesuffix("-train"),
        accuracy=test_acc,
    )
    return model, report, test_acc


def write_csv(path, rows: list[list[str]]) -> None:
    text = "\n".join(",".join(row) for row in rows) + "\n"
    Path(path).write_text(text, newline="")


def report_csv_rows(report: TrainReport) -> list[list[str]]:
    rows = [["epoch", "updates", "train_accuracy"]]
    for e, stats in enumerate(report.epoch_stats):
        rows.append([str(e), str(stats.updates), f"{stats.train_accuracy:.6f}"])
    return rows


def eval_csv_rows(result) -> list[list[str]]:
    k = result.confusion.k
    rows = [["accuracy", f"{result.accuracy:.6f}"], ["n_samples", str(result.n_samples)]]
    rows.append(["true\\pred", *[str(c) for c in range(k)]])
    for t in range(k):
        rows.append([str(t), *[str(int(v)) for v in result.confusion.counts[t]]])
    return rows


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def cmd_train(args) -> int:
    apply_config_file(args)
    for key, val in (
        ("encoder", "projection"), ("model", "memhd"), ("dim", 128), ("cols", 128),
        ("ratio", 0.9), ("epochs", 100), ("seed", 42), ("levels", 256),
        ("alloc_batch", 1),
        ("threshold_mode", "global_mean"), ("normalize_mode", "per_column_standardize"),
    ):
        _default(args, key, val)
    train, test, name = resolve_dataset(args)
    _default(args, "alpha", DATASET_PRESETS.get(name, {}).get("alpha", 0.05))
    model, report, test_acc = train_pipeline(
        train,
        test,
        model_kind=args.model,
        encoder_kind=args.encoder,
        dim=args.dim,
        cols=args.cols,
        ratio=args.ratio,
        alpha=args.alpha,
        epochs=args.epochs,
        seed=args.seed,
        levels=args.levels,
        threshold_mode=args.threshold_mode,
        normalize_mode=args.normalize_mode,
        alloc_batch=args.alloc_batch,
    )
    out = Path(args.out or f"{name}-{args.model}.memhd")
    save_model(out, model)
    if args.report:
        write_csv(args.report, report_csv_rows(report))
    print(f"model: {out}")
    print(f"train accuracy: {report.best_accuracy:.6f} (best epoch {report.best_epoch})")
    print(f"test accuracy: {test_acc:.6f}")
    return EXIT_OK


def cmd_eval(args) -> int:
    apply_config_file(args)
    model = load_model(args.model_path)
    args.dataset = args.dataset or model.dataset
    train, test, name = resolve_dataset(args)
    if test.f != model.features:
        raise ConfigError(
            f"model expects {model.features} features, dataset {name} has {test.f}"
        )
    out = Path(args.out or f"{name}-eval.csv")
    if args.trials and args.trials > 1:
        base_seed = model.seed if args.seed is None else args.seed
        accs = []
        rows = [["trial", "seed", "test_accuracy", "stddev"]]
        for t in range(args.trials):
            seed = base_seed + t
            _, _, acc = train_pipeline(
                train,
                test,
                model_kind="memhd",
                encoder_kind=model.encoder_kind,
                dim=model.dim,
                cols=model.bam.cols,
                ratio=model.ratio,
                alpha=model.lr,
                epochs=model.epochs,
                seed=seed,
                levels=model.levels or 256,
            )
            accs.append(acc)
            rows.append([str(t), str(seed), f"{acc:.6f}", ""])
        mean = float(np.mean(accs))
        std = float(np.std(accs))
        rows.append(["mean", "", f"{mean:.6f}", f"{std:.6f}"])
        write_csv(out, rows)
        print(f"{args.trials} trials: mean test accuracy {mean:.6f} (stddev {std:.6f})")
        return EXIT_OK
    encoder = model.make_encoder()
    result = evaluate(model.bam, encode_dataset(encoder, test))
    write_csv(out, eval_csv_rows(result))
    print(f"test accuracy: {result.accuracy:.6f} ({result.n_samples} samples)")
    return EXIT_OK


def _cost_params(args) -> dict:
    if args.dataset:
        if args.dataset not in COST_PRESETS:
            raise ConfigError(f"no cost preset for {args.dataset!r}; known: {sorted(COST_PRESETS)}")
        params = dict(COST_PRESETS[args.dataset])
    else:
        params = dict(f=784, d_basic=10240, k=10, memhd_dim=128, memhd_cols=128, partitions=(5, 10))
    for key in ("f", "d_basic", "k", "memhd_dim", "memhd_cols"):
        flag = getattr(args, key, None)
        if flag is not None:
            params[key] = flag
    if args.partitions is not None:
        params["partitions"] = tuple(args.partitions)
    return params


def cmd_cost(args) -> int:
    params = _cost_params(args)
    array = ArrayConfig(rows=args.array_rows, cols=args.array_cols, e_read=args.e_read)
    cmp = compare_mappings(array=array, **params)
    print(render_comparison_text(cmp))
    if args.csv:
        write_csv(args.csv, comparison_csv_rows(cmp))
    if args.energy:
        print()
        print(render_energy_table(params, array, args.levels, args.n_quant))
    if args.memory:
        print()
        print(render_memory_table(params, args))
    return EXIT_OK


# AM dimensionalities of the equal-accuracy baseline models compared in
# the energy study (levels fixed at 256, vector-quantization factor 64).
ENERGY_BASELINES = (
    ("BasicHDC", "basic", 10240),
    ("SearcHD", "searchd", 8000),
    ("QuantHD", "quanthd", 1600),
    ("LeHDC", "lehdc", 400),
)


def energy_preset_plans(f: int, k: int, memhd_dim: int, memhd_cols: int,
                        array: ArrayConfig, levels: int = 256, n_quant: int = 64):
    labels, plans = [], []
    for label, kind, dim in ENERGY_BASELINES:
        am_cols = k * n_quant if kind == "searchd" else k
        em_rows = f if kind == "basic" else f + levels
        plans.append(
            MappingPlan("basic", MatrixShape(em_rows, dim), MatrixShape(dim, am_cols), array)
        )
        labels.append(f"{label}-{dim}D")
    plans.append(
        MappingPlan("memhd", MatrixShape(f, memhd_dim), MatrixShape(memhd_dim, memhd_cols), array)
    )
    labels.append(f"MEMHD-{memhd_dim}x{memhd_cols}")
    return labels, plans


def render_energy_table(params: dict, array: ArrayConfig, levels: int, n_quant: int) -> str:
    labels, plans = energy_preset_plans(
        params["f"], params["k"], params["memhd_dim"], params["memhd_cols"],
        array, levels=levels, n_quant=n_quant,
    )
    rows = [["model", "am_cycles", "am_arrays", "am_energy", "normalized"]]
    for label, row in zip(labels, energy_comparison(plans)):
        rows.append(
            [label, str(row.cycles_am), str(row.arrays_am),
             f"{row.energy_am:g}", f"{row.normalized_energy:.6f}"]
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def render_memory_table(params: dict, args) -> str:
    f, k = params["f"], params["k"]
    rows = [["model", "em_bits", "am_bits", "total_kib"]]
    entries = (
        ("searchd", params["d_basic"], dict(L=args.levels, N=args.n_quant)),
        ("quanthd", params["d_basic"], dict(L=args.levels)),
        ("lehdc", params["d_basic"], dict(L=args.levels)),
        ("basic", params["d_basic"], {}),
        ("memhd", params["memhd_dim"], dict(C=params["memhd_cols"])),
    )
    for kind, dim, extra in entries:
        rep = memory_report(kind, f=f, D=dim, k=k, **extra)
        rows.append(
            [kind, str(rep.em_bits), str(rep.am_bits), f"{rep.total_bits / 8192:.2f}"]
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated integer list, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated float list, got {text!r}") from None


def cmd_sweep(args) -> int:
    apply_config_file(args)
    for key, val in (
        ("encoder", "projection"), ("ratio", 0.9), ("epochs", 100), ("seed", 42), ("levels", 256),
    ):
        _default(args, key, val)
    train, test, name = resolve_dataset(args)
    _default(args, "alpha", DATASET_PRESETS.get(name, {}).get("alpha", 0.05))
    dims = _int_list(args.dims)
    cols_list = _int_list(args.cols_list)
    out = Path(args.out or f"{name}-sweep.csv")
    done: dict[tuple[int, int], str] = {}
    if out.exists():
        for line in out.read_text().splitlines()[1:]:
            d, c, acc = line.split(",")
            done[(int(d), int(c))] = acc
    grid = [(dim, cols) for dim in dims for cols in cols_list]

    def rewrite():
        rows = [["dim", "cols", "test_accuracy"]]
        rows += [[str(d), str(c), done[(d, c)]] for d, c in grid if (d, c) in done]
        write_csv(out, rows)

    for dim, cols in grid:
        if (dim, cols) in done:
            continue
        _, _, acc = train_pipeline(
            train, test,
            model_kind="memhd", encoder_kind=args.encoder,
            dim=dim, cols=cols, ratio=args.ratio, alpha=args.alpha,
            epochs=args.epochs, seed=args.seed, levels=args.levels,
        )
        done[(dim, cols)] = f"{acc:.6f}"
        print(f"dim={dim} cols={cols} test_accuracy={done[(dim, cols)]}")
        rewrite()  # checkpoint so an interrupted sweep resumes here
    rewrite()
    print(f"sweep written to {out}")
    return EXIT_OK


def _per_epoch_curve(train, test, args, name, seed, init_kind) -> list[tuple[int, float, float]]:
    """(epoch, train_acc, test_acc) for the model entering each epoch."""
    encoder = make_encoder(args.encoder, seed, train.f, args.dim, args.levels)
    enc_train = encode_dataset(encoder, train)
    enc_test = encode_dataset(encoder, test)
    icfg = InitConfig(ratio=args.ratio, cols=args.cols, k=train.k, seed=derive_seed(seed, "init"))
    fam = initialize_am(enc_train, icfg) if init_kind == "clustering" else random_sampling_init(enc_train, icfg)
    tcfg = TrainConfig(lr=args.alpha, epochs=args.epochs, seed=derive_seed(seed, "train"))
    bam = quantize_am(fam, tcfg.threshold_mode)
    curve = []
    for epoch in range(args.epochs):
        test_acc = evaluate(bam, enc_test).accuracy
        bam_next, stats = train_epoch(fam, bam, enc_train, tcfg, epoch=epoch)
        curve.append((epoch, stats.train_accuracy, test_acc))
        bam = bam_next
    final_train = evaluate(bam, enc_train).accuracy
    final_test = evaluate(bam, enc_test).accuracy
    curve.append((args.epochs, final_train, final_test))
    return curve


def cmd_compare_init(args) -> int:
    apply_config_file(args)
    for key, val in (
        ("encoder", "projection"), ("dim", 512), ("cols", 512), ("ratio", 0.9),
        ("epochs", 100), ("levels", 256),
    ):
        _default(args, key, val)
    train, test, name = resolve_dataset(args)
    _default(args, "alpha", DATASET_PRESETS.get(name, {}).get("alpha", 0.05))
    seeds = _int_list(args.seeds) if args.seeds else [42]
    rows = [["init", "seed", "epoch", "train_accuracy", "test_accuracy"]]
    for seed in seeds:
        for init_kind in ("clustering", "random"):
            for epoch, tr_acc, te_acc in _per_epoch_curve(train, test, args, name, seed, init_kind):
                rows.append([init_kind, str(seed), str(epoch), f"{tr_acc:.6f}", f"{te_acc:.6f}"])
    out = Path(args.out or f"{name}-init-compare.csv")
    write_csv(out, rows)
    print(f"initialization comparison written to {out}")
    return EXIT_OK


def cmd_sweep_ratio(args) -> int:
    apply_config_file(args)
    for key, val in (
        ("encoder", "projection"), ("dim", 512), ("cols", 128), ("epochs", 100), ("levels", 256),
    ):
        _default(args, key, val)
    train, test, name = resolve_dataset(args)
    _default(args, "alpha", DATASET_PRESETS.get(name, {}).get("alpha", 0.05))
    ratios = _float_list(args.ratios)
    for r in ratios:
        if not 0.0 < r <= 1.0:
            raise ConfigError(f"ratio {r} outside (0, 1]")
    seeds = _int_list(args.seeds) if args.seeds else [42]
    rows = [["ratio", "test_accuracy"]]
    for r in ratios:
        accs = []
        for seed in seeds:
            _, _, acc = train_pipeline(
                train, test,
                model_kind="memhd", encoder_kind=args.encoder,
                dim=args.dim, cols=args.cols, ratio=r, alpha=args.alpha,
                epochs=args.epochs, seed=seed, levels=args.levels,
            )
            accs.append(acc)
        rows.append([f"{r:g}", f"{float(np.mean(accs)):.6f}"])
        print(f"R={r:g} mean test accuracy {rows[-1][1]}")
    out = Path(args.out or f"{name}-ratio-sweep.csv")
    write_csv(out, rows)
    return EXIT_OK


# ----------------------------------------------------------------------
# argument wiring
# ----------------------------------------------------------------------


def _add_dataset_flags(p: _Parser) -> None:
    p.add_argument("--dataset", help="named dataset: mnist, fmnist, isolet")
    p.add_argument("--data-dir", help="root holding <dataset>/ files (default $MEMHD_DATA_DIR or ./data)")
    p.add_argument("--train-images")
    p.add_argument("--train-labels")
    p.add_argument("--test-images")
    p.add_argument("--test-labels")
    p.add_argument("--train-csv")
    p.add_argument("--test-csv")
    p.add_argument("--config", help="key=value config file; flags override it")


def _add_model_flags(p: _Parser) -> None:
    p.add_argument("--encoder", choices=["projection", "id_level"])
    p.add_argument("--levels", type=int, help="level count for the id_level encoder")
    p.add_argument("--dim", "-D", type=int, help="hypervector dimensionality")
    p.add_argument("--cols", type=int, help="AM columns C")
    p.add_argument("--ratio", "-R", type=float, help="initial cluster ratio in (0,1]")
    p.add_argument("--alloc-batch", type=int, help="classes granted a column per allocation round")
    p.add_argument("--alpha", type=float, help="learning rate")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)


def build_parser() -> _Parser:
    parser = _Parser(prog="memhd", description=__doc__)
    parser.add_argument("--version", action="version", version=f"memhd {__version__}")
    parser.add_argument("--threads", type=int, help="cap BLAS/worker threads")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="encode, initialize, learn, save a model")
    _add_dataset_flags(p)
    _add_model_flags(p)
    p.add_argument("--model", choices=["memhd", "basic"])
    p.add_argument("--threshold-mode", choices=["global_mean", "per_column_mean"])
    p.add_argument("--normalize-mode", choices=["per_column_standardize", "none"])
    p.add_argument("--out", help="model file path")
    p.add_argument("--report", help="per-epoch CSV path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved model (or rerun trials)")
    p.add_argument("model_path")
    _add_dataset_flags(p)
    p.add_argument("--trials", type=int, help="retrain T times with seeds seed..seed+T-1")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("cost", help="array mapping cost comparison")
    p.add_argument("--dataset", choices=sorted(COST_PRESETS))
    p.add_argument("--features", dest="f", type=int)
    p.add_argument("--dim-basic", dest="d_basic", type=int)
    p.add_argument("--classes", dest="k", type=int)
    p.add_argument("--memhd-dim", type=int)
    p.add_argument("--memhd-cols", type=int)
    p.add_argument("--partitions", type=_int_list, help="comma-separated partition factors")
    p.add_argument("--array-rows", type=int, default=128)
    p.add_argument("--array-cols", type=int, default=128)
    p.add_argument("--e-read", type=float, default=1.0)
    p.add_argument("--levels", type=int, default=256)
    p.add_argument("--n-quant", type=int, default=64)
    p.add_argument("--csv", help="write the comparison as CSV")
    p.add_argument("--energy", action="store_true", help="also print the normalized AM energy table")
    p.add_argument("--memory", action="store_true", help="also print per-model memory footprints")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("sweep", help="accuracy over a (dim, cols) grid")
    _add_dataset_flags(p)
    _add_model_flags(p)
    p.add_argument("--dims", required=True, help="comma-separated dims")
    p.add_argument("--cols-list", required=True, help="comma-separated column counts")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare-init", help="clustering vs random-sampling initialization")
    _add_dataset_flags(p)
    _add_model_flags(p)
    p.add_argument("--seeds", help="comma-separated seed list")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare_init)

    p = sub.add_parser("sweep-ratio", help="accuracy across initial cluster ratios")
    _add_dataset_flags(p)
    _add_model_flags(p)
    p.add_argument("--ratios", required=True, help="comma-separated R values in (0,1]")
    p.add_argument("--seeds", help="comma-separated seed list")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep_ratio)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads:
        from threadpoolctl import threadpool_limits

        with threadpool_limits(limits=args.threads):
            return args.func(args)
    return args.func(args)


def main(argv=None) -> int:
    try:
        code = run(argv)
    except (DataFormatError, ModelFormatError, FileNotFoundError, IsADirectoryError, PermissionError) as e:
        print(f"error: {e}", file=sys.stderr)
        code = EXIT_IO
    except (ConfigError, EncodingError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        code = EXIT_CONFIG
    except (NumericError, FloatingPointError) as e:
        print(f"error: {e}", file=sys.stderr)
        code = EXIT_NUMERIC
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        code = EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
