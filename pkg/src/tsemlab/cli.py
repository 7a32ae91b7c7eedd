"""Command-line harness: ``generate | train | explain | evaluate | rank | report``.

Every setting has one flat key. A value is taken from, in order of precedence:
the command-line flag, the ``TSEMLAB_<KEY>`` environment variable, a
``key = value`` config file (``--config`` or ``TSEMLAB_CONFIG``), then the
built-in default. The resolved settings are written into every output.

Exit codes: 0 success, 2 usage or configuration error, 3 data error,
4 numeric failure (including an untrained model). Errors go to stderr as one
JSON object.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, plotting
from .attribution import METHODS, CamContext, explain_batch, normalize_values
from .data import MTSDataset, SyntheticSpec, apply_normalization, generate_synthetic, load_dataset, save_csv, split, write_matrix_csv, write_uea_text
from .errors import ConfigError, DataError, TsemLabError
from .metrics import (
    average_drop,
    average_increase,
    causality_report,
    critical_difference,
    deletion_curves,
    faithfulness_samples,
    insertion_curves,
    rank_table,
    spatiality_check,
    temporality_check,
)
from .models import ModelConfig, build_model, load_model, predict, save_model, train
from .report import SCHEMA_VERSION, read_report, summary_rows, write_report

ENV_PREFIX = "TSEMLAB_"
BASELINES = ("constant",)
EVALUATIONS = ("faithfulness", "causality", "spatiotemporality")


@dataclass(frozen=True)
class Option:
    type: type
    default: object
    help: str


# key -> option; flags are ``--key-with-dashes``
OPTIONS: dict[str, Option] = {
    "seed": Option(int, 0, "random seed for every stochastic step"),
    "out": Option(str, "tsemlab_out", "output directory"),
    "jobs": Option(int, 1, "worker processes for explanation (results do not depend on this)"),
    # generate
    "n_features": Option(int, 3, "synthetic channels D"),
    "seq_length": Option(int, 64, "synthetic series length T"),
    "n_classes": Option(int, 6, "synthetic classes K"),
    "bump_width": Option(float, 3.0, "Gaussian bump standard deviation (time steps)"),
    "amplitude": Option(float, 2.0, "bump height"),
    "noise": Option(float, 0.3, "standard deviation of the background noise"),
    "n_per_class": Option(int, 100, "instances per class"),
    "train_ratio": Option(float, 0.7, "fraction of each class written to the train split"),
    "format": Option(str, "csv", "dataset file format: csv or ts"),
    # train
    "data": Option(str, None, "dataset directory or .ts file"),
    "arch": Option(str, "tsem", "architecture: tsem, xcm or mtex"),
    "epochs": Option(int, 80, "maximum training epochs"),
    "batch_size": Option(int, 32, "mini-batch size"),
    "lr": Option(float, 3e-3, "Adam learning rate"),
    "window_fraction": Option(float, 0.2, "window size as a fraction of T"),
    "filters_2d": Option(int, 16, "filters of the 2-D convolutions"),
    "filters_1d": Option(int, 16, "filters of the 1-D convolutions"),
    "patience": Option(int, 10, "early-stopping patience in epochs"),
    "validation_ratio": Option(float, 0.0, "fraction of train held out for early stopping (0 disables)"),
    # explain / evaluate
    "checkpoint": Option(str, None, "model checkpoint written by 'train'"),
    "part": Option(str, "test", "dataset part to explain or evaluate: train or test"),
    "methods": Option(str, "all", "comma-separated method ids, or 'all'"),
    "instances": Option(str, "all", "instance indices: 'all', or a list such as 0,3,10-19"),
    "max_instances": Option(int, 0, "keep at most this many of the selected instances (0 keeps all)"),
    "activation_key": Option(str, "pre_gap_maps", "activation the CAM family explains"),
    "n_samples": Option(int, 8, "samples for the smoothed methods"),
    "sigma": Option(float, 0.1, "noise level of the smoothed methods"),
    "steps": Option(int, 8, "interpolation steps of integrated Score-CAM"),
    "baseline": Option(float, 0.0, "masking baseline of the Score-CAM family"),
    "overlays": Option(int, 5, "overlay figures per method"),
    "which": Option(str, "all", "faithfulness, causality, spatiotemporality or all"),
    "step_fraction": Option(float, 0.05, "cells removed or inserted per curve step, as a fraction"),
    # rank / report
    "accuracy": Option(str, None, "CSV with a dataset column and one accuracy column per model"),
    "alpha": Option(float, 0.05, "significance level of the critical difference"),
    "report": Option(str, None, "report.json to render"),
    "delimiter": Option(str, ",", "field separator of the printed summary"),
}

COMMON = ("seed", "out", "jobs")
COMMANDS: dict[str, tuple[str, tuple[str, ...]]] = {
    "generate": (
        "write a synthetic bump dataset (train and test parts)",
        ("n_features", "seq_length", "n_classes", "bump_width", "amplitude", "noise", "n_per_class", "train_ratio", "format"),
    ),
    "train": (
        "train a classifier and write a checkpoint",
        ("data", "arch", "epochs", "batch_size", "lr", "window_fraction", "filters_2d", "filters_1d", "patience", "validation_ratio"),
    ),
    "explain": (
        "write saliency maps (CSV) and overlay figures",
        ("checkpoint", "data", "part", "methods", "instances", "max_instances", "activation_key", "n_samples", "sigma", "steps", "baseline", "overlays"),
    ),
    "evaluate": (
        "compute accuracy and interpretability metrics into a report bundle",
        ("checkpoint", "data", "part", "methods", "instances", "max_instances", "activation_key", "n_samples", "sigma", "steps", "baseline", "which", "step_fraction"),
    ),
    "rank": ("average ranks, wins/ties and critical difference of an accuracy table", ("accuracy", "alpha")),
    "report": ("validate a report.json, print its summary and render its figures", ("report", "delimiter")),
}


# ----------------------------------------------------------------- settings


def parse_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    values = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _convert(key: str, raw, source: str):
    opt = OPTIONS[key]
    if raw is None or isinstance(raw, opt.type):
        return raw
    try:
        return opt.type(raw)
    except ValueError:
        raise ConfigError(f"{key} from {source}: cannot read {raw!r} as {opt.type.__name__}") from None


def resolve_settings(command: str, flags: dict, environ=None) -> dict:
    """Merge flag, environment, config-file and default values for ``command``."""
    environ = os.environ if environ is None else environ
    keys = COMMON + COMMANDS[command][1]
    config_path = flags.get("config") or environ.get(ENV_PREFIX + "CONFIG")
    from_file = parse_config_file(config_path) if config_path else {}
    resolved = {}
    for key in keys:
        if flags.get(key) is not None:
            resolved[key] = _convert(key, flags[key], "command line")
        elif ENV_PREFIX + key.upper() in environ:
            resolved[key] = _convert(key, environ[ENV_PREFIX + key.upper()], ENV_PREFIX + key.upper())
        elif key in from_file:
            resolved[key] = _convert(key, from_file[key], str(config_path))
        else:
            resolved[key] = OPTIONS[key].default
    if resolved["jobs"] < 1:
        raise ConfigError("jobs must be at least 1")
    return resolved


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsemlab",
        description="Train TSEM/XCM/MTEX-CNN classifiers, explain them and evaluate the explanations.",
        epilog=f"Every flag can also be set as {ENV_PREFIX}<KEY> in the environment or as 'key = value' in a --config file.",
    )
    parser.add_argument("--version", action="version", version=f"tsemlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, (help_text, keys) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="key = value settings file (flags take precedence)")
        for key in COMMON + keys:
            opt = OPTIONS[key]
            default = "required" if opt.default is None else opt.default
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None, help=f"{opt.help} (default: {default})")
    return parser


def _require(settings: dict, *keys: str) -> None:
    for key in keys:
        if settings.get(key) in (None, ""):
            raise ConfigError(f"--{key.replace('_', '-')} is required (or set {ENV_PREFIX}{key.upper()})")


def _existing(settings: dict, key: str) -> Path:
    _require(settings, key)
    path = Path(settings[key])
    if not path.exists():
        raise ConfigError(f"{key} path {path} does not exist")
    return path


def _write_json(doc: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- generate


def cmd_generate(settings: dict) -> int:
    spec = SyntheticSpec(
        n_features=settings["n_features"],
        seq_length=settings["seq_length"],
        n_classes=settings["n_classes"],
        bump_width=settings["bump_width"],
        amplitude=settings["amplitude"],
        noise=settings["noise"],
        n_per_class=settings["n_per_class"],
        seed=settings["seed"],
    )
    if settings["format"] not in ("csv", "ts"):
        raise ConfigError(f"format must be csv or ts, got {settings['format']!r}")
    dataset = generate_synthetic(spec)
    train_ds, test_ds = split(dataset, settings["train_ratio"], seed=settings["seed"])
    out = Path(settings["out"])
    out.mkdir(parents=True, exist_ok=True)
    for part, ds in (("train", train_ds), ("test", test_ds)):
        if settings["format"] == "csv":
            save_csv(ds, out / part)
        else:
            write_uea_text(ds, out / f"synthetic_{part.upper()}.ts", problem_name="synthetic")
    _write_json({"synthetic_spec": spec.to_dict(), "settings": settings}, out / "dataset.json")
    print(f"wrote {len(train_ds)} train and {len(test_ds)} test instances ({spec.n_classes} classes) to {out}")
    return 0


# ------------------------------------------------------------------- train


def cmd_train(settings: dict) -> int:
    data = _existing(settings, "data")
    train_ds = load_dataset(data, "train")
    mean, std = train_ds.X.mean(axis=(0, 2)), train_ds.X.std(axis=(0, 2))
    train_ds = apply_normalization(train_ds, mean, std)
    validation = None
    if settings["validation_ratio"] > 0:
        train_ds, validation = split(train_ds, 1.0 - settings["validation_ratio"], seed=settings["seed"])
    config = ModelConfig(
        train_ds.n_features,
        train_ds.seq_length,
        train_ds.n_classes,
        architecture=_architecture(settings["arch"]),
        window_fraction=settings["window_fraction"],
        filters_2d=settings["filters_2d"],
        filters_1d=settings["filters_1d"],
        seed=settings["seed"],
    )
    model = build_model(config)
    report = train(
        model,
        train_ds,
        epochs=settings["epochs"],
        batch_size=settings["batch_size"],
        lr=settings["lr"],
        seed=settings["seed"],
        validation=validation,
        patience=settings["patience"],
    )
    out = Path(settings["out"])
    extra = {
        "normalization": {"mean": mean.tolist(), "std": std.tolist()},
        "class_names": list(train_ds.class_names),
        "settings": settings,
    }
    out.mkdir(parents=True, exist_ok=True)
    save_model(model, out / "model.ckpt", extra=extra)
    doc = {"settings": settings, "model": _model_info(model), "training": report.to_dict()}
    _write_json(doc, out / "train_report.json")
    final = report.train_accuracy[-1] if report.train_accuracy else float("nan")
    print(f"trained {config.architecture} for {report.epochs_run} epochs; train accuracy {final:.4f}; checkpoint {out / 'model.ckpt'}")
    return 0


def _architecture(name: str) -> str:
    aliases = {"mtex": "mtexcnn", "mtex-cnn": "mtexcnn", "mtex_cnn": "mtexcnn"}
    return aliases.get(name.lower(), name.lower())


def _model_info(model) -> dict:
    return {"architecture": model.config.architecture, "checksum": model.checksum(), "parameters": int(model.parameter_count())}


# ----------------------------------------------------- explain / evaluate


def _load_run(settings: dict):
    """Checkpoint, normalized dataset part and selected instance indices."""
    ckpt = _existing(settings, "checkpoint")
    data = _existing(settings, "data")
    model, extra = load_model(ckpt)
    if settings["part"] not in ("train", "test"):
        raise ConfigError(f"part must be train or test, got {settings['part']!r}")
    ds = load_dataset(data, settings["part"])
    ds = _align_labels(ds, extra.get("class_names"))
    norm = extra.get("normalization")
    if norm:
        ds = apply_normalization(ds, norm["mean"], norm["std"])
    idx = _select(settings["instances"], len(ds))
    if settings.get("max_instances"):
        idx = idx[: settings["max_instances"]]
    return model, ds, idx


def _align_labels(ds: MTSDataset, class_names) -> MTSDataset:
    """Re-index labels to the class order seen at training time."""
    if not class_names or list(ds.class_names) == list(class_names):
        return ds
    lookup = {name: i for i, name in enumerate(class_names)}
    unknown = sorted(set(ds.class_names) - set(lookup))
    if unknown:
        raise DataError(f"labels {unknown} were not seen during training")
    y = np.array([lookup[ds.class_names[k]] for k in ds.y], dtype=np.int64)
    return MTSDataset(ds.X, y, tuple(class_names), ds.channel_mean, ds.channel_std, ds.provenance, dict(ds.meta))


def _select(spec: str, n: int) -> np.ndarray:
    spec = str(spec).strip()
    if spec == "all":
        return np.arange(n)
    chosen = []
    for token in spec.split(","):
        token = token.strip()
        try:
            if "-" in token:
                lo, hi = (int(t) for t in token.split("-", 1))
                chosen.extend(range(lo, hi + 1))
            elif token:
                chosen.append(int(token))
        except ValueError:
            raise ConfigError(f"cannot read instance selection {spec!r}") from None
    bad = [i for i in chosen if not 0 <= i < n]
    if bad:
        raise ConfigError(f"instance indices {bad[:5]} outside [0, {n})")
    if not chosen:
        raise ConfigError("instance selection is empty")
    return np.array(chosen, dtype=int)


def _methods(spec: str) -> list[str]:
    valid = METHODS + BASELINES
    if spec.strip() == "all":
        return list(METHODS)
    names = [m.strip() for m in spec.split(",") if m.strip()]
    unknown = [m for m in names if m not in valid]
    if unknown or not names:
        raise ConfigError(f"unknown method {', '.join(unknown) or '(none)'}; valid ids: {', '.join(valid)}")
    return names


def _context(settings: dict, model) -> CamContext:
    return CamContext(
        model,
        activation_key=settings["activation_key"],
        n_samples=settings["n_samples"],
        noise=settings["sigma"],
        steps=settings["steps"],
        seed=settings["seed"],
        baseline=settings["baseline"],
    )


def _explain_chunk(ctx: CamContext, method: str, X: np.ndarray, classes: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    if method == "constant":
        # sanity baseline: a fixed map drawn once from the run seed, blind to the input
        fixed = np.random.default_rng(ctx.seed).random(X.shape[1:])
        return np.broadcast_to(fixed, X.shape).copy()
    return explain_batch(ctx, method, X, classes, seeds)[0]


class Explainer:
    """``explainer(X, classes, seeds) -> maps`` fanned out over a process pool.

    Work is cut into fixed-size chunks whatever the worker count, and chunks
    are merged in input order. Every instance draws noise from its own seed.
    Together these make the maps bit-identical for any ``--jobs``.
    """

    chunk = 32

    def __init__(self, ctx: CamContext, method: str, pool: ProcessPoolExecutor | None):
        self.ctx, self.method, self.pool = ctx, method, pool

    def __call__(self, X, classes, seeds) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        classes = np.asarray(classes, dtype=int)
        seeds = np.asarray(seeds, dtype=np.int64)
        parts = [slice(a, a + self.chunk) for a in range(0, len(X), self.chunk)]
        if self.pool is None:
            results = [_explain_chunk(self.ctx, self.method, X[s], classes[s], seeds[s]) for s in parts]
        else:
            futures = [self.pool.submit(_explain_chunk, self.ctx, self.method, X[s], classes[s], seeds[s]) for s in parts]
            results = [f.result() for f in futures]
        return np.concatenate(results)


def _pool(settings: dict) -> ProcessPoolExecutor | None:
    return ProcessPoolExecutor(max_workers=settings["jobs"]) if settings["jobs"] > 1 else None


def cmd_explain(settings: dict) -> int:
    methods = _methods(settings["methods"])
    model, ds, idx = _load_run(settings)
    ctx = _context(settings, model)
    X = ds.X[idx]
    classes = predict(model, X)
    out = Path(settings["out"])
    pool = _pool(settings)
    try:
        for method in methods:
            maps = Explainer(ctx, method, pool)(X, classes, idx)
            target = out / "maps" / method
            target.mkdir(parents=True, exist_ok=True)
            for i, m in zip(idx, maps):
                write_matrix_csv(m, target / f"instance_{i:05d}.csv")
            for i, x, m, c in list(zip(idx, X, maps, classes))[: settings["overlays"]]:
                plotting.overlay(x, m, out / "figures" / f"overlay_{method}_{i:05d}.svg", f"{method}, instance {i}, class {c}")
    finally:
        if pool is not None:
            pool.shutdown()
    _write_json({"settings": settings, "model": _model_info(model), "instances": idx.tolist(), "classes": classes.tolist()}, out / "explain.json")
    print(f"wrote {len(methods)} x {len(idx)} maps of shape {ds.n_features}x{ds.seq_length} to {out / 'maps'}")
    return 0


def _write_curve(fractions, probs, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["fraction", "prob"])
        for f, p in zip(fractions, probs):
            writer.writerow([repr(float(f)), repr(float(p))])


def _which(spec: str) -> tuple[str, ...]:
    if spec == "all":
        return EVALUATIONS
    chosen = tuple(s.strip() for s in spec.split(",") if s.strip())
    bad = [s for s in chosen if s not in EVALUATIONS]
    if bad or not chosen:
        raise ConfigError(f"unknown evaluation {', '.join(bad) or '(none)'}; choose from all, {', '.join(EVALUATIONS)}")
    return chosen


def cmd_evaluate(settings: dict) -> int:
    methods = _methods(settings["methods"])
    which = _which(settings["which"])
    model, ds, idx = _load_run(settings)
    ctx = _context(settings, model)
    subset = ds.subset(idx)
    X = subset.X
    classes = predict(model, X)
    out = Path(settings["out"])
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": "evaluate",
        "config": settings,
        "dataset": {
            "path": str(settings["data"]),
            "part": settings["part"],
            "n_instances": int(len(idx)),
            "n_features": int(ds.n_features),
            "seq_length": int(ds.seq_length),
            "n_classes": int(model.config.n_classes),
        },
        "model": _model_info(model),
        "accuracy": float(np.mean(classes == subset.y)),
        "methods": methods,
    }
    deletion, insertion = {}, {}
    pool = _pool(settings)
    try:
        for method in methods:
            explainer = Explainer(ctx, method, pool)
            maps = explainer(X, classes, idx)
            if "faithfulness" in which:
                samples = faithfulness_samples(model, X, classes, maps)
                fr, dprobs, dauc = deletion_curves(model, X, classes, maps, settings["step_fraction"])
                _, iprobs, iauc = insertion_curves(model, X, classes, maps, settings["step_fraction"])
                deletion[method], insertion[method] = dprobs.mean(axis=0), iprobs.mean(axis=0)
                _write_curve(fr, deletion[method], out / "curves" / f"{method}_deletion.csv")
                _write_curve(fr, insertion[method], out / "curves" / f"{method}_insertion.csv")
                doc.setdefault("faithfulness", {})[method] = {
                    "average_drop": average_drop(samples),
                    "average_increase": average_increase(samples),
                    "deletion_auc": float(np.mean(dauc)),
                    "insertion_auc": float(np.mean(iauc)),
                    "n_instances": int(len(X)),
                }
            if "spatiotemporality" in which:
                unit = normalize_values(maps, "sum1")
                spatial = np.array([spatiality_check(m) for m in unit])
                temporal = np.array([temporality_check(m) for m in unit])
                doc.setdefault("spatiotemporality", {})[method] = {
                    "spatiality_rate": float(spatial.mean()),
                    "temporality_rate": float(temporal.mean()),
                    "pass_rate": float(np.mean(spatial & temporal)),
                    "n_maps": int(len(unit)),
                }
            if "causality" in which:
                # instance seeds follow the dataset index so subsets reuse the same noise
                seeded = _IndexedExplainer(explainer, idx)
                rep = causality_report(model, seeded, subset, rng=settings["seed"], classes=classes)
                doc.setdefault("causality", {})[method] = rep.to_dict()
    finally:
        if pool is not None:
            pool.shutdown()
    report_path = write_report(doc, out / "report.json")
    render_figures(doc, out)
    print_summary(doc, settings.get("delimiter", ","))
    print(f"report: {report_path}", file=sys.stderr)
    return 0


class _IndexedExplainer:
    def __init__(self, explainer: Explainer, idx: np.ndarray):
        self.explainer, self.idx = explainer, idx

    def __call__(self, X, classes, positions):
        return self.explainer(X, classes, self.idx[np.asarray(positions, dtype=int)])


# ------------------------------------------------------------ rank/report


def read_accuracy_table(path) -> tuple[list[str], list[str], np.ndarray]:
    """``dataset,<model>,...`` header then one row per dataset; ``-`` or blank marks a missing value."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        rows = [r for r in csv.reader(handle) if r and any(c.strip() for c in r)]
    if len(rows) < 2 or len(rows[0]) < 2:
        raise DataError(f"{path}: need a header and at least one dataset row")
    models = [m.strip() for m in rows[0][1:]]
    datasets, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(models) + 1:
            raise DataError(f"{path}:{lineno}: expected {len(models) + 1} fields, got {len(row)}")
        datasets.append(row[0].strip())
        try:
            values.append([float("nan") if c.strip() in ("", "-") else float(c) for c in row[1:]])
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric accuracy") from None
    return models, datasets, np.array(values, dtype=np.float64)


def cmd_rank(settings: dict) -> int:
    path = _existing(settings, "accuracy")
    models, datasets, acc = read_accuracy_table(path)
    k, n = len(models), len(datasets)
    if k == 1:
        ranks, wins = np.ones(1), np.array([int(np.sum(~np.isnan(acc[:, 0])))])
        cd = q = None
        groups: list[list[str]] = []
    else:
        table = rank_table(acc, models)
        ranks, wins = table.average_ranks, table.wins_ties
        crit = critical_difference(ranks, k=k, n_datasets=n, alpha=settings["alpha"], names=models)
        cd, q, groups = crit.cd, crit.q, [list(g) for g in crit.groups]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": "rank",
        "config": settings,
        "ranking": {
            "models": models,
            "average_ranks": [float(r) for r in ranks],
            "wins_ties": [int(w) for w in wins],
            "n_datasets": n,
            "alpha": settings["alpha"],
            "cd": cd,
            "q": q,
            "groups": groups,
        },
    }
    out = Path(settings["out"])
    write_report(doc, out / "report.json")
    render_figures(doc, out)
    print_summary(doc, ",")
    return 0


def render_figures(doc: dict, out: Path) -> list[Path]:
    """All figures a report supports; curves are read back from ``out/curves``."""
    out = Path(out)
    figures = out / "figures"
    written = []
    if doc.get("faithfulness"):
        written.append(plotting.ad_ai_scatter(doc["faithfulness"], figures / "ad_ai.svg"))
        for kind in ("deletion", "insertion"):
            curves = {}
            fractions = None
            for method in doc["faithfulness"]:
                path = out / "curves" / f"{method}_{kind}.csv"
                if path.is_file():
                    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
                    fractions, curves[method] = data[:, 0], data[:, 1]
            if curves:
                written.append(plotting.curves(fractions, curves, figures / f"{kind}_curves.svg", f"{kind} curves"))
    if doc.get("causality"):
        written.append(plotting.causality_bars(doc["causality"], figures / "causality.svg"))
    ranking = doc.get("ranking")
    if ranking and ranking.get("cd") is not None:
        written.append(
            plotting.critical_difference_diagram(
                ranking["models"], ranking["average_ranks"], ranking["cd"], ranking["groups"], figures / "critical_difference.svg"
            )
        )
    return written


def print_summary(doc: dict, delimiter: str) -> None:
    writer = csv.writer(sys.stdout, delimiter=delimiter, lineterminator="\n")
    writer.writerows(summary_rows(doc))


def cmd_report(settings: dict) -> int:
    path = _existing(settings, "report")
    doc = read_report(path)
    out = Path(settings["out"]) if settings["out"] != OPTIONS["out"].default else path.parent
    for fig in render_figures(doc, out):
        print(f"figure: {fig}", file=sys.stderr)
    print_summary(doc, settings["delimiter"])
    return 0


HANDLERS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "explain": cmd_explain,
    "evaluate": cmd_evaluate,
    "rank": cmd_rank,
    "report": cmd_report,
}


def _fail(exc: Exception, code: int) -> int:
    message = {"error": type(exc).__name__, "exit_code": code, "message": str(exc)}
    print(json.dumps(message), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k != "command"}
    try:
        settings = resolve_settings(args.command, flags)
        return HANDLERS[args.command](settings)
    except TsemLabError as exc:
        return _fail(exc, exc.exit_code)
    except FloatingPointError as exc:
        return _fail(exc, 4)
    except OSError as exc:
        return _fail(exc, 3)


if __name__ == "__main__":
    sys.exit(main())
