"""Command-line harness: data generation, lambda sweeps, weighting,
training and end-to-end experiment reproduction.

Every run directory gets a manifest recording the exact configuration, so
re-running with the same manifest reproduces the outputs byte-for-byte.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import (
    BinarySynthSpec,
    Dataset,
    SynthSpec,
    generate_binary_clusters,
    generate_synth,
    load_csv,
    normalize_minmax,
    save_csv,
    split,
)
from .grid import compute_weights, fit_grid, select_lambda, write_sweep_report
from .losses import LossSpec
from .metrics import classification_metrics, regression_metrics
from .models import ModelSpec, TrainConfig, load_model, save_model, train

LAMBDA_CANDIDATES = [1, 2, 5, 10, 20, 50, 100]

RESULT_HEADER = "dataset,model,loss,gamma_norm,lambda,seed,mape,mae"
RESULT_HEADER_CLS = RESULT_HEADER + ",acc,prec,rec,f1"


def _parse_int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _parse_columns(text: str) -> list:
    cols = []
    for t in text.split(","):
        t = t.strip()
        cols.append(int(t) if t.lstrip("-").isdigit() else t)
    return cols


def _apply_config_file(args: argparse.Namespace) -> None:
    """Overlay key=value pairs from --config onto the parsed arguments."""
    if not getattr(args, "config", None):
        return
    for line_no, line in enumerate(Path(args.config).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{args.config}:{line_no}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if not hasattr(args, key):
            raise ValueError(f"{args.config}:{line_no}: unknown key {key!r}")
        current = getattr(args, key)
        if isinstance(current, bool):
            value = value.lower() in ("1", "true", "on", "yes")
        elif isinstance(current, int):
            value = int(value)
        elif isinstance(current, float):
            value = float(value)
        setattr(args, key, value)


def _load_dataset(args) -> Dataset:
    dataset, report = load_csv(
        args.data,
        _parse_columns(args.feature_cols),
        _parse_columns(args.target_cols),
        header=not args.no_header,
    )
    for line_no, reason in report.rejected:
        print(f"warning: skipped line {line_no}: {reason}", file=sys.stderr)
    return dataset


def _write_manifest(out_dir: Path, args, extra: dict | None = None) -> None:
    lines = [f"viloss_version={__version__}"]
    for key in sorted(vars(args)):
        if key in ("func", "config"):
            continue
        lines.append(f"{key}={getattr(args, key)}")
    for key, value in (extra or {}).items():
        lines.append(f"{key}={value}")
    (out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


def cmd_gen(args) -> None:
    spec = SynthSpec(
        variant=args.variant,
        n=args.n,
        noise_sigma=args.noise_sigma,
        corrupt_fraction=args.corrupt_fraction,
        cluster_fraction=args.cluster_fraction,
        cluster_center=args.cluster_center,
        cluster_sigma=args.cluster_sigma,
        seed=args.seed,
    )
    dataset = generate_synth(spec)
    save_csv(dataset, args.out)
    manifest = Path(args.out).with_suffix(".manifest.txt")
    manifest.write_text(
        "".join(f"{k}={v}\n" for k, v in sorted(vars(spec).items()))
        + f"viloss_version={__version__}\n"
    )
    print(f"wrote {dataset.n} samples to {args.out}")


def cmd_ld_sweep(args) -> None:
    dataset = _load_dataset(args)
    subset = _parse_int_list(args.feature_subset) if args.feature_subset else None
    lam_star, report = select_lambda(dataset, _parse_int_list(args.candidates), subset)
    print("lambda,ld,nonempty_cells")
    for entry in report:
        print(f"{entry.lam},{entry.ld!r},{entry.n_cells}")
    print(f"selected lambda = {lam_star}")
    if args.out:
        write_sweep_report(report, args.out)


def cmd_weigh(args) -> None:
    dataset = _load_dataset(args)
    subset = _parse_int_list(args.feature_subset) if args.feature_subset else None
    grid = fit_grid(dataset, args.grid_lambda, subset, mu_floor=args.mu_floor)
    table = compute_weights(grid, dataset, args.gamma_norm)
    table.export(args.out)
    print(f"wrote {len(table)} weights to {args.out}")


def _run_experiment(dataset, name, model_spec, loss_spec, lam, subset, cfg, mu_floor=0.0):
    """Split, normalize, weight, train and evaluate one configuration.

    Returns one result row in the harness schema.
    """
    train_set, test_set = split(dataset, 0.7, cfg.seed)
    train_norm = normalize_minmax(train_set)
    record = train_norm.normalization

    weights = None
    if loss_spec.weighted:
        grid = fit_grid(train_norm, lam, subset, mu_floor=mu_floor)
        weights = compute_weights(grid, train_norm, loss_spec.norm_kind)

    model, _ = train(model_spec, train_norm, loss_spec, cfg, weights)
    test_x = record.apply_features(test_set.features)

    loss_name = f"viloss_{loss_spec.base}" if loss_spec.weighted else loss_spec.base
    norm_name = loss_spec.norm_kind if loss_spec.weighted else "none"
    lam_name = lam if loss_spec.weighted else "none"
    prefix = f"{name},{_model_name(model_spec)},{loss_name},{norm_name},{lam_name},{cfg.seed}"

    if model_spec.kind == "logistic":
        prob = model.predict_batch(test_x)
        reg = regression_metrics(prob, test_set.targets)
        cls = classification_metrics(prob, test_set.targets)
        return f"{prefix},{reg.as_row()},{cls.as_row()}", model
    pred = record.invert_targets(model.predict_batch(test_x))
    reg = regression_metrics(pred, test_set.targets)
    return f"{prefix},{reg.as_row()}", model


def _model_name(spec: ModelSpec) -> str:
    if spec.kind == "polynomial":
        return f"poly-{spec.degree}"
    return spec.kind


def cmd_train(args) -> None:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    created = [out_dir / "results.csv", out_dir / "model.txt", out_dir / "manifest.txt"]
    try:
        dataset = _load_dataset(args)
        model_spec = ModelSpec(
            kind=args.model,
            degree=args.degree,
            input_dim=dataset.feature_dim,
            output_dim=dataset.target_dim,
        )
        loss_spec = LossSpec(
            base=args.loss,
            delta=args.huber_delta,
            weighted=args.weighted == "on",
            norm_kind=args.gamma_norm,
        )
        cfg = TrainConfig(
            epochs=args.epochs,
            batch_size=args.batch_size,
            learning_rate=args.lr,
            seed=args.seed,
            shuffle=not args.no_shuffle,
        )
        subset = _parse_int_list(args.feature_subset) if args.feature_subset else None
        row, model = _run_experiment(
            dataset, Path(args.data).stem, model_spec, loss_spec,
            args.grid_lambda, subset, cfg, args.mu_floor,
        )
        header = RESULT_HEADER_CLS if model_spec.kind == "logistic" else RESULT_HEADER
        (out_dir / "results.csv").write_text(header + "\n" + row + "\n")
        save_model(model, out_dir / "model.txt")
        _write_manifest(out_dir, args)
        print(row)
    except Exception:
        for path in created:
            path.unlink(missing_ok=True)
        raise


def cmd_eval(args) -> None:
    dataset = _load_dataset(args)
    model = load_model(args.model)
    pred = model.predict_batch(dataset.features)
    if model.spec.kind == "logistic":
        cls = classification_metrics(pred, dataset.targets)
        print("acc,prec,rec,f1")
        print(cls.as_row())
    else:
        reg = regression_metrics(pred, dataset.targets)
        print("mape,mae")
        print(reg.as_row())


REPRO_NAMES = ("synth-1d", "synth-2d", "logistic-synth")


def _repro_rows(name: str, seeds: list[int], epochs: int | None) -> tuple[str, list[str]]:
    rows = []
    if name in ("synth-1d", "synth-2d"):
        one_d = name == "synth-1d"
        model_spec = ModelSpec("polynomial", 6, 1 if one_d else 2, 1)
        lam = 2 if one_d else 10
        cfg_kw = dict(
            epochs=epochs or 150,
            batch_size=1 if one_d else 5,
            learning_rate=0.1,
        )
        for seed in seeds:
            dataset = generate_synth(SynthSpec(variant=name, seed=seed))
            for base in ("mse", "huber", "lqr"):
                variants = [LossSpec(base, weighted=False)] + [
                    LossSpec(base, weighted=True, norm_kind=nk) for nk in ("l1", "l2")
                ]
                for loss_spec in variants:
                    cfg = TrainConfig(seed=seed, **cfg_kw)
                    row, _ = _run_experiment(dataset, name, model_spec, loss_spec, lam, None, cfg)
                    rows.append(row)
        return RESULT_HEADER, rows

    # logistic-synth: imbalanced binary task with a logistic model
    model_spec = ModelSpec("logistic", 1, 2, 1)
    for seed in seeds:
        dataset = generate_binary_clusters(BinarySynthSpec(seed=seed))
        variants = [LossSpec("bce", weighted=False)] + [
            LossSpec("bce", weighted=True, norm_kind=nk) for nk in ("l1", "l2")
        ]
        for loss_spec in variants:
            cfg = TrainConfig(epochs=epochs or 150, batch_size=5, learning_rate=0.5, seed=seed)
            row, _ = _run_experiment(dataset, name, model_spec, loss_spec, 5, None, cfg)
            rows.append(row)
    return RESULT_HEADER_CLS, rows


def cmd_repro(args) -> None:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    created = [out_dir / "results.csv", out_dir / "manifest.txt"]
    try:
        seeds = _parse_int_list(args.seeds)
        header, rows = _repro_rows(args.name, seeds, args.epochs)
        (out_dir / "results.csv").write_text(header + "\n" + "\n".join(rows) + "\n")
        _write_manifest(out_dir, args)
        for row in rows:
            print(row)
    except Exception:
        for path in created:
            path.unlink(missing_ok=True)
        raise


def _add_data_args(p) -> None:
    p.add_argument("--data", required=True, help="input CSV path")
    p.add_argument("--feature-cols", required=True, help="comma list of names or indices")
    p.add_argument("--target-cols", required=True, help="comma list of names or indices")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--feature-subset", default="", help="feature indices used for weighting")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viloss", description="Variation-incentive loss re-weighting toolkit"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic skewed dataset")
    p.add_argument("--variant", choices=("synth-1d", "synth-2d"), default="synth-1d")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--noise-sigma", type=float, default=0.05)
    p.add_argument("--corrupt-fraction", type=float, default=0.05)
    p.add_argument("--cluster-fraction", type=float, default=0.8)
    p.add_argument("--cluster-center", type=float, default=0.35)
    p.add_argument("--cluster-sigma", type=float, default=0.08)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("ld-sweep", help="localized-deviation sweep over lambda candidates")
    _add_data_args(p)
    p.add_argument("--candidates", default=",".join(map(str, LAMBDA_CANDIDATES)))
    p.add_argument("--out", default="")
    p.add_argument("--config")
    p.set_defaults(func=cmd_ld_sweep)

    p = sub.add_parser("weigh", help="export the per-sample weight table")
    _add_data_args(p)
    p.add_argument("--lambda", dest="grid_lambda", type=int, required=True)
    p.add_argument("--gamma-norm", choices=("l1", "l2"), default="l2")
    p.add_argument("--mu-floor", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_weigh)

    p = sub.add_parser("train", help="train and evaluate one configuration")
    _add_data_args(p)
    p.add_argument("--model", choices=("linear", "polynomial", "logistic"), default="linear")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--loss", choices=("mse", "huber", "lqr", "bce"), default="mse")
    p.add_argument("--huber-delta", type=float, default=1.0)
    p.add_argument("--weighted", choices=("on", "off"), default="on")
    p.add_argument("--gamma-norm", choices=("l1", "l2"), default="l2")
    p.add_argument("--lambda", dest="grid_lambda", type=int, default=2)
    p.add_argument("--mu-floor", type=float, default=0.0)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=1)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved model on a CSV dataset")
    _add_data_args(p)
    p.add_argument("--model", required=True, help="saved model path")
    p.add_argument("--config")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("repro", help="run a named experiment end-to-end")
    p.add_argument("--name", choices=REPRO_NAMES, required=True)
    p.add_argument("--seeds", default="0,1,2,3,4")
    p.add_argument("--epochs", type=int, default=None, help="override the experiment default")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_repro)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _apply_config_file(args)
        args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
