"""Command-line front end: validate / featurize / train / evaluate / predict /
sweep / analyze / synth.

Exit codes: 0 success, 1 corpus-validation failure, 2 usage or configuration
error, 3 runtime failure. Every artifact embeds the flat config and seed that
produced it; single-file outputs are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .config import ConfigError, PipelineConfig, load_config
from .corpus import CATEGORY_NAMES, CorpusError, inspect_bundle, load_manifest
from .ensemble import load_model, save_model
from .evaluation import (
    category_correlation,
    clickbait_word_frequency,
    cross_validate,
    feature_sweep,
)
from .feature_table import export_csv
from .pipeline import (
    _gcn_seed,
    apply_group_subset,
    ctd_mask,
    featurize_corpus,
    fill_graph_features,
    load_corpus,
    load_resources,
    predict_full,
    train_full,
)
from .graph_net import gcn_train
from .synth import SynthSpec, synth_corpus

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_json(path: Path, obj) -> None:
    _atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    overrides: dict[str, str] = {}
    for pair in getattr(args, "set", None) or []:
        key, eq, value = pair.partition("=")
        if not eq:
            raise ConfigError(f"--set expects KEY=VALUE, got {pair!r}")
        overrides[key.strip()] = value.strip()
    flag_keys = {
        "manifest": "paths.manifest",
        "out": "paths.out",
        "lexicons": "paths.lexicons",
        "stopwords": "paths.stopwords",
        "embeddings": "paths.embeddings",
        "seed": "seed",
        "jobs": "jobs",
        "face_threshold": "face.threshold",
    }
    for attr, key in flag_keys.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = str(value)
    return load_config(getattr(args, "config", None), overrides)


def _require(config: PipelineConfig, field: str, flag: str) -> str:
    value = getattr(config, field)
    if not value:
        raise ConfigError(f"{flag} is required (flag or paths.{field} config key)")
    return value


def _out_dir(config: PipelineConfig) -> Path:
    return Path(_require(config, "out", "--out"))


def _flat_config(config: PipelineConfig) -> dict:
    return config.to_flat()


def _load_features(config: PipelineConfig):
    resources = load_resources(config)
    entries, bundles = load_corpus(_require(config, "manifest", "--manifest"))
    matrix, graphs = featurize_corpus(entries, bundles, resources, config)
    return entries, matrix, graphs


# --- subcommands -----------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    config = _build_config(args)
    manifest = _require(config, "manifest", "--manifest")
    try:
        entries = load_manifest(manifest)
    except CorpusError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        print("1 violations")
        return EXIT_VALIDATION
    total = 0
    for entry in entries:
        for violation in inspect_bundle(entry):
            total += 1
            print(f"{entry.video_id}: [{violation.code}] {violation.message}")
    print(f"{total} violations")
    return EXIT_OK if total == 0 else EXIT_VALIDATION


def cmd_featurize(args: argparse.Namespace) -> int:
    config = _build_config(args)
    out = _out_dir(config)
    _, matrix, graphs = _load_features(config)
    matrix, graphs = apply_group_subset(matrix, graphs, config)
    if graphs is not None and ctd_mask(matrix).any():
        params = gcn_train(
            graphs,
            matrix.labels,
            hidden=config.gcn_hidden,
            lr=config.gcn_lr,
            epochs=config.gcn_epochs,
            seed=_gcn_seed(config.seed),
        )
        fill_graph_features(matrix, graphs, params)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "features.csv"
    tmp = csv_path.with_suffix(".csv.tmp")
    export_csv(matrix, tmp)
    os.replace(tmp, csv_path)
    _atomic_write_json(
        out / "features.meta.json", {"config": _flat_config(config), "seed": config.seed}
    )
    print(f"wrote {matrix.n_rows} rows x {matrix.n_columns} columns to {csv_path}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    config = _build_config(args)
    out = _out_dir(config)
    _, matrix, graphs = _load_features(config)
    model = train_full(matrix, graphs, config)
    out.mkdir(parents=True, exist_ok=True)
    save_model(model, out / "model.json")
    _atomic_write_json(
        out / "train.meta.json", {"config": _flat_config(config), "seed": config.seed}
    )
    print(f"wrote model for {matrix.n_rows} videos to {out / 'model.json'}")
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    config = _build_config(args)
    out = _out_dir(config)
    model = load_model(args.model)
    entries, matrix, graphs = _load_features(config)
    proba, labels = predict_full(model, matrix, graphs, config)
    lines = [
        json.dumps(
            {"video_id": e.video_id, "probability": float(p), "label": int(lab)},
            sort_keys=True,
        )
        for e, p, lab in zip(entries, proba, labels)
    ]
    out.mkdir(parents=True, exist_ok=True)
    _atomic_write_text(out / "predictions.jsonl", "\n".join(lines) + "\n")
    _atomic_write_json(
        out / "predictions.meta.json", {"config": _flat_config(config), "seed": config.seed}
    )
    accuracy = float(np.mean(labels == matrix.labels))
    print(f"wrote {len(lines)} predictions to {out / 'predictions.jsonl'}")
    print(f"accuracy against manifest labels: {accuracy:.4f}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _build_config(args)
    if args.folds is not None:
        config.eval_folds = args.folds
    if args.holdout is not None:
        config.eval_holdout = args.holdout
    if args.meta is not None:
        config.eval_meta = args.meta
    config.validate()
    out = _out_dir(config)
    _, matrix, graphs = _load_features(config)
    matrix, graphs = apply_group_subset(matrix, graphs, config)
    if graphs is not None and not ctd_mask(matrix).any():
        graphs = None
    report = cross_validate(matrix, config.eval_config(), seed=config.seed, graphs=graphs)
    doc = report.to_dict()
    doc["config"] = _flat_config(config)
    _atomic_write_json(out / "report.json", doc)
    roc_lines = ["fpr,tpr"] + [f"{fpr!r},{tpr!r}" for fpr, tpr in report.roc_points]
    _atomic_write_text(out / "roc.csv", "\n".join(roc_lines) + "\n")
    mean = report.mean
    print(
        f"{len(report.folds)}-fold mean: accuracy={mean.accuracy:.4f} "
        f"f1={mean.f1:.4f} auc={mean.auc:.4f}"
    )
    print(f"wrote {out / 'report.json'} and {out / 'roc.csv'}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _build_config(args)
    try:
        ks = [int(part) for part in args.ks.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"--ks expects comma-separated integers, got {args.ks!r}") from None
    out = _out_dir(config)
    _, matrix, graphs = _load_features(config)
    matrix, graphs = apply_group_subset(matrix, graphs, config)
    if graphs is not None and not ctd_mask(matrix).any():
        graphs = None
    rows = feature_sweep(matrix, ks, config.eval_config(), seed=config.seed, graphs=graphs)
    doc = {"config": _flat_config(config), "seed": config.seed, "sweep": rows}
    _atomic_write_json(out / "sweep.json", doc)
    csv_lines = ["k,mean_accuracy,mean_auc"] + [
        f"{r['k']},{r['mean_accuracy']!r},{r['mean_auc']!r}" for r in rows
    ]
    _atomic_write_text(out / "sweep.csv", "\n".join(csv_lines) + "\n")
    for r in rows:
        print(f"k={r['k']}: accuracy={r['mean_accuracy']:.4f} auc={r['mean_auc']:.4f}")
    print(f"wrote {out / 'sweep.json'} and {out / 'sweep.csv'}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    config = _build_config(args)
    out = _out_dir(config)
    resources = load_resources(config)
    entries = load_manifest(_require(config, "manifest", "--manifest"))
    frequency = clickbait_word_frequency(entries, resources.stopwords, top_n=args.top)
    correlation = category_correlation(entries)
    doc = {
        "config": _flat_config(config),
        "seed": config.seed,
        "word_frequency": [[token, count] for token, count in frequency],
        "category_correlation": {
            "categories": list(CATEGORY_NAMES),
            "matrix": [[float(v) for v in row] for row in correlation],
        },
    }
    _atomic_write_json(out / "analysis.json", doc)
    _atomic_write_text(
        out / "word_frequency.csv",
        "\n".join(["token,count"] + [f"{t},{c}" for t, c in frequency]) + "\n",
    )
    corr_lines = ["," + ",".join(CATEGORY_NAMES)]
    for name, row in zip(CATEGORY_NAMES, correlation):
        corr_lines.append(name + "," + ",".join(repr(float(v)) for v in row))
    _atomic_write_text(out / "category_correlation.csv", "\n".join(corr_lines) + "\n")
    print(f"wrote analysis artifacts to {out}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    config = _build_config(args)
    out = _out_dir(config)
    signals = {}
    for name in ("title", "bert", "resnet", "graph", "text"):
        per_flag = getattr(args, f"signal_{name}")
        value = per_flag if per_flag is not None else args.signal
        if value is not None:
            signals[f"signal_{name}"] = value
    spec = SynthSpec(
        n_videos=args.n,
        clickbait_fraction=args.fraction,
        kf_min=args.kf_min,
        kf_max=args.kf_max,
        noise=args.noise,
        seed=config.seed,
        **signals,
    )
    try:
        spec.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    entries = synth_corpus(spec, out)
    _atomic_write_json(
        out / "synth.meta.json",
        {"config": _flat_config(config), "seed": config.seed, "spec": dataclasses.asdict(spec)},
    )
    n_click = sum(e.label for e in entries)
    print(f"wrote {len(entries)} bundles ({n_click} clickbait) under {out}")
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="baitscreen",
        description="Upload-time clickbait screening: features, training, evaluation.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--seed", type=int, help="master seed (overrides config)")
    common.add_argument("--jobs", type=int, help="parallel fold workers; 0 = all cores")
    common.add_argument("--out", help="output directory")
    common.add_argument("--manifest", help="corpus manifest (JSON Lines)")
    common.add_argument("--lexicons", help="lexicon directory (default: packaged)")
    common.add_argument("--stopwords", help="stopword list file (default: packaged)")
    common.add_argument("--embeddings", help="word-vector table (default: packaged)")
    common.add_argument(
        "--face-threshold", dest="face_threshold", type=float, help="face-match distance cutoff"
    )
    common.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override any config key; repeatable",
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check every bundle invariant")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("featurize", parents=[common], help="write the feature-matrix CSV")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", parents=[common], help="fit the full pipeline, write model.json")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="score a manifest with a trained model")
    p.add_argument("--model", required=True, help="model.json from `train`")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common], help="stratified cross-validation report")
    p.add_argument("--folds", type=int, help="fold count (default: config eval.folds)")
    p.add_argument("--holdout", type=float, help="held-out fraction before CV")
    p.add_argument("--meta", choices=("out_of_fold", "in_sample"), help="meta-feature protocol")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", parents=[common], help="accuracy vs. selected-column count")
    p.add_argument("--ks", required=True, help="comma-separated selection sizes, e.g. 5,50,200")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", parents=[common], help="title word frequency + category correlation")
    p.add_argument("--top", type=int, default=None, help="keep only the N most frequent tokens")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic labelled corpus")
    p.add_argument("--n", type=int, default=400, help="video count")
    p.add_argument("--fraction", type=float, default=0.5, help="clickbait fraction")
    p.add_argument("--kf-min", type=int, default=3, help="min keyframes per video")
    p.add_argument("--kf-max", type=int, default=6, help="max keyframes per video")
    p.add_argument("--signal", type=float, default=None, help="set every signal strength at once")
    for name in ("title", "bert", "resnet", "graph", "text"):
        p.add_argument(f"--signal-{name}", type=float, default=None, help=f"{name} signal strength")
    p.add_argument("--noise", type=float, default=1.0, help="feature noise scale")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorpusError as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - the CLI boundary maps errors to exit codes
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
