"""Run configuration: a flat key=value file with typed keys and CLI overrides.

The format is deliberately primitive — one `key = value` pair per line, '#'
for full-line comments — so configs stay diffable and parseable anywhere.
Unknown keys are errors; every value echoes back out through `to_flat()` so
artifacts record the exact configuration that produced them.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path

from .ensemble import EnsembleConfig
from .evaluation import EvalConfig

META_PROTOCOLS = ("out_of_fold", "in_sample")


class ConfigError(ValueError):
    """Malformed config file, unknown key, or out-of-range value."""


@dataclass
class PipelineConfig:
    manifest: str = ""
    lexicons: str = ""  # empty -> packaged fixture lexicons
    stopwords: str = ""  # empty -> stopword list from the lexicon directory
    embeddings: str = ""  # empty -> packaged word-vector table
    out: str = ""
    face_threshold: float = 0.6
    sentiment_alpha: float = 15.0
    gcn_hidden: int = 32
    gcn_lr: float = 0.05
    gcn_epochs: int = 120
    gcn_crossfit_parts: int = 3  # 0/1 disables cross-fitting of training-row graph features
    select_k: int = 825
    groups: str = ""  # comma-separated feature-group subset; empty -> all
    eval_folds: int = 10
    eval_holdout: float = 0.0
    eval_meta: str = "out_of_fold"
    eval_internal_folds: int = 5
    jobs: int = 0  # 0 -> one worker per available core
    seed: int = 0
    knn_k: int = 5
    gnb_variance_floor: float = 1e-9
    logreg_l2: float = 1e-4
    logreg_lr: float = 0.5
    logreg_epochs: int = 300
    logreg_tolerance: float = 1e-6
    gbt_rounds: int = 100
    gbt_depth: int = 3
    gbt_shrinkage: float = 0.1
    gbt_lambda: float = 1.0
    mlp_hidden: int = 64
    mlp_lr: float = 0.05
    mlp_epochs: int = 80
    mlp_momentum: float = 0.9
    svm_l2: float = 1e-4
    svm_lr: float = 0.01
    svm_epochs: int = 30
    meta_trees: int = 100
    meta_depth: int = 3  # 0 grows meta trees to purity

    def validate(self) -> None:
        if self.face_threshold < 0:
            raise ConfigError("face.threshold must be non-negative")
        if self.sentiment_alpha <= 0:
            raise ConfigError("sentiment.alpha must be positive")
        if self.eval_meta not in META_PROTOCOLS:
            raise ConfigError(f"eval.meta must be one of {META_PROTOCOLS}, got {self.eval_meta!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.eval_folds < 2:
            raise ConfigError("eval.folds must be at least 2")
        if not 0.0 <= self.eval_holdout < 1.0:
            raise ConfigError("eval.holdout must lie in [0, 1)")
        if self.jobs < 0:
            raise ConfigError("jobs must be non-negative (0 means auto)")
        if self.meta_depth < 0:
            raise ConfigError("model.meta.depth must be non-negative (0 means unlimited)")
        if self.gcn_crossfit_parts < 0:
            raise ConfigError("gcn.crossfit_parts must be non-negative (0 disables cross-fitting)")
        if self.select_k < 1:
            raise ConfigError("select.k must be at least 1")
        for name in ("gcn_hidden", "gcn_epochs", "eval_internal_folds", "knn_k",
                     "logreg_epochs", "gbt_rounds", "gbt_depth", "mlp_hidden",
                     "mlp_epochs", "svm_epochs", "meta_trees"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{_KEY_OF[name]} must be at least 1")

    def group_subset(self) -> tuple[str, ...]:
        if not self.groups.strip():
            return ()
        return tuple(g.strip().upper() for g in self.groups.split(",") if g.strip())

    def resolved_jobs(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)

    def ensemble_config(self) -> EnsembleConfig:
        return EnsembleConfig(
            meta_protocol=self.eval_meta,
            internal_folds=self.eval_internal_folds,
            select_k=self.select_k,
            knn_k=self.knn_k,
            gnb_variance_floor=self.gnb_variance_floor,
            logreg_l2=self.logreg_l2,
            logreg_lr=self.logreg_lr,
            logreg_epochs=self.logreg_epochs,
            logreg_tolerance=self.logreg_tolerance,
            gbt_rounds=self.gbt_rounds,
            gbt_max_depth=self.gbt_depth,
            gbt_shrinkage=self.gbt_shrinkage,
            gbt_reg_lambda=self.gbt_lambda,
            mlp_hidden=self.mlp_hidden,
            mlp_lr=self.mlp_lr,
            mlp_epochs=self.mlp_epochs,
            mlp_momentum=self.mlp_momentum,
            svm_l2=self.svm_l2,
            svm_lr=self.svm_lr,
            svm_epochs=self.svm_epochs,
            meta_trees=self.meta_trees,
            meta_depth=self.meta_depth or None,
        )

    def eval_config(self) -> EvalConfig:
        return EvalConfig(
            k=self.eval_folds,
            holdout=self.eval_holdout,
            jobs=self.resolved_jobs(),
            gcn_hidden=self.gcn_hidden,
            gcn_lr=self.gcn_lr,
            gcn_epochs=self.gcn_epochs,
            gcn_crossfit_parts=self.gcn_crossfit_parts,
            ensemble=self.ensemble_config(),
        )

    def to_flat(self) -> dict[str, object]:
        return {key: getattr(self, attr) for key, (attr, _) in _KEYS.items()}


_KEYS: dict[str, tuple[str, type]] = {
    "paths.manifest": ("manifest", str),
    "paths.lexicons": ("lexicons", str),
    "paths.stopwords": ("stopwords", str),
    "paths.embeddings": ("embeddings", str),
    "paths.out": ("out", str),
    "face.threshold": ("face_threshold", float),
    "sentiment.alpha": ("sentiment_alpha", float),
    "gcn.hidden": ("gcn_hidden", int),
    "gcn.lr": ("gcn_lr", float),
    "gcn.epochs": ("gcn_epochs", int),
    "gcn.crossfit_parts": ("gcn_crossfit_parts", int),
    "select.k": ("select_k", int),
    "groups": ("groups", str),
    "eval.folds": ("eval_folds", int),
    "eval.holdout": ("eval_holdout", float),
    "eval.meta": ("eval_meta", str),
    "eval.internal_folds": ("eval_internal_folds", int),
    "jobs": ("jobs", int),
    "seed": ("seed", int),
    "model.knn.k": ("knn_k", int),
    "model.gnb.variance_floor": ("gnb_variance_floor", float),
    "model.logreg.l2": ("logreg_l2", float),
    "model.logreg.lr": ("logreg_lr", float),
    "model.logreg.epochs": ("logreg_epochs", int),
    "model.logreg.tolerance": ("logreg_tolerance", float),
    "model.gbt.rounds": ("gbt_rounds", int),
    "model.gbt.depth": ("gbt_depth", int),
    "model.gbt.shrinkage": ("gbt_shrinkage", float),
    "model.gbt.lambda": ("gbt_lambda", float),
    "model.mlp.hidden": ("mlp_hidden", int),
    "model.mlp.lr": ("mlp_lr", float),
    "model.mlp.epochs": ("mlp_epochs", int),
    "model.mlp.momentum": ("mlp_momentum", float),
    "model.svm.l2": ("svm_l2", float),
    "model.svm.lr": ("svm_lr", float),
    "model.svm.epochs": ("svm_epochs", int),
    "model.meta.trees": ("meta_trees", int),
    "model.meta.depth": ("meta_depth", int),
}

_KEY_OF = {attr: key for key, (attr, _) in _KEYS.items()}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse `key = value` lines into a string map; no type coercion yet."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, eq, value = stripped.partition("=")
        if not eq:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {stripped!r}")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def apply_settings(config: PipelineConfig, settings: dict[str, str], source: str) -> None:
    for key, raw in settings.items():
        if key not in _KEYS:
            raise ConfigError(f"{source}: unknown config key {key!r}")
        attr, typ = _KEYS[key]
        try:
            value = raw if typ is str else (int(raw, 0) if typ is int else float(raw))
        except ValueError:
            raise ConfigError(
                f"{source}: key {key!r} expects {typ.__name__}, got {raw!r}"
            ) from None
        setattr(config, attr, value)


def load_config(
    path: str | os.PathLike | None = None,
    overrides: dict[str, str] | None = None,
) -> PipelineConfig:
    """Build a config from defaults, then a file, then explicit overrides."""
    config = PipelineConfig()
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        apply_settings(config, parse_config_text(p.read_text(encoding="utf-8"), str(p)), str(p))
    if overrides:
        apply_settings(config, overrides, "<command line>")
    config.validate()
    return config


def replace(config: PipelineConfig, **updates) -> PipelineConfig:
    return dataclasses.replace(config, **updates)
