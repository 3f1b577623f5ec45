"""Cross-validation harness, confusion metrics, rank-based ROC-AUC, the
feature-count sweep, and corpus-level title analyses."""

from __future__ import annotations

import dataclasses
import multiprocessing
import time
from dataclasses import dataclass, field

import numpy as np

from .corpus import CATEGORY_NAMES, ManifestEntry
from .ensemble import (
    BASE_ORDER,
    EnsembleConfig,
    base_probability_matrix,
    stacking_predict,
    train_stacking,
)
from .feature_table import FeatureMatrix, group_mask
from .folds import ClassTooSmallError, stratified_holdout, stratified_kfold
from .graph_net import gcn_features, gcn_train
from .visual_disparity import DisparityGraph

__all__ = [
    "ClassTooSmallError",
    "EvalConfig",
    "EvalReport",
    "Metrics",
    "binary_metrics",
    "category_correlation",
    "clickbait_word_frequency",
    "cross_validate",
    "feature_sweep",
    "mean_metrics",
    "roc_auc",
    "roc_curve",
    "strip_timing",
    "stratified_holdout",
    "stratified_kfold",
]

_FOLD_SEED_DOMAIN = 200
_GCN_SEED_DOMAIN = 300


class SingleClassError(ValueError):
    pass


@dataclass
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float = 0.0
    fit_time_s: float = 0.0
    score_time_s: float = 0.0

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def binary_metrics(y_true, y_score, threshold: float = 0.5) -> Metrics:
    """Confusion metrics at the threshold; empty denominators yield 0."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_score = np.asarray(y_score, dtype=np.float64)
    if y_true.size != y_score.size or y_true.size == 0:
        raise ValueError("labels and scores must be equal-length and nonempty")
    y_pred = (y_score >= threshold).astype(np.int64)
    tp = int(np.sum((y_pred == 1) & (y_true == 1)))
    fp = int(np.sum((y_pred == 1) & (y_true == 0)))
    fn = int(np.sum((y_pred == 0) & (y_true == 1)))
    tn = int(np.sum((y_pred == 0) & (y_true == 0)))
    total = tp + fp + fn + tn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(
        accuracy=(tp + tn) / total,
        precision=precision,
        recall=recall,
        f1=f1,
    )


def _midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing the mean rank of their block."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        # Positions i..j (0-based) share rank (i+1 + j+1)/2.
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def roc_auc(y_true, y_score) -> float:
    """Rank statistic: P(score⁺ > score⁻) + ½·P(tie)."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_score = np.asarray(y_score, dtype=np.float64)
    n_pos = int(np.sum(y_true == 1))
    n_neg = int(np.sum(y_true == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("roc_auc needs both classes")
    ranks = _midranks(y_score)
    pos_rank_sum = float(ranks[y_true == 1].sum())
    return (pos_rank_sum - 0.5 * n_pos * (n_pos + 1)) / (n_pos * n_neg)


def roc_curve(y_true, y_score) -> list[tuple[float, float]]:
    """(FPR, TPR) points swept over the distinct score thresholds,
    from (0,0) to (1,1)."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_score = np.asarray(y_score, dtype=np.float64)
    n_pos = int(np.sum(y_true == 1))
    n_neg = int(np.sum(y_true == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("roc_curve needs both classes")
    order = np.argsort(-y_score, kind="stable")
    sorted_true = y_true[order]
    sorted_score = y_score[order]
    points = [(0.0, 0.0)]
    tp = fp = 0
    for i in range(y_true.size):
        tp += int(sorted_true[i] == 1)
        fp += int(sorted_true[i] == 0)
        if i + 1 == y_true.size or sorted_score[i + 1] != sorted_score[i]:
            points.append((fp / n_neg, tp / n_pos))
    return points


def mean_metrics(folds: list[Metrics]) -> Metrics:
    return Metrics(
        **{
            f.name: float(np.mean([getattr(m, f.name) for m in folds]))
            for f in dataclasses.fields(Metrics)
        }
    )


@dataclass
class EvalConfig:
    k: int = 10
    holdout: float = 0.0  # 0 disables the initial stratified holdout
    jobs: int = 1
    gcn_hidden: int = 32
    gcn_lr: float = 0.05
    gcn_epochs: int = 120
    gcn_crossfit_parts: int = 3  # <2 fills training rows from the in-sample network
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)


@dataclass
class EvalReport:
    folds: list[Metrics]
    mean: Metrics
    base_auc: dict[str, float]
    roc_points: list[tuple[float, float]]
    config: dict
    seed: int

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "seed": self.seed,
            "folds": [m.as_dict() for m in self.folds],
            "mean": self.mean.as_dict(),
            "base_auc": self.base_auc,
            "roc_points": [[float(a), float(b)] for a, b in self.roc_points],
        }


def strip_timing(obj):
    """Deep-copy a report structure without wall-clock fields, for
    byte-identical comparison of reruns."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if not k.endswith("_time_s")}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def _seed_int(master: int, domain: int, index: int) -> int:
    ss = np.random.SeedSequence(master, spawn_key=(domain, index))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


# Shared state for fork-based fold workers; set immediately before the pool
# spawns so children inherit it.
_FOLD_WORK: dict | None = None


def _run_one_fold(fi: int) -> dict:
    w = _FOLD_WORK
    assert w is not None
    values: np.ndarray = w["values"]
    y: np.ndarray = w["y"]
    folds: list[np.ndarray] = w["folds"]
    graphs: list[DisparityGraph] | None = w["graphs"]
    config: EvalConfig = w["config"]
    seed: int = w["seed"]
    ctd_slice: slice | None = w["ctd_slice"]

    test_idx = folds[fi]
    train_mask = np.ones(y.size, dtype=bool)
    train_mask[test_idx] = False
    train_idx = np.flatnonzero(train_mask)

    t0 = time.perf_counter()
    x = values
    if graphs is not None:
        x = values.copy()
        if w["ctd_matrices"] is not None:
            x[:, ctd_slice] = w["ctd_matrices"][fi]
        else:
            x[:, ctd_slice] = fold_ctd_matrix(
                graphs, y, train_idx, config, _seed_int(seed, _GCN_SEED_DOMAIN, fi)
            )
    model = train_stacking(
        x[train_idx], y[train_idx], config.ensemble, seed=_seed_int(seed, _FOLD_SEED_DOMAIN, fi)
    )
    fit_time = time.perf_counter() - t0

    t0 = time.perf_counter()
    proba, _ = stacking_predict(model, x[test_idx])
    xt = model.selection.apply(model.standardizer.apply(x[test_idx]))
    base_probs = base_probability_matrix(model.bases, xt)
    score_time = time.perf_counter() - t0

    m = binary_metrics(y[test_idx], proba)
    m.auc = roc_auc(y[test_idx], proba)
    m.fit_time_s = fit_time
    m.score_time_s = score_time
    return {
        "metrics": m,
        "test_idx": test_idx,
        "proba": proba,
        "base_probs": base_probs,
    }


def crossfit_ctd_rows(
    graphs: list[DisparityGraph],
    y: np.ndarray,
    hidden: int,
    lr: float,
    epochs: int,
    seed: int,
    parts: int,
) -> np.ndarray:
    """Pooled-graph features where each row comes from a network that never
    saw that row's label: rows split into stratified parts, part j featurized
    by a network fit on the rest.

    A network fit on all rows memorizes them, so in-sample features are far
    more separable than the features fresh rows will get; downstream learners
    trained on the memorized version overweight these columns and the stack's
    out-of-fold meta matrix degenerates to all-perfect columns.
    """
    part_folds = stratified_kfold(y, parts, np.random.SeedSequence(seed, spawn_key=(0,)))
    out: np.ndarray | None = None
    for j, part in enumerate(part_folds):
        keep = np.ones(y.size, dtype=bool)
        keep[part] = False
        part_seed = int(np.random.SeedSequence(seed, spawn_key=(j + 1,)).generate_state(1)[0])
        params = gcn_train(
            [g for g, k in zip(graphs, keep) if k],
            y[keep],
            hidden=hidden,
            lr=lr,
            epochs=epochs,
            seed=part_seed,
        )
        feats = gcn_features([graphs[i] for i in part], params)
        if out is None:
            out = np.zeros((y.size, feats.shape[1]))
        out[part] = feats
    assert out is not None
    return out


def fold_ctd_matrix(
    graphs: list[DisparityGraph],
    y: np.ndarray,
    train_idx: np.ndarray,
    config: EvalConfig,
    seed: int,
) -> np.ndarray:
    """Pooled-graph features for every row: held-out rows from a network fit
    on the training rows only, training rows cross-fitted so none is
    featurized by a network that trained on it."""
    params = gcn_train(
        [graphs[i] for i in train_idx],
        y[train_idx],
        hidden=config.gcn_hidden,
        lr=config.gcn_lr,
        epochs=config.gcn_epochs,
        seed=seed,
    )
    feats = gcn_features(graphs, params)
    if config.gcn_crossfit_parts >= 2:
        feats[train_idx] = crossfit_ctd_rows(
            [graphs[i] for i in train_idx],
            y[train_idx],
            config.gcn_hidden,
            config.gcn_lr,
            config.gcn_epochs,
            seed,
            config.gcn_crossfit_parts,
        )
    return feats


def _run_folds(
    values: np.ndarray,
    y: np.ndarray,
    folds: list[np.ndarray],
    graphs: list[DisparityGraph] | None,
    config: EvalConfig,
    seed: int,
    ctd_slice: slice | None,
    ctd_matrices: list[np.ndarray] | None = None,
) -> tuple[list[Metrics], dict[str, float], np.ndarray, np.ndarray]:
    global _FOLD_WORK
    _FOLD_WORK = {
        "values": values,
        "y": y,
        "folds": folds,
        "graphs": graphs,
        "config": config,
        "seed": seed,
        "ctd_slice": ctd_slice,
        "ctd_matrices": ctd_matrices,
    }
    try:
        if config.jobs > 1:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(min(config.jobs, len(folds))) as pool:
                results = pool.map(_run_one_fold, range(len(folds)))
        else:
            results = [_run_one_fold(fi) for fi in range(len(folds))]
    finally:
        _FOLD_WORK = None

    metrics = [r["metrics"] for r in results]
    pooled_proba = np.zeros(y.size)
    pooled_base = np.zeros((y.size, len(BASE_ORDER)))
    for r in results:
        pooled_proba[r["test_idx"]] = r["proba"]
        pooled_base[r["test_idx"]] = r["base_probs"]
    base_auc = {
        kind: roc_auc(y, pooled_base[:, bi]) for bi, kind in enumerate(BASE_ORDER)
    }
    return metrics, base_auc, pooled_proba, pooled_base


def _ctd_slice(features: FeatureMatrix) -> slice | None:
    idx = group_mask(features, {"CTD"})
    if idx.size == 0:
        return None
    return slice(int(idx[0]), int(idx[-1]) + 1)


def cross_validate(
    features: FeatureMatrix,
    config: EvalConfig | None = None,
    seed: int = 0,
    graphs: list[DisparityGraph] | None = None,
    _ctd_matrices: list[np.ndarray] | None = None,
) -> EvalReport:
    """k-fold stratified CV; when graphs are supplied, each fold trains its
    own graph network on training rows and rewrites the pooled-feature
    columns for all rows before the tabular stack is fit."""
    config = config or EvalConfig()
    values = features.values
    y = np.asarray(features.labels, dtype=np.int64)
    if config.holdout > 0.0:
        keep, _ = stratified_holdout(
            y, config.holdout, np.random.SeedSequence(seed, spawn_key=(400,))
        )
        values = values[keep]
        y = y[keep]
        if graphs is not None:
            graphs = [graphs[i] for i in keep]
    folds = stratified_kfold(y, config.k, np.random.SeedSequence(seed, spawn_key=(_FOLD_SEED_DOMAIN,)))
    ctd = _ctd_slice(features) if graphs is not None else None
    if graphs is not None and ctd is None:
        raise ValueError("graphs supplied but the matrix has no pooled-graph columns")
    metrics, base_auc, pooled_proba, _ = _run_folds(
        values, y, folds, graphs, config, seed, ctd, _ctd_matrices
    )
    return EvalReport(
        folds=metrics,
        mean=mean_metrics(metrics),
        base_auc=base_auc,
        roc_points=roc_curve(y, pooled_proba),
        config=dataclasses.asdict(config),
        seed=seed,
    )


def feature_sweep(
    features: FeatureMatrix,
    ks: list[int],
    config: EvalConfig | None = None,
    seed: int = 0,
    graphs: list[DisparityGraph] | None = None,
) -> list[dict]:
    """cross_validate once per selection size with one shared fold
    assignment; per-fold graph networks are fit once and reused, since the
    selection size only affects the tabular stage."""
    config = config or EvalConfig()
    ctd_matrices = None
    if graphs is not None and ks:
        y = np.asarray(features.labels, dtype=np.int64)
        if config.holdout > 0.0:
            keep, _ = stratified_holdout(
                y, config.holdout, np.random.SeedSequence(seed, spawn_key=(400,))
            )
            y_cv = y[keep]
            graphs_cv = [graphs[i] for i in keep]
        else:
            y_cv, graphs_cv = y, graphs
        folds = stratified_kfold(
            y_cv, config.k, np.random.SeedSequence(seed, spawn_key=(_FOLD_SEED_DOMAIN,))
        )
        ctd_matrices = []
        for fi, test_idx in enumerate(folds):
            train_mask = np.ones(y_cv.size, dtype=bool)
            train_mask[test_idx] = False
            ctd_matrices.append(
                fold_ctd_matrix(
                    graphs_cv,
                    y_cv,
                    np.flatnonzero(train_mask),
                    config,
                    _seed_int(seed, _GCN_SEED_DOMAIN, fi),
                )
            )
    rows = []
    for k in ks:
        cfg = dataclasses.replace(
            config, ensemble=dataclasses.replace(config.ensemble, select_k=int(k))
        )
        report = cross_validate(
            features, cfg, seed=seed, graphs=graphs, _ctd_matrices=ctd_matrices
        )
        rows.append(
            {
                "k": int(k),
                "mean_accuracy": report.mean.accuracy,
                "mean_auc": report.mean.auc,
            }
        )
    return rows


def category_correlation(entries: list[ManifestEntry]) -> np.ndarray:
    """Pearson matrix of the five category flags over clickbait rows;
    constant flags correlate 0 with everything, diagonal forced to 1."""
    rows = [e for e in entries if e.label == 1]
    if len(rows) < 2:
        raise ValueError("need at least two clickbait entries")
    flags = np.asarray(
        [[float(e.categories.get(c, False)) for c in CATEGORY_NAMES] for e in rows]
    )
    centered = flags - flags.mean(axis=0)
    std = flags.std(axis=0)
    corr = np.eye(len(CATEGORY_NAMES))
    for i in range(len(CATEGORY_NAMES)):
        for j in range(i + 1, len(CATEGORY_NAMES)):
            if std[i] == 0.0 or std[j] == 0.0:
                r = 0.0
            else:
                r = float(np.mean(centered[:, i] * centered[:, j]) / (std[i] * std[j]))
            corr[i, j] = corr[j, i] = r
    return corr


def clickbait_word_frequency(
    entries: list[ManifestEntry],
    stopwords: set[str] | frozenset[str] = frozenset(),
    top_n: int | None = None,
) -> list[tuple[str, int]]:
    """Token counts over clickbait titles, highest first, ties alphabetical."""
    counts: dict[str, int] = {}
    for e in entries:
        if e.label != 1:
            continue
        for token in e.title.lower().split():
            if token in stopwords:
                continue
            counts[token] = counts.get(token, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked if top_n is None else ranked[:top_n]
