"""Two-level stacking: six base learners produce clickbait probabilities that
feed a random-forest meta-classifier, plus model (de)serialization."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..feature_table import SelectionState, Standardizer, anova_f, select_top_k
from ..folds import stratified_kfold
from ..graph_net import GraphNetParams, params_from_arrays, params_to_arrays
from .learners import (
    GaussianNaiveBayes,
    KNearestNeighbors,
    LinearSVM,
    LogisticRegression,
    MultilayerPerceptron,
    SingleClassError,
)
from .trees import GradientBoostedTrees, RandomForest

FORMAT_VERSION = 1
BASE_ORDER = ("knn", "gnb", "logreg", "gbt", "mlp", "svm")

_FOLD_DOMAIN = 101
_META_DOMAIN = 777


@dataclass
class EnsembleConfig:
    meta_protocol: str = "out_of_fold"  # or "in_sample"
    internal_folds: int = 5
    select_k: int = 825
    knn_k: int = 5
    gnb_variance_floor: float = 1e-9
    logreg_l2: float = 1e-4
    logreg_lr: float = 0.5
    logreg_epochs: int = 300
    logreg_tolerance: float = 1e-6
    gbt_rounds: int = 100
    gbt_max_depth: int = 3
    gbt_shrinkage: float = 0.1
    gbt_reg_lambda: float = 1.0
    mlp_hidden: int = 64
    mlp_lr: float = 0.05
    mlp_epochs: int = 80
    mlp_momentum: float = 0.9
    svm_l2: float = 1e-4
    svm_lr: float = 0.01
    svm_epochs: int = 30
    meta_trees: int = 100
    meta_depth: int | None = 3  # None grows trees to purity; they then memorize the meta matrix


_BASE_CLASSES = {
    "knn": KNearestNeighbors,
    "gnb": GaussianNaiveBayes,
    "logreg": LogisticRegression,
    "gbt": GradientBoostedTrees,
    "mlp": MultilayerPerceptron,
    "svm": LinearSVM,
}


def make_base(kind: str, config: EnsembleConfig, seed: int):
    if kind == "knn":
        return KNearestNeighbors(k=config.knn_k)
    if kind == "gnb":
        return GaussianNaiveBayes(variance_floor=config.gnb_variance_floor)
    if kind == "logreg":
        return LogisticRegression(
            l2=config.logreg_l2,
            lr=config.logreg_lr,
            epochs=config.logreg_epochs,
            tolerance=config.logreg_tolerance,
        )
    if kind == "gbt":
        return GradientBoostedTrees(
            rounds=config.gbt_rounds,
            max_depth=config.gbt_max_depth,
            shrinkage=config.gbt_shrinkage,
            reg_lambda=config.gbt_reg_lambda,
        )
    if kind == "mlp":
        return MultilayerPerceptron(
            hidden=config.mlp_hidden,
            lr=config.mlp_lr,
            epochs=config.mlp_epochs,
            momentum=config.mlp_momentum,
            seed=seed,
        )
    if kind == "svm":
        return LinearSVM(l2=config.svm_l2, lr=config.svm_lr, epochs=config.svm_epochs)
    raise ValueError(f"unknown base model kind: {kind}")


@dataclass
class StackingModel:
    config: EnsembleConfig
    seed: int
    standardizer: Standardizer
    selection: SelectionState
    bases: dict  # kind -> fitted base model, in BASE_ORDER
    meta: RandomForest
    gcn_params: GraphNetParams | None = None


def _fit_seed(master: int, base_index: int, fold: int) -> int:
    ss = np.random.SeedSequence(master, spawn_key=(base_index, fold))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def base_probability_matrix(bases: dict, x: np.ndarray) -> np.ndarray:
    cols = [np.asarray(bases[kind].predict_proba(x), dtype=np.float64) for kind in BASE_ORDER]
    return np.column_stack(cols)


def train_stacking(
    x: np.ndarray,
    y: np.ndarray,
    config: EnsembleConfig | None = None,
    seed: int = 0,
    gcn_params: GraphNetParams | None = None,
    base_factory=make_base,
) -> StackingModel:
    """Fit the full tabular pipeline on raw assembled features.

    out_of_fold (default): the meta-forest learns from internal-fold
    held-out base probabilities while the shipped bases are refit on all
    rows. in_sample: bases fit once and the meta-forest learns from
    their resubstitution probabilities.
    """
    config = config or EnsembleConfig()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape[0] < 20:
        raise ValueError("need at least 20 rows to train the stack")
    if np.unique(y).size < 2:
        raise SingleClassError("training labels contain a single class")

    standardizer = Standardizer.fit(x)
    scores = anova_f(x, y)
    selection = select_top_k(scores, min(config.select_k, x.shape[1]))
    xt = selection.apply(standardizer.apply(x))

    bases = {
        kind: base_factory(kind, config, _fit_seed(seed, bi, 0)).fit(xt, y)
        for bi, kind in enumerate(BASE_ORDER)
    }

    if config.meta_protocol == "out_of_fold":
        folds = stratified_kfold(
            y, config.internal_folds, np.random.SeedSequence(seed, spawn_key=(_FOLD_DOMAIN,))
        )
        meta_x = np.zeros((x.shape[0], len(BASE_ORDER)))
        for fi, test_idx in enumerate(folds):
            train_mask = np.ones(x.shape[0], dtype=bool)
            train_mask[test_idx] = False
            for bi, kind in enumerate(BASE_ORDER):
                model = base_factory(kind, config, _fit_seed(seed, bi, fi + 1))
                model.fit(xt[train_mask], y[train_mask])
                meta_x[test_idx, bi] = model.predict_proba(xt[test_idx])
    elif config.meta_protocol == "in_sample":
        meta_x = base_probability_matrix(bases, xt)
    else:
        raise ValueError(f"unknown meta protocol: {config.meta_protocol}")

    meta_seed = _fit_seed(seed, _META_DOMAIN, 0)
    meta = RandomForest(
        n_trees=config.meta_trees,
        max_depth=config.meta_depth,
        max_features="sqrt",
        seed=meta_seed,
    )
    meta.fit(meta_x, y)
    return StackingModel(
        config=config,
        seed=seed,
        standardizer=standardizer,
        selection=selection,
        bases=bases,
        meta=meta,
        gcn_params=gcn_params,
    )


def stacking_predict(model: StackingModel, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(probability, label) per row; label = probability ≥ 0.5."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    xt = model.selection.apply(model.standardizer.apply(x))
    meta_x = base_probability_matrix(model.bases, xt)
    proba = model.meta.predict_proba(meta_x)
    return proba, (proba >= 0.5).astype(np.int64)


def model_to_dict(model: StackingModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "config": dataclasses.asdict(model.config),
        "seed": model.seed,
        "standardizer": {
            "mean": model.standardizer.mean.tolist(),
            "std": model.standardizer.std.tolist(),
        },
        "selection": {
            "scores": model.selection.scores.tolist(),
            "selected": model.selection.selected.tolist(),
        },
        "gcn_params": None
        if model.gcn_params is None
        else {k: v.tolist() for k, v in params_to_arrays(model.gcn_params).items()},
        "base_models": {kind: model.bases[kind].to_dict() for kind in BASE_ORDER},
        "meta_model": model.meta.to_dict(),
    }


def model_from_dict(d: dict) -> StackingModel:
    if d.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version: {d.get('format_version')}")
    config = EnsembleConfig(**d["config"])
    standardizer = Standardizer(
        mean=np.asarray(d["standardizer"]["mean"], dtype=np.float64),
        std=np.asarray(d["standardizer"]["std"], dtype=np.float64),
    )
    selection = SelectionState(
        scores=np.asarray(d["selection"]["scores"], dtype=np.float64),
        selected=np.asarray(d["selection"]["selected"], dtype=np.int64),
    )
    gcn_params = None
    if d.get("gcn_params") is not None:
        arrays = {k: np.asarray(v, dtype=np.float64) for k, v in d["gcn_params"].items()}
        gcn_params = params_from_arrays(arrays)
    bases = {kind: _BASE_CLASSES[kind].from_dict(d["base_models"][kind]) for kind in BASE_ORDER}
    meta = RandomForest.from_dict(d["meta_model"])
    return StackingModel(
        config=config,
        seed=int(d["seed"]),
        standardizer=standardizer,
        selection=selection,
        bases=bases,
        meta=meta,
        gcn_params=gcn_params,
    )


def save_model(model: StackingModel, path: str | Path) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True)
    tmp.replace(path)


def load_model(path: str | Path) -> StackingModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
