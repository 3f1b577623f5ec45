"""Glue between the on-disk corpus and the learning stages: load bundles,
assemble the per-video feature rows, train/apply the full scoring pipeline."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .corpus import ManifestEntry, ModalityBundle, load_bundle, load_manifest
from .ensemble import StackingModel, train_stacking, stacking_predict
from .evaluation import crossfit_ctd_rows
from .feature_table import (
    GROUP_ORDER,
    FeatureMatrix,
    FeatureParts,
    UnknownGroupError,
    assemble_features,
)
from .graph_net import GraphNetParams, gcn_features, gcn_train
from .lexicons import BaitLexicons, load_lexicons, load_stopwords, packaged_data_dir
from .text_disparity import WordEmbeddingTable, disparity_triplet, load_embedding_table
from .title_analysis import baitiness_features, lexical_features, sentiment_scores
from .visual_disparity import DisparityGraph, build_star_graph

_GCN_SEED_DOMAIN = 300  # shared with per-fold evaluation so seeds never collide


@dataclass
class Resources:
    lexicons: BaitLexicons
    stopwords: set[str]
    table: WordEmbeddingTable


def load_resources(config: PipelineConfig) -> Resources:
    lex_dir = Path(config.lexicons) if config.lexicons else packaged_data_dir()
    lexicons = load_lexicons(lex_dir)
    stopwords = load_stopwords(config.stopwords) if config.stopwords else lexicons.stopwords
    table_path = Path(config.embeddings) if config.embeddings else packaged_data_dir() / "word_vectors.txt"
    table = load_embedding_table(table_path)
    return Resources(lexicons=lexicons, stopwords=stopwords, table=table)


def load_corpus(manifest_path: str | Path) -> tuple[list[ManifestEntry], list[ModalityBundle]]:
    entries = load_manifest(manifest_path)
    return entries, [load_bundle(e) for e in entries]


def featurize_corpus(
    entries: list[ManifestEntry],
    bundles: list[ModalityBundle],
    resources: Resources,
    config: PipelineConfig,
) -> tuple[FeatureMatrix, list[DisparityGraph]]:
    """Full-width feature matrix plus one disparity graph per video. The
    pooled-graph columns are zero until a trained network fills them."""
    rows = []
    graphs = []
    for entry, bundle in zip(entries, bundles):
        graphs.append(build_star_graph(bundle, threshold=config.face_threshold))
        parts = FeatureParts(
            title_embedding=bundle.title_embedding,
            thumbnail_embedding=bundle.thumbnail_embedding,
            graph_vector=np.zeros(16),
            title_caption=disparity_triplet(
                entry.title, bundle.caption, resources.stopwords, resources.table
            ),
            title_transcript=disparity_triplet(
                entry.title, bundle.transcript, resources.stopwords, resources.table
            ),
            sentiment=sentiment_scores(entry.title, resources.lexicons, alpha=config.sentiment_alpha),
            lexical=lexical_features(entry.title),
            baitiness=baitiness_features(entry.title, resources.lexicons),
        )
        rows.append(assemble_features(parts))
    matrix = FeatureMatrix(
        values=np.vstack(rows),
        labels=np.asarray([e.label for e in entries], dtype=np.int64),
        video_ids=[e.video_id for e in entries],
    )
    return matrix, graphs


def ctd_mask(matrix: FeatureMatrix) -> np.ndarray:
    return np.asarray([g == "CTD" for g in matrix.groups], dtype=bool)


def fill_graph_features(
    matrix: FeatureMatrix, graphs: list[DisparityGraph], params: GraphNetParams
) -> None:
    """Overwrite the pooled-graph columns in place."""
    mask = ctd_mask(matrix)
    if not mask.any():
        raise UnknownGroupError("matrix has no pooled-graph columns to fill")
    matrix.values[:, mask] = gcn_features(graphs, params)


def subset_groups(matrix: FeatureMatrix, groups: tuple[str, ...]) -> FeatureMatrix:
    """Restrict the matrix to the named feature groups (ablation support)."""
    unknown = set(groups) - set(GROUP_ORDER)
    if unknown:
        raise UnknownGroupError(f"unknown feature groups {sorted(unknown)}")
    wanted = set(groups)
    keep = [i for i, g in enumerate(matrix.groups) if g in wanted]
    return FeatureMatrix(
        values=matrix.values[:, keep],
        labels=matrix.labels,
        names=[matrix.names[i] for i in keep],
        groups=[matrix.groups[i] for i in keep],
        video_ids=matrix.video_ids,
    )


def apply_group_subset(
    matrix: FeatureMatrix, graphs: list[DisparityGraph] | None, config: PipelineConfig
) -> tuple[FeatureMatrix, list[DisparityGraph] | None]:
    subset = config.group_subset()
    if not subset:
        return matrix, graphs
    matrix = subset_groups(matrix, subset)
    return matrix, (graphs if "CTD" in subset else None)


def _gcn_seed(seed: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(_GCN_SEED_DOMAIN,)).generate_state(1)[0])


def train_full(
    matrix: FeatureMatrix, graphs: list[DisparityGraph] | None, config: PipelineConfig
) -> StackingModel:
    """Deployment fit: graph network on all rows, then the stacked ensemble.

    The shipped network is fit on every row, but the ensemble trains on
    cross-fitted graph features so the tabular learners see the columns at
    the quality fresh videos will get, not the memorized in-sample version.
    """
    matrix, graphs = apply_group_subset(matrix, graphs, config)
    values = matrix.values.copy()
    gcn_params = None
    if graphs is not None and ctd_mask(matrix).any():
        seed = _gcn_seed(config.seed)
        gcn_params = gcn_train(
            graphs,
            matrix.labels,
            hidden=config.gcn_hidden,
            lr=config.gcn_lr,
            epochs=config.gcn_epochs,
            seed=seed,
        )
        if config.gcn_crossfit_parts >= 2:
            values[:, ctd_mask(matrix)] = crossfit_ctd_rows(
                graphs,
                matrix.labels,
                config.gcn_hidden,
                config.gcn_lr,
                config.gcn_epochs,
                seed,
                config.gcn_crossfit_parts,
            )
        else:
            values[:, ctd_mask(matrix)] = gcn_features(graphs, gcn_params)
    return train_stacking(
        values,
        matrix.labels,
        config=config.ensemble_config(),
        seed=config.seed,
        gcn_params=gcn_params,
    )


def predict_full(
    model: StackingModel,
    matrix: FeatureMatrix,
    graphs: list[DisparityGraph] | None,
    config: PipelineConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities and labels for already-featurized rows; requires the same
    group subset the model was trained with."""
    matrix, graphs = apply_group_subset(matrix, graphs, config)
    values = matrix.values
    if model.gcn_params is not None:
        if graphs is None:
            raise ValueError("model carries graph-network parameters but no graphs were supplied")
        values = values.copy()
        values[:, ctd_mask(matrix)] = gcn_features(graphs, model.gcn_params)
    return stacking_predict(model, values)
