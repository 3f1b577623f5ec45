"""Shared fixtures: packaged lexicons, hand-built bundles, small synthetic corpora."""

from __future__ import annotations

import numpy as np
import pytest

from baitscreen.config import PipelineConfig
from baitscreen.corpus import ColorHistogram, FaceSet, ModalityBundle, ObjectSet
from baitscreen.ensemble import EnsembleConfig
from baitscreen.lexicons import default_lexicons
from baitscreen.pipeline import load_corpus, load_resources
from baitscreen.synth import SynthSpec, synth_corpus


def make_histogram(rng: np.random.Generator) -> ColorHistogram:
    bins = rng.integers(0, 50, size=512).astype(np.float64)
    bins[0] += 1.0  # total must stay positive
    return ColorHistogram(bins=bins, total_pixels=int(bins.sum()))


def make_faces(rng: np.random.Generator, n: int, dim: int = 128) -> FaceSet:
    return FaceSet(embeddings=rng.normal(size=(n, dim)).astype(np.float32), count=n)


def make_bundle(seed: int = 0, keyframes: int = 2, faces: int = 2) -> ModalityBundle:
    """A structurally valid bundle with random but finite content."""
    rng = np.random.default_rng(seed)
    return ModalityBundle(
        title="Sample Title",
        title_embedding=rng.normal(size=768).astype(np.float32),
        thumbnail_embedding=rng.normal(size=2048).astype(np.float32),
        keyframe_embeddings=rng.normal(size=(keyframes, 2048)).astype(np.float32),
        thumbnail_faces=make_faces(rng, faces),
        keyframe_faces=[make_faces(rng, faces) for _ in range(keyframes)],
        thumbnail_objects=ObjectSet(labels=["person", "car"], count=2),
        keyframe_objects=[ObjectSet(labels=["person"], count=1) for _ in range(keyframes)],
        thumbnail_histogram=make_histogram(rng),
        keyframe_histograms=[make_histogram(rng) for _ in range(keyframes)],
        caption="a person standing near a car",
        transcript="welcome back today we take a close look at the car",
    )


def fast_ensemble(**overrides) -> EnsembleConfig:
    """Small learner budgets so stacking tests stay quick."""
    params = dict(
        internal_folds=3,
        select_k=8,
        logreg_epochs=80,
        gbt_rounds=15,
        mlp_epochs=15,
        svm_epochs=10,
        meta_trees=30,
    )
    params.update(overrides)
    return EnsembleConfig(**params)


@pytest.fixture(scope="session")
def lexicons():
    return default_lexicons()


@pytest.fixture(scope="session")
def resources():
    return load_resources(PipelineConfig())


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    """24 synthetic videos with strong planted signal; treat as read-only."""
    root = tmp_path_factory.mktemp("tiny-corpus")
    synth_corpus(SynthSpec(n_videos=24, seed=3), root)
    entries, bundles = load_corpus(root / "manifest.jsonl")
    return root, entries, bundles
