"""Deterministic synthetic corpus generator.

Every feature group gets its own planted class signal with a strength knob in
[0, 1]; at strength 0 the two classes draw from identical distributions, so a
zero-signal corpus is a leakage null."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import (
    HISTOGRAM_BINS,
    IMAGE_DIM,
    TITLE_DIM,
    CATEGORY_NAMES,
    ColorHistogram,
    FaceSet,
    ManifestEntry,
    ModalityBundle,
    ObjectSet,
    save_bundle,
    write_manifest,
)

FACE_DIM = 128
TOTAL_PIXELS = 129600

# Shared word pools. Titles and companion texts draw from the same pools for
# both classes; only copy/overlap probabilities carry class signal.
TITLE_POOL = (
    "movie trailer scene actor drama film story behind making crew song dance "
    "festival award cinema screen studio release premiere shoot"
).split()
FILLER_POOL = (
    "review analysis tutorial interview episode documentary highlights lecture "
    "session update report discussion recap guide overview notes journal "
    "meeting briefing summary travel cooking garden history science music"
).split()
CAPS_WORDS = ("SHOCKING", "INSANE", "EPIC", "VIRAL", "EXPOSED")
LURES = (
    "you won't believe",
    "gone wrong",
    "watch till the end",
    "what happened next",
    "caught on camera",
    "top 5",
)
CELEBRITIES = ("shah rukh khan", "deepika padukone", "salman khan", "ranveer singh")
SLANG = ("omg", "wtf", "lol", "wow")
OBJECT_CLASSES = (
    "person car tree dog microphone table phone guitar bottle screen "
    "chair flower book lamp window"
).split()

_CORPUS_DOMAIN = 999
_VIDEO_DOMAIN = 1000


@dataclass
class SynthSpec:
    n_videos: int = 400
    clickbait_fraction: float = 0.5
    kf_min: int = 3
    kf_max: int = 6
    signal_title: float = 0.45  # bait phrasing, caps, marks (LEX/BAIT/SENT)
    signal_bert: float = 0.95  # title-embedding mean shift
    signal_resnet: float = 1.0  # thumbnail-embedding mean shift
    signal_graph: float = 0.45  # thumbnail↔keyframe mismatch rate
    signal_text: float = 0.5  # title↔caption/transcript overlap
    noise: float = 1.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_videos < 20:
            raise ValueError("n_videos must be at least 20")
        if not 0.0 < self.clickbait_fraction < 1.0:
            raise ValueError("clickbait_fraction must lie in (0, 1)")
        if not 1 <= self.kf_min <= self.kf_max:
            raise ValueError("keyframe range must satisfy 1 <= kf_min <= kf_max")
        for name in ("signal_title", "signal_bert", "signal_resnet", "signal_graph", "signal_text"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def _class_gate(rng: np.random.Generator, label: int, strength: float) -> bool:
    """True with probability 0.5 ± 0.5·strength, the sign set by the label.
    At strength 0 the outcome ignores the label entirely."""
    return rng.random() < 0.5 + (2 * label - 1) * 0.5 * strength


def _identity_bank(rng: np.random.Generator, count: int) -> np.ndarray:
    vecs = rng.normal(size=(count, FACE_DIM))
    return vecs / np.linalg.norm(vecs, axis=1, keepdims=True)


def _jitter(rng: np.random.Generator, identities: np.ndarray) -> np.ndarray:
    return identities + rng.normal(scale=0.01, size=identities.shape)


def _make_title(rng: np.random.Generator, label: int, s: float) -> str:
    words = list(rng.choice(TITLE_POOL, size=int(rng.integers(3, 7)), replace=True))
    if _class_gate(rng, label, s):
        words.insert(int(rng.integers(0, len(words) + 1)), str(rng.choice(LURES)))
    if _class_gate(rng, label, s):
        words.insert(0, str(rng.choice(SLANG)))
    if _class_gate(rng, label, s):
        words.append(str(rng.choice(CELEBRITIES)))
    if _class_gate(rng, label, s):
        i = int(rng.integers(0, len(words)))
        words[i] = str(rng.choice(CAPS_WORDS))
    title = " ".join(words)
    if _class_gate(rng, label, s):
        title += "!!"
    elif rng.random() < 0.3:
        title += "."
    return title


def _companion_text(
    rng: np.random.Generator, title: str, label: int, s: float, length: int
) -> str:
    title_tokens = [t.strip("!?.").lower() for t in title.split()]
    title_tokens = [t for t in title_tokens if t]
    out = []
    for _ in range(length):
        if _class_gate(rng, 1 - label, s) and title_tokens:
            out.append(str(rng.choice(title_tokens)))
        else:
            out.append(str(rng.choice(FILLER_POOL)))
    return " ".join(out)


def _categories(rng: np.random.Generator, label: int) -> dict[str, bool]:
    if label != 1:
        return {}
    # Mild co-occurrence structure between the first two categories.
    base = rng.random(len(CATEGORY_NAMES))
    flags = base < 0.35
    if flags[0] and rng.random() < 0.6:
        flags[3] = True
    if not flags.any():
        flags[int(rng.integers(0, len(CATEGORY_NAMES)))] = True
    return {name: bool(flag) for name, flag in zip(CATEGORY_NAMES, flags)}


def _planted_direction(rng: np.random.Generator, dim: int, width: int) -> np.ndarray:
    # Linearly decaying magnitudes: the head columns are strong enough for a
    # univariate screen to rank, while the tail keeps enough mass that wider
    # selections keep adding usable signal instead of pure noise.
    direction = np.zeros(dim)
    cols = rng.choice(dim, size=width, replace=False)
    magnitudes = np.linspace(1.0, 0.2, width)
    direction[cols] = rng.choice((-1.0, 1.0), size=width) * magnitudes
    return direction / np.linalg.norm(direction)


def synth_video(
    spec: SynthSpec,
    index: int,
    label: int,
    bert_dir: np.ndarray,
    resnet_dir: np.ndarray,
) -> tuple[str, dict[str, bool], ModalityBundle]:
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(_VIDEO_DOMAIN, index)))
    shift = float(2 * label - 1)

    title = _make_title(rng, label, spec.signal_title)
    categories = _categories(rng, label)

    # Unit-norm planted directions: the class-mean gap along the direction is
    # 3·signal·noise-σ, spread thinly over many columns so no single column
    # is decisive and selection size matters.
    title_emb = rng.normal(scale=spec.noise, size=TITLE_DIM)
    title_emb += shift * spec.signal_bert * 1.5 * bert_dir

    thumb_emb = rng.normal(scale=spec.noise, size=IMAGE_DIM)
    thumb_emb += shift * spec.signal_resnet * 1.5 * resnet_dir

    k = int(rng.integers(spec.kf_min, spec.kf_max + 1))
    identities = _identity_bank(rng, 4)
    f_th = int(rng.integers(0, 3))
    thumb_faces = FaceSet(
        embeddings=_jitter(rng, identities[:f_th]).astype(np.float64), count=f_th
    )
    thumb_labels = sorted(
        str(o) for o in rng.choice(OBJECT_CLASSES[:8], size=int(rng.integers(1, 5)), replace=True)
    )
    thumb_objects = ObjectSet(labels=thumb_labels, count=len(thumb_labels))
    thumb_p = rng.dirichlet(np.full(HISTOGRAM_BINS, 2.0))
    thumb_hist = ColorHistogram(
        bins=rng.multinomial(TOTAL_PIXELS, thumb_p).astype(np.float64),
        total_pixels=TOTAL_PIXELS,
    )

    kf_embs = []
    kf_faces = []
    kf_objects = []
    kf_hists = []
    for _ in range(k):
        matched = _class_gate(rng, 1 - label, spec.signal_graph)
        f_kf = int(rng.integers(0, 4))
        if matched:
            emb = thumb_emb + rng.normal(scale=0.3 * spec.noise, size=IMAGE_DIM)
            faces = _jitter(rng, identities[:f_kf])
            objects = list(thumb_objects.labels)
            if rng.random() < 0.3:
                objects.append(str(rng.choice(OBJECT_CLASSES[:8])))
            bins = rng.multinomial(TOTAL_PIXELS, thumb_p)
        else:
            emb = rng.normal(scale=spec.noise, size=IMAGE_DIM)
            faces = _identity_bank(rng, f_kf)
            objects = sorted(
                rng.choice(OBJECT_CLASSES[8:], size=int(rng.integers(1, 5)), replace=True)
            )
            bins = rng.multinomial(TOTAL_PIXELS, rng.dirichlet(np.full(HISTOGRAM_BINS, 0.3)))
        kf_embs.append(emb)
        kf_faces.append(FaceSet(embeddings=np.asarray(faces, dtype=np.float64), count=f_kf))
        objects = [str(o) for o in objects]
        kf_objects.append(ObjectSet(labels=objects, count=len(objects)))
        kf_hists.append(ColorHistogram(bins=bins.astype(np.float64), total_pixels=TOTAL_PIXELS))

    # Both companion texts use a damped gate: at full strength the copied-token
    # fraction alone would separate the classes almost deterministically. The
    # transcript is ~3x longer, which concentrates that fraction, so it gets a
    # proportionally weaker gate to keep the two disparities comparable.
    caption = _companion_text(rng, title, label, 0.45 * spec.signal_text, int(rng.integers(6, 10)))
    transcript = _companion_text(
        rng, title, label, 0.25 * spec.signal_text, int(rng.integers(20, 36))
    )

    bundle = ModalityBundle(
        title=title,
        title_embedding=title_emb,
        thumbnail_embedding=thumb_emb,
        keyframe_embeddings=np.asarray(kf_embs),
        thumbnail_faces=thumb_faces,
        keyframe_faces=kf_faces,
        thumbnail_objects=thumb_objects,
        keyframe_objects=kf_objects,
        thumbnail_histogram=thumb_hist,
        keyframe_histograms=kf_hists,
        caption=caption,
        transcript=transcript,
    )
    return title, categories, bundle


def synth_corpus(spec: SynthSpec, out_dir: str | Path) -> list[ManifestEntry]:
    """Write manifest.jsonl plus one bundle directory per video; returns the
    manifest entries. Bit-identical across runs with the same spec."""
    spec.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus_rng = np.random.default_rng(
        np.random.SeedSequence(spec.seed, spawn_key=(_CORPUS_DOMAIN,))
    )
    bert_dir = _planted_direction(corpus_rng, TITLE_DIM, 64)
    resnet_dir = _planted_direction(corpus_rng, IMAGE_DIM, 96)

    n_click = int(round(spec.n_videos * spec.clickbait_fraction))
    labels = np.array([1] * n_click + [0] * (spec.n_videos - n_click))
    corpus_rng.shuffle(labels)

    entries = []
    for i, label in enumerate(labels):
        video_id = f"v{i:04d}"
        bundle_dir = out_dir / "bundles" / video_id
        title, categories, bundle = synth_video(spec, i, int(label), bert_dir, resnet_dir)
        save_bundle(bundle_dir, bundle)
        entries.append(
            ManifestEntry(
                video_id=video_id,
                title=title,
                label=int(label),
                categories=categories,
                bundle_dir=bundle_dir,
            )
        )
    write_manifest(out_dir / "manifest.jsonl", entries)
    return entries
