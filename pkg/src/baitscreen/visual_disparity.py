"""Thumbnail↔keyframe agreement weights (faces, objects, color statistics)
and the per-video star graph built from them."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import ColorHistogram, FaceSet, ModalityBundle, ObjectSet

DEFAULT_FACE_THRESHOLD = 0.6


@dataclass
class EdgeWeights:
    w1: float | None  # face overlap; None when neither image has faces
    w2: float | None  # object overlap; None when neither image has objects
    w3: float  # color-statistics similarity
    w_bar: float  # mean of the defined weights
    cf: int
    co: int
    d: float


@dataclass
class DisparityGraph:
    """Star over one video: thumbnail at the root, one child per keyframe."""

    root: np.ndarray
    children: np.ndarray  # (K, dim)
    weights: np.ndarray  # (K,)
    details: list[EdgeWeights] = field(default_factory=list)

    @property
    def child_count(self) -> int:
        return int(self.children.shape[0])


def greedy_face_matching(
    faces_a: np.ndarray, faces_b: np.ndarray, threshold: float
) -> list[tuple[int, int]]:
    """One-to-one pairs chosen by ascending Euclidean distance, closest first,
    keeping only pairs within the threshold. Ties break on (a-index, b-index)."""
    if faces_a.shape[0] == 0 or faces_b.shape[0] == 0:
        return []
    if faces_a.shape[1] != faces_b.shape[1]:
        raise ValueError(
            f"face embedding dimension mismatch: {faces_a.shape[1]} vs {faces_b.shape[1]}"
        )
    diff = faces_a[:, None, :] - faces_b[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    candidates = [
        (dist[i, j], i, j)
        for i in range(faces_a.shape[0])
        for j in range(faces_b.shape[0])
        if dist[i, j] <= threshold
    ]
    candidates.sort()
    used_a: set[int] = set()
    used_b: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for _, i, j in candidates:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        pairs.append((i, j))
    return pairs


def face_overlap_weight(
    faces_th: FaceSet, faces_kf: FaceSet, threshold: float = DEFAULT_FACE_THRESHOLD
) -> tuple[float, int] | None:
    """2·CF/(F_TH+F_KF) with CF the greedy matching size; None when neither
    image contains a face."""
    total = faces_th.count + faces_kf.count
    if total == 0:
        return None
    cf = len(greedy_face_matching(faces_th.embeddings, faces_kf.embeddings, threshold))
    return 2.0 * cf / total, cf


def multiset_common(labels_a: list[str], labels_b: list[str]) -> int:
    common = Counter(labels_a) & Counter(labels_b)
    return sum(common.values())


def object_overlap_weight(objs_th: ObjectSet, objs_kf: ObjectSet) -> tuple[float, int] | None:
    """2·CO/(O_TH+O_KF) with CO the multiset-intersection size; None when
    neither image contains an object."""
    total = objs_th.count + objs_kf.count
    if total == 0:
        return None
    co = multiset_common(objs_th.labels, objs_kf.labels)
    return 2.0 * co / total, co


def histogram_stats(hist: ColorHistogram) -> np.ndarray:
    """(sum, mean, population std) of the bin counts."""
    bins = hist.bins
    return np.asarray([float(np.sum(bins)), float(np.mean(bins)), float(np.std(bins))])


def histogram_similarity(h_th: ColorHistogram, h_kf: ColorHistogram) -> tuple[float, float]:
    """w3 = 1/(1 + d/N̄): d is the Manhattan distance between the two stats
    vectors, N̄ the mean pixel count. Scale-invariant, 1 at identity."""
    if h_th.bins.shape != h_kf.bins.shape:
        raise ValueError(f"bin count mismatch: {h_th.bins.shape} vs {h_kf.bins.shape}")
    d = float(np.sum(np.abs(histogram_stats(h_th) - histogram_stats(h_kf))))
    n_bar = (h_th.total_pixels + h_kf.total_pixels) / 2.0
    return 1.0 / (1.0 + d / n_bar), d


def edge_weight(w1: float | None, w2: float | None, w3: float) -> float:
    """Arithmetic mean of whichever weights are defined (w3 always is)."""
    defined = [w for w in (w1, w2, w3) if w is not None]
    return sum(defined) / len(defined)


def compute_edge(
    bundle: ModalityBundle, kf_index: int, threshold: float = DEFAULT_FACE_THRESHOLD
) -> EdgeWeights:
    face = face_overlap_weight(
        bundle.thumbnail_faces, bundle.keyframe_faces[kf_index], threshold
    )
    obj = object_overlap_weight(bundle.thumbnail_objects, bundle.keyframe_objects[kf_index])
    w1, cf = face if face is not None else (None, 0)
    w2, co = obj if obj is not None else (None, 0)
    w3, d = histogram_similarity(bundle.thumbnail_histogram, bundle.keyframe_histograms[kf_index])
    return EdgeWeights(w1=w1, w2=w2, w3=w3, w_bar=edge_weight(w1, w2, w3), cf=cf, co=co, d=d)


def build_star_graph(
    bundle: ModalityBundle, threshold: float = DEFAULT_FACE_THRESHOLD
) -> DisparityGraph:
    details = [compute_edge(bundle, i, threshold) for i in range(bundle.keyframe_count)]
    return DisparityGraph(
        root=bundle.thumbnail_embedding,
        children=bundle.keyframe_embeddings,
        weights=np.asarray([e.w_bar for e in details], dtype=np.float64),
        details=details,
    )
