"""Named-column feature matrix assembly, standardization, one-way F scoring,
and top-k column selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import IMAGE_DIM, TITLE_DIM
from .graph_net import PENULTIMATE_UNITS
from .text_disparity import DisparityTriplet
from .title_analysis import BaitinessFeatures, LexicalFeatures, SentimentScores

TRIPLET_NAMES = ("cos_plain", "cos_preprocessed", "cos_embedding")
SENT_NAMES = ("positive", "negative", "neutral", "compound")
LEX_NAMES = ("has_number", "is_question", "emoji_count", "capital_ratio", "punct_count")
BAIT_NAMES = ("celebrity", "slang", "porn", "bollywood", "generic")

# Concatenation order of the feature groups and their widths.
GROUP_ORDER = ("BERT", "RESNET", "CTD", "TTD", "TCD", "SENT", "LEX", "BAIT")
GROUP_DIMS = {
    "BERT": TITLE_DIM,
    "RESNET": IMAGE_DIM,
    "CTD": PENULTIMATE_UNITS,
    "TTD": 3,
    "TCD": 3,
    "SENT": 4,
    "LEX": 5,
    "BAIT": 5,
}
TOTAL_COLUMNS = sum(GROUP_DIMS.values())


class MissingPartError(ValueError):
    pass


class UnknownGroupError(ValueError):
    pass


class SingleClassError(ValueError):
    pass


def column_names() -> list[str]:
    names: list[str] = []
    names += [f"BERT:{i:03d}" for i in range(GROUP_DIMS["BERT"])]
    names += [f"RESNET:{i:04d}" for i in range(GROUP_DIMS["RESNET"])]
    names += [f"CTD:{i:02d}" for i in range(GROUP_DIMS["CTD"])]
    names += [f"TTD:{n}" for n in TRIPLET_NAMES]
    names += [f"TCD:{n}" for n in TRIPLET_NAMES]
    names += [f"SENT:{n}" for n in SENT_NAMES]
    names += [f"LEX:{n}" for n in LEX_NAMES]
    names += [f"BAIT:{n}" for n in BAIT_NAMES]
    return names


def column_groups() -> list[str]:
    groups: list[str] = []
    for g in GROUP_ORDER:
        groups += [g] * GROUP_DIMS[g]
    return groups


@dataclass
class FeatureParts:
    """Everything one video contributes to its feature row."""

    title_embedding: np.ndarray | None = None  # BERT
    thumbnail_embedding: np.ndarray | None = None  # RESNET
    graph_vector: np.ndarray | None = None  # CTD
    title_caption: DisparityTriplet | None = None  # TTD
    title_transcript: DisparityTriplet | None = None  # TCD
    sentiment: SentimentScores | None = None
    lexical: LexicalFeatures | None = None
    baitiness: BaitinessFeatures | None = None


def assemble_features(parts: FeatureParts) -> np.ndarray:
    """One row in fixed group order; booleans become 0/1."""
    pieces = {
        "BERT": parts.title_embedding,
        "RESNET": parts.thumbnail_embedding,
        "CTD": parts.graph_vector,
        "TTD": None if parts.title_caption is None else parts.title_caption.as_row(),
        "TCD": None if parts.title_transcript is None else parts.title_transcript.as_row(),
        "SENT": None if parts.sentiment is None else parts.sentiment.as_row(),
        "LEX": None if parts.lexical is None else parts.lexical.as_row(),
        "BAIT": None if parts.baitiness is None else parts.baitiness.as_row(),
    }
    row = np.empty(TOTAL_COLUMNS, dtype=np.float64)
    offset = 0
    for g in GROUP_ORDER:
        piece = pieces[g]
        if piece is None:
            raise MissingPartError(f"feature part {g} is missing")
        vec = np.asarray(piece, dtype=np.float64).ravel()
        if vec.size != GROUP_DIMS[g]:
            raise MissingPartError(f"feature part {g} has size {vec.size}, expected {GROUP_DIMS[g]}")
        row[offset : offset + vec.size] = vec
        offset += vec.size
    return row


@dataclass
class FeatureMatrix:
    values: np.ndarray  # (n, p)
    labels: np.ndarray  # (n,)
    names: list[str] = field(default_factory=column_names)
    groups: list[str] = field(default_factory=column_groups)
    video_ids: list[str] = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.values.shape[1])


@dataclass
class Standardizer:
    mean: np.ndarray
    std: np.ndarray  # constant columns store 1 so they map to 0

    @classmethod
    def fit(cls, x: np.ndarray) -> "Standardizer":
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        constant = x.max(axis=0) == x.min(axis=0)
        std = np.where((std == 0.0) | constant, 1.0, std)
        mean = np.where(constant, x[0], mean)
        return cls(mean=mean, std=std)

    def apply(self, x: np.ndarray) -> np.ndarray:
        if x.shape[1] != self.mean.size:
            raise ValueError(f"column count {x.shape[1]} != fitted {self.mean.size}")
        return (x - self.mean) / self.std


def anova_f(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-column one-way F over the two label groups. Zero-variance cases:
    flat everywhere → 0; flat within each group but split across them → +inf
    (sorts above every finite score)."""
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size < 2:
        raise SingleClassError("need both classes for F scoring")
    n = x.shape[0]
    if n < 3:
        raise ValueError("need at least 3 rows")
    grand = x.mean(axis=0)
    ssb = np.zeros(x.shape[1])
    ssw = np.zeros(x.shape[1])
    for c in classes:
        xg = x[y == c]
        mg = xg.mean(axis=0)
        ssb += xg.shape[0] * (mg - grand) ** 2
        within = ((xg - mg) ** 2).sum(axis=0)
        # Exact flat-group detection; the squared deviations of a constant
        # group can round to tiny nonzero values otherwise.
        within[xg.max(axis=0) == xg.min(axis=0)] = 0.0
        ssw += within
    k = classes.size
    msb = ssb / (k - 1)
    msw = ssw / (n - k)
    flat_all = x.max(axis=0) == x.min(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = msb / msw
    f = np.where(ssw == 0.0, np.inf, f)
    f = np.where(flat_all, 0.0, f)
    return f


@dataclass
class SelectionState:
    scores: np.ndarray
    selected: np.ndarray  # sorted column indices, size k

    def apply(self, x: np.ndarray) -> np.ndarray:
        return x[:, self.selected]


def select_top_k(scores: np.ndarray, k: int) -> SelectionState:
    """k highest-scoring columns; equal scores prefer the lower index."""
    scores = np.asarray(scores, dtype=np.float64)
    if not 1 <= k <= scores.size:
        raise ValueError(f"k={k} out of range 1..{scores.size}")
    order = np.argsort(-scores, kind="stable")
    return SelectionState(scores=scores, selected=np.sort(order[:k]))


def group_mask(matrix: FeatureMatrix, groups: set[str]) -> np.ndarray:
    """Sorted indices of every column tagged with one of the groups."""
    if not groups:
        raise UnknownGroupError("no groups given")
    unknown = groups - set(GROUP_ORDER)
    if unknown:
        raise UnknownGroupError(f"unknown feature groups: {sorted(unknown)}")
    return np.asarray(
        [i for i, g in enumerate(matrix.groups) if g in groups], dtype=np.int64
    )


def export_csv(matrix: FeatureMatrix, path) -> None:
    ids = matrix.video_ids or [f"row{i}" for i in range(matrix.n_rows)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("video_id," + ",".join(matrix.names) + ",label\n")
        for vid, row, label in zip(ids, matrix.values, matrix.labels):
            cells = ",".join(repr(float(v)) for v in row)
            fh.write(f"{vid},{cells},{int(label)}\n")
