"""Feature row assembly, standardization, F scoring, and column selection."""

from __future__ import annotations

import numpy as np
import pytest

from baitscreen.feature_table import (
    FeatureMatrix,
    FeatureParts,
    GROUP_DIMS,
    GROUP_ORDER,
    MissingPartError,
    SingleClassError,
    Standardizer,
    TOTAL_COLUMNS,
    UnknownGroupError,
    anova_f,
    assemble_features,
    column_groups,
    column_names,
    export_csv,
    group_mask,
    select_top_k,
)
from baitscreen.text_disparity import DisparityTriplet
from baitscreen.title_analysis import BaitinessFeatures, LexicalFeatures, SentimentScores


def full_parts(rng: np.random.Generator) -> FeatureParts:
    return FeatureParts(
        title_embedding=rng.normal(size=768),
        thumbnail_embedding=rng.normal(size=2048),
        graph_vector=rng.normal(size=16),
        title_caption=DisparityTriplet(0.1, 0.2, 0.3),
        title_transcript=DisparityTriplet(0.4, 0.5, 0.6),
        sentiment=SentimentScores(0.5, 0.25, 0.25, 0.3, 1.2, 15.0),
        lexical=LexicalFeatures(True, False, 2, 0.5, 3),
        baitiness=BaitinessFeatures(1, 0, 0, 2, 1),
    )


def small_matrix(values, labels, names=None, groups=None) -> FeatureMatrix:
    values = np.asarray(values, dtype=np.float64)
    p = values.shape[1]
    return FeatureMatrix(
        values=values,
        labels=np.asarray(labels),
        names=names or [f"c{i}" for i in range(p)],
        groups=groups or ["X"] * p,
        video_ids=[f"v{i}" for i in range(values.shape[0])],
    )


# ---------------------------------------------------------------- assembly


def test_total_width_and_names():
    assert TOTAL_COLUMNS == 2852
    names = column_names()
    groups = column_groups()
    assert len(names) == len(groups) == 2852
    assert names[0] == "BERT:000"
    assert names[768] == "RESNET:0000"
    assert names[768 + 2048] == "CTD:00"
    assert names[-1] == "BAIT:generic"
    assert [GROUP_DIMS[g] for g in GROUP_ORDER] == [768, 2048, 16, 3, 3, 4, 5, 5]
    # group labels change exactly at the cumulative dimension boundaries
    boundaries = np.cumsum([GROUP_DIMS[g] for g in GROUP_ORDER])
    for b, g in zip(boundaries, GROUP_ORDER):
        assert groups[b - 1] == g


def test_assemble_row_layout():
    rng = np.random.default_rng(0)
    parts = full_parts(rng)
    row = assemble_features(parts)
    assert row.shape == (2852,)
    assert np.array_equal(row[:768], parts.title_embedding)
    assert np.array_equal(row[768 : 768 + 2048], parts.thumbnail_embedding)
    assert np.array_equal(row[2816:2832], parts.graph_vector)
    assert np.allclose(row[2832:2835], [0.1, 0.2, 0.3])
    assert np.allclose(row[2835:2838], [0.4, 0.5, 0.6])
    assert np.allclose(row[2838:2842], [0.5, 0.25, 0.25, 0.3])
    # booleans land as exact 0/1 floats
    assert row[2842] == 1.0 and row[2843] == 0.0
    assert np.allclose(row[2842:2847], [1.0, 0.0, 2.0, 0.5, 3.0])
    assert np.allclose(row[2847:2852], [1.0, 0.0, 0.0, 2.0, 1.0])


def test_assemble_missing_part_names_group():
    rng = np.random.default_rng(1)
    parts = full_parts(rng)
    parts.title_transcript = None
    with pytest.raises(MissingPartError, match="TCD"):
        assemble_features(parts)


def test_assemble_wrong_size_names_group():
    rng = np.random.default_rng(2)
    parts = full_parts(rng)
    parts.graph_vector = np.zeros(8)
    with pytest.raises(MissingPartError, match="CTD"):
        assemble_features(parts)


# ----------------------------------------------------------- standardizer


def test_standardizer_centers_and_scales():
    rng = np.random.default_rng(3)
    x = rng.normal(loc=5.0, scale=2.5, size=(40, 6))
    std = Standardizer.fit(x)
    z = std.apply(x)
    assert np.all(np.abs(z.mean(axis=0)) <= 1e-9)
    assert np.allclose(z.std(axis=0), 1.0)


def test_standardizer_constant_columns_map_to_zero():
    x = np.column_stack([np.full(10, 7.0), np.arange(10, dtype=np.float64)])
    std = Standardizer.fit(x)
    z = std.apply(x)
    assert np.array_equal(z[:, 0], np.zeros(10))
    assert std.std[0] == 1.0 and std.mean[0] == 7.0


def test_standardizer_rejects_column_mismatch():
    std = Standardizer.fit(np.ones((5, 3)))
    with pytest.raises(ValueError, match="column count"):
        std.apply(np.ones((5, 4)))


# --------------------------------------------------------------- anova F


def test_anova_reference_value():
    x = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([0, 0, 1, 1])
    # group means 1.5/3.5, grand 2.5: ssb=2*1+2*1=4, ssw=0.5+0.5=1 → F=4/0.5=8
    assert anova_f(x, y)[0] == pytest.approx(8.0, abs=1e-9)


def test_anova_degenerate_columns():
    y = np.array([0, 0, 1, 1])
    x = np.column_stack(
        [
            np.full(4, 3.0),  # flat everywhere → 0
            np.array([2.0, 2.0, 9.0, 9.0]),  # split exactly by label → inf
            np.array([1.0, 2.0, 3.0, 4.0]),
        ]
    )
    f = anova_f(x, y)
    assert f[0] == 0.0
    assert np.isposinf(f[1])
    assert np.isfinite(f[2])


def test_anova_shift_and_scale_invariance():
    # integer data, n=4: every intermediate is exactly representable, so
    # shifting or doubling leaves F bit-identical
    x = np.array([[1.0, 5.0], [2.0, 9.0], [4.0, 2.0], [7.0, 3.0]])
    y = np.array([0, 1, 0, 1])
    base = anova_f(x, y)
    assert np.array_equal(anova_f(x + 3.0, y), base)
    assert np.array_equal(anova_f(x * 2.0, y), base)
    rng = np.random.default_rng(4)
    x2 = rng.normal(size=(30, 5))
    y2 = (rng.random(30) < 0.5).astype(int)
    if np.unique(y2).size == 2:
        assert np.allclose(anova_f(x2 * 0.5 + 1.7, y2), anova_f(x2, y2), rtol=1e-9)


def oracle_f(col: np.ndarray, y: np.ndarray) -> float:
    groups = [col[y == c] for c in np.unique(y)]
    grand = col.mean()
    k = len(groups)
    n = col.size
    msb = sum(len(g) * (g.mean() - grand) ** 2 for g in groups) / (k - 1)
    msw = sum(((g - g.mean()) ** 2).sum() for g in groups) / (n - k)
    return msb / msw


def test_anova_matches_plain_formula_fuzz():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(6, 40))
        x = rng.normal(size=(n, 4))
        y = np.array([0, 1] * (n // 2) + [0] * (n % 2))
        f = anova_f(x, y)
        for j in range(4):
            assert f[j] == pytest.approx(oracle_f(x[:, j], y), rel=1e-9)


def test_anova_input_validation():
    with pytest.raises(SingleClassError):
        anova_f(np.ones((4, 2)), np.zeros(4))
    with pytest.raises(ValueError, match="3 rows"):
        anova_f(np.ones((2, 2)), np.array([0, 1]))


# -------------------------------------------------------------- selection


def test_select_top_k_reference():
    state = select_top_k(np.array([3.0, 1.0, 2.0]), k=2)
    assert state.selected.tolist() == [0, 2]
    assert select_top_k(np.array([3.0, 1.0, 2.0]), k=3).selected.tolist() == [0, 1, 2]


def test_select_top_k_ties_prefer_lower_index():
    state = select_top_k(np.array([5.0, 5.0, 5.0, 1.0]), k=2)
    assert state.selected.tolist() == [0, 1]


def test_select_top_k_handles_inf():
    state = select_top_k(np.array([1.0, np.inf, 0.5]), k=1)
    assert state.selected.tolist() == [1]


def test_select_top_k_nesting_property():
    rng = np.random.default_rng(6)
    scores = rng.normal(size=30)
    previous: set[int] = set()
    for k in range(1, 31):
        chosen = set(select_top_k(scores, k).selected.tolist())
        assert previous <= chosen
        assert len(chosen) == k
        previous = chosen


def test_select_top_k_range_errors():
    with pytest.raises(ValueError):
        select_top_k(np.array([1.0, 2.0]), k=0)
    with pytest.raises(ValueError):
        select_top_k(np.array([1.0, 2.0]), k=3)


def test_selection_apply_subsets_columns():
    x = np.arange(12, dtype=np.float64).reshape(3, 4)
    state = select_top_k(np.array([0.0, 9.0, 1.0, 8.0]), k=2)
    assert state.selected.tolist() == [1, 3]
    assert np.array_equal(state.apply(x), x[:, [1, 3]])


# ------------------------------------------------------------ group masks


def test_group_mask_widths():
    matrix = FeatureMatrix(values=np.zeros((2, TOTAL_COLUMNS)), labels=np.zeros(2))
    assert group_mask(matrix, {"LEX"}).size == 5
    assert group_mask(matrix, {"BERT", "RESNET"}).size == 2816
    assert group_mask(matrix, {"TTD", "TCD", "CTD"}).size == 22
    full = group_mask(matrix, set(GROUP_ORDER))
    assert np.array_equal(full, np.arange(TOTAL_COLUMNS))


def test_group_mask_rejects_unknown_or_empty():
    matrix = FeatureMatrix(values=np.zeros((2, TOTAL_COLUMNS)), labels=np.zeros(2))
    with pytest.raises(UnknownGroupError):
        group_mask(matrix, set())
    with pytest.raises(UnknownGroupError, match="GLOVE"):
        group_mask(matrix, {"BERT", "GLOVE"})


# ------------------------------------------------------------- csv export


def test_export_csv_round_trips_floats(tmp_path):
    rng = np.random.default_rng(7)
    matrix = small_matrix(rng.normal(size=(3, 2)), [0, 1, 0])
    path = tmp_path / "features.csv"
    export_csv(matrix, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "video_id,c0,c1,label"
    assert len(lines) == 4
    for i, line in enumerate(lines[1:]):
        cells = line.split(",")
        assert cells[0] == f"v{i}"
        assert cells[-1] == str(int(matrix.labels[i]))
        values = [float(c) for c in cells[1:-1]]
        assert values == matrix.values[i].tolist()  # repr() survives exactly
