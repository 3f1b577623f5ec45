"""Stratified index splitting shared by the stacking trainer and the
evaluation harness."""

from __future__ import annotations

import numpy as np


class ClassTooSmallError(ValueError):
    pass


def stratified_kfold(
    y: np.ndarray | list[int], k: int, seed: int | np.random.SeedSequence = 0
) -> list[np.ndarray]:
    """k disjoint index folds; each class is dealt round-robin after a seeded
    shuffle, so per-fold class counts stay within 1 of n_c/k."""
    y = np.asarray(y)
    if k < 2:
        raise ValueError("k must be at least 2")
    classes, counts = np.unique(y, return_counts=True)
    if counts.min() < k:
        smallest = classes[int(np.argmin(counts))]
        raise ClassTooSmallError(
            f"class {smallest} has {counts.min()} rows, fewer than k={k}"
        )
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = np.random.default_rng(ss)
    folds: list[list[int]] = [[] for _ in range(k)]
    pos = 0
    # A shared dealing position spreads the per-class remainders over
    # different folds instead of always growing fold 0.
    for c in classes:
        idx = np.flatnonzero(y == c)
        rng.shuffle(idx)
        for i in idx:
            folds[pos % k].append(int(i))
            pos += 1
    return [np.asarray(sorted(f), dtype=np.int64) for f in folds]


def stratified_holdout(
    y: np.ndarray | list[int], test_fraction: float, seed: int | np.random.SeedSequence = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Single stratified (train, test) index split."""
    y = np.asarray(y)
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie in (0, 1)")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = np.random.default_rng(ss)
    test: list[int] = []
    train: list[int] = []
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        rng.shuffle(idx)
        n_test = int(round(test_fraction * idx.size))
        n_test = min(max(n_test, 1), idx.size - 1)
        test.extend(int(i) for i in idx[:n_test])
        train.extend(int(i) for i in idx[n_test:])
    return np.asarray(sorted(train), dtype=np.int64), np.asarray(sorted(test), dtype=np.int64)
