"""From-scratch tree learners: Gini CART, a bootstrap-vote random forest, and
second-order gradient-boosted regression trees on the logistic loss.

Split predicates are `x <= threshold` with the threshold stored as the left
partition's maximum value, so train-time partitions and later predictions
agree exactly.
"""

from __future__ import annotations

import numpy as np

from .learners import SingleClassError, _check_query, _check_training_input, sigmoid


class CartTree:
    """Binary Gini decision tree grown depth-first with exact greedy splits.

    Nodes live in parallel arrays; feature == -1 marks a leaf. Each node keeps
    its positive-class fraction; the hard label is fraction >= 0.5 so a tied
    leaf resolves the same way as the package-wide inclusive 0.5 threshold.
    """

    def __init__(
        self,
        max_depth: int | None = None,
        min_samples_split: int = 2,
        max_features: int | None = None,
    ):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.fraction: list[float] = []

    def _new_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.fraction.append(0.0)
        return len(self.feature) - 1

    @staticmethod
    def _best_split(
        x: np.ndarray, y: np.ndarray, rows: np.ndarray, features: np.ndarray
    ) -> tuple[float, int, float, np.ndarray, np.ndarray] | None:
        m = rows.size
        c1_total = int(y[rows].sum())
        c0_total = m - c1_total
        parent = 1.0 - (c0_total / m) ** 2 - (c1_total / m) ** 2
        best = None
        best_gain = 1e-12
        for f in features:
            vals = x[rows, f]
            order = np.argsort(vals, kind="stable")
            v = vals[order]
            cut = v[:-1] < v[1:]
            if not cut.any():
                continue
            c1 = np.cumsum(y[rows][order])[:-1]
            n_l = np.arange(1, m)
            n_r = m - n_l
            c0 = n_l - c1
            c1_r = c1_total - c1
            c0_r = n_r - c1_r
            weighted = (
                n_l - (c0 * c0 + c1 * c1) / n_l + n_r - (c0_r * c0_r + c1_r * c1_r) / n_r
            ) / m
            gain = np.where(cut, parent - weighted, -np.inf)
            i = int(np.argmax(gain))
            if gain[i] > best_gain:
                best_gain = float(gain[i])
                ordered_rows = rows[order]
                best = (best_gain, int(f), float(v[i]), ordered_rows[: i + 1], ordered_rows[i + 1 :])
        return best

    def fit(
        self, x: np.ndarray, y: np.ndarray, rng: np.random.Generator | None = None
    ) -> "CartTree":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        p = x.shape[1]
        root = self._new_node()
        stack = [(root, np.arange(x.shape[0], dtype=np.int64), 0)]
        while stack:
            node, rows, depth = stack.pop()
            c1 = int(y[rows].sum())
            self.fraction[node] = c1 / rows.size
            if (
                rows.size < self.min_samples_split
                or c1 == 0
                or c1 == rows.size
                or (self.max_depth is not None and depth >= self.max_depth)
            ):
                continue
            if self.max_features is not None and self.max_features < p:
                assert rng is not None, "feature subsampling needs an rng"
                features = np.sort(rng.choice(p, size=self.max_features, replace=False))
            else:
                features = np.arange(p)
            split = self._best_split(x, y, rows, features)
            if split is None:
                continue
            _, f, thr, rows_l, rows_r = split
            self.feature[node] = f
            self.threshold[node] = thr
            left = self._new_node()
            right = self._new_node()
            self.left[node] = left
            self.right[node] = right
            stack.append((right, rows_r, depth + 1))
            stack.append((left, rows_l, depth + 1))
        return self

    def _leaf_nodes(self, x: np.ndarray) -> np.ndarray:
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        node = np.zeros(x.shape[0], dtype=np.int64)
        active = feature[node] >= 0
        while active.any():
            f = feature[node[active]]
            go_left = x[active, f] <= threshold[node[active]]
            node[active] = np.where(go_left, left[node[active]], right[node[active]])
            active = feature[node] >= 0
        return node

    def predict_fraction(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.fraction)[self._leaf_nodes(x)]

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_fraction(x) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "fraction": self.fraction,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CartTree":
        tree = cls()
        tree.feature = [int(v) for v in d["feature"]]
        tree.threshold = [float(v) for v in d["threshold"]]
        tree.left = [int(v) for v in d["left"]]
        tree.right = [int(v) for v in d["right"]]
        tree.fraction = [float(v) for v in d["fraction"]]
        return tree


class RandomForest:
    """Bagged CART ensemble; probability = fraction of trees voting positive.

    Tree t draws its bootstrap sample and split-time feature subsets from an
    rng seeded by (seed, t), so training order can't change the result.
    """

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: int | None = None,
        max_features: int | str | None = "sqrt",
        seed: int = 0,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.max_features = max_features
        self.seed = seed
        self.n_features = 0
        self.trees: list[CartTree] = []

    def _mtry(self, p: int) -> int | None:
        if self.max_features == "sqrt":
            return max(1, int(np.sqrt(p)))
        return self.max_features

    def tree_rng(self, t: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(t,)))

    def fit(self, x: np.ndarray, y: np.ndarray) -> "RandomForest":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        _check_training_input(x, y)
        n = x.shape[0]
        self.n_features = x.shape[1]
        mtry = self._mtry(x.shape[1])
        self.trees = []
        for t in range(self.n_trees):
            rng = self.tree_rng(t)
            sample = rng.integers(0, n, size=n)
            tree = CartTree(max_depth=self.max_depth, max_features=mtry)
            tree.fit(x[sample], y[sample], rng=rng)
            self.trees.append(tree)
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        assert self.trees, "not fitted"
        x = _check_query(x, self.n_features)
        votes = np.zeros(x.shape[0])
        for tree in self.trees:
            votes += tree.predict(x)
        return votes / len(self.trees)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_proba(x) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "kind": "rf",
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "max_features": self.max_features,
            "seed": self.seed,
            "n_features": self.n_features,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForest":
        model = cls(
            n_trees=int(d["n_trees"]),
            max_depth=d["max_depth"],
            max_features=d["max_features"],
            seed=int(d["seed"]),
        )
        model.n_features = int(d["n_features"])
        model.trees = [CartTree.from_dict(t) for t in d["trees"]]
        return model


class _BoostTree:
    """Depth-limited regression tree maximizing the second-order gain
    0.5·[G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)]."""

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def _new_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def predict_value(self, x: np.ndarray) -> np.ndarray:
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        value = np.asarray(self.value)
        node = np.zeros(x.shape[0], dtype=np.int64)
        active = feature[node] >= 0
        while active.any():
            f = feature[node[active]]
            go_left = x[active, f] <= threshold[node[active]]
            node[active] = np.where(go_left, left[node[active]], right[node[active]])
            active = feature[node] >= 0
        return value[node]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "_BoostTree":
        tree = cls()
        tree.feature = [int(v) for v in d["feature"]]
        tree.threshold = [float(v) for v in d["threshold"]]
        tree.left = [int(v) for v in d["left"]]
        tree.right = [int(v) for v in d["right"]]
        tree.value = [float(v) for v in d["value"]]
        return tree


class GradientBoostedTrees:
    """Boosted depth-≤3 trees on the logistic loss, exact greedy splits over
    presorted columns, shrinkage 0.1, leaf values −G/(H+λ)."""

    def __init__(
        self,
        rounds: int = 100,
        max_depth: int = 3,
        shrinkage: float = 0.1,
        reg_lambda: float = 1.0,
    ):
        self.rounds = rounds
        self.max_depth = max_depth
        self.shrinkage = shrinkage
        self.reg_lambda = reg_lambda
        self.trees: list[_BoostTree] = []
        self.train_losses: list[float] = []

    def _build_tree(
        self,
        x: np.ndarray,  # (n, p) float64 values, for exact thresholds
        x32: np.ndarray,  # (n, p) float32 copy for the split scan
        g32: np.ndarray,
        h32: np.ndarray,
        sort_idx: np.ndarray,  # (n, p) row ids giving the column sort
        g: np.ndarray,
        h: np.ndarray,
    ) -> tuple[_BoostTree, np.ndarray]:
        """Level-wise growth. Returns the tree and each row's leaf value.

        Each node keeps its rows in per-column sorted order; splitting
        compresses those lists into the children, so the column order never
        has to be re-sorted. The scan runs in float32 for memory bandwidth;
        thresholds and leaf values come from the float64 inputs, and a strict
        float32 inequality implies a strict float64 one, so every candidate
        cut is a real value boundary and training partitions match predict."""
        n, p = x32.shape
        lam = self.reg_lambda
        tree = _BoostTree()
        root = tree._new_node()
        node_of = np.zeros(n, dtype=np.int32)
        cols_of = {root: sort_idx}
        in_left = np.zeros(n, dtype=bool)
        col_ids = np.arange(p)

        for depth in range(self.max_depth + 1):
            if not cols_of:
                break
            next_cols: dict[int, np.ndarray] = {}
            for nid, cols in cols_of.items():
                rows = cols[:, 0]
                g_sum = float(g[rows].sum())
                h_sum = float(h[rows].sum())
                best_gain = -np.inf
                if depth < self.max_depth and rows.size >= 2:
                    v = x32[cols, col_ids]
                    gl = np.cumsum(g32[cols], axis=0)[:-1]
                    hl = np.cumsum(h32[cols], axis=0)[:-1]
                    parent = g_sum * g_sum / (h_sum + lam)
                    gain = (
                        gl * gl / (hl + lam)
                        + (g_sum - gl) ** 2 / (h_sum - hl + lam)
                        - parent
                    )
                    gain = np.where(v[:-1] < v[1:], gain, -np.inf)
                    flat = int(np.argmax(gain))
                    best_gain = float(gain.flat[flat])
                if not best_gain > 0.0:
                    tree.value[nid] = -g_sum / (h_sum + lam)
                    continue
                pos, f = np.unravel_index(flat, gain.shape)
                rows_f = cols[:, f]
                rows_l = rows_f[: pos + 1]
                tree.feature[nid] = int(f)
                tree.threshold[nid] = float(x[rows_f[pos], f])
                left = tree._new_node()
                right = tree._new_node()
                tree.left[nid] = left
                tree.right[nid] = right
                node_of[rows_l] = left
                node_of[rows_f[pos + 1 :]] = right
                in_left[rows_l] = True
                sel = in_left[cols].T
                flat_cols = cols.T
                next_cols[left] = flat_cols[sel].reshape(p, pos + 1).T
                next_cols[right] = flat_cols[~sel].reshape(p, rows.size - pos - 1).T
                in_left[rows_l] = False
            cols_of = next_cols

        leaf_values = np.asarray(tree.value)[node_of]
        return tree, leaf_values

    def fit(self, x: np.ndarray, y: np.ndarray) -> "GradientBoostedTrees":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        _check_training_input(x, y)
        sort_idx = np.argsort(x, axis=0, kind="stable").astype(np.int32)
        x32 = x.astype(np.float32)
        f = np.zeros(x.shape[0])
        self.trees = []
        self.train_losses = []
        for _ in range(self.rounds):
            prob = sigmoid(f)
            g = prob - y
            h = prob * (1.0 - prob)
            g32 = g.astype(np.float32)
            h32 = h.astype(np.float32)
            tree, leaf_values = self._build_tree(x, x32, g32, h32, sort_idx, g, h)
            f += self.shrinkage * leaf_values
            self.trees.append(tree)
            self.train_losses.append(float(np.mean(np.logaddexp(0.0, f) - y * f)))
        return self

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        assert self.trees, "not fitted"
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        margin = np.zeros(x.shape[0])
        for tree in self.trees:
            margin += tree.predict_value(x)
        return self.shrinkage * margin

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(self.decision_function(x))

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_proba(x) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "kind": "gbt",
            "rounds": self.rounds,
            "max_depth": self.max_depth,
            "shrinkage": self.shrinkage,
            "reg_lambda": self.reg_lambda,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GradientBoostedTrees":
        model = cls(
            rounds=int(d["rounds"]),
            max_depth=int(d["max_depth"]),
            shrinkage=float(d["shrinkage"]),
            reg_lambda=float(d["reg_lambda"]),
        )
        model.trees = [_BoostTree.from_dict(t) for t in d["trees"]]
        return model
