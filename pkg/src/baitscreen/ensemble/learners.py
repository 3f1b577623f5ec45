"""From-scratch level-0 learners: nearest neighbours, Gaussian naive Bayes,
logistic regression, a one-hidden-layer perceptron, and a linear SVM.

Every learner exposes fit / predict_proba / predict plus a JSON-friendly
to_dict / from_dict pair. predict_proba returns the positive-class
probability per row; the implied pair (1-p, p) always sums to 1.
"""

from __future__ import annotations

import numpy as np

VARIANCE_FLOOR = 1e-9


class SingleClassError(ValueError):
    pass


def _check_training_input(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[0] != y.size or x.shape[0] < 2:
        raise ValueError("need at least two labelled rows")
    if not np.isfinite(x).all():
        raise ValueError("training matrix contains non-finite values")
    if np.unique(y).size < 2:
        raise SingleClassError("training labels contain a single class")


def _check_query(x: np.ndarray, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != dim:
        raise ValueError(f"feature dimension {x.shape[1]} != fitted {dim}")
    return x


def sigmoid(z: np.ndarray | float) -> np.ndarray | float:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))


class KNearestNeighbors:
    """Euclidean k-NN; probability = positive fraction among the k nearest,
    distance ties broken by lower training-row index."""

    def __init__(self, k: int = 5):
        self.k = k
        self.x: np.ndarray | None = None
        self.y: np.ndarray | None = None

    def fit(self, x: np.ndarray, y: np.ndarray) -> "KNearestNeighbors":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        _check_training_input(x, y)
        self.x = x.copy()
        self.y = y.copy()
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        assert self.x is not None and self.y is not None
        x = _check_query(x, self.x.shape[1])
        k = min(self.k, self.x.shape[0])
        out = np.empty(x.shape[0])
        for i, q in enumerate(x):
            d2 = ((self.x - q) ** 2).sum(axis=1)
            nearest = np.argsort(d2, kind="stable")[:k]
            out[i] = float(self.y[nearest].mean())
        return out

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_proba(x) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        assert self.x is not None and self.y is not None
        return {"kind": "knn", "k": self.k, "x": self.x.tolist(), "y": self.y.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "KNearestNeighbors":
        model = cls(k=int(d["k"]))
        model.x = np.asarray(d["x"], dtype=np.float64)
        model.y = np.asarray(d["y"], dtype=np.int64)
        return model


class GaussianNaiveBayes:
    """Per-class diagonal Gaussians with a variance floor; posterior computed
    with log-sum-exp normalization."""

    def __init__(self, variance_floor: float = VARIANCE_FLOOR):
        self.variance_floor = variance_floor
        self.means: np.ndarray | None = None  # (2, p)
        self.variances: np.ndarray | None = None  # (2, p)
        self.log_priors: np.ndarray | None = None  # (2,)

    def fit(self, x: np.ndarray, y: np.ndarray) -> "GaussianNaiveBayes":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        _check_training_input(x, y)
        means, variances, priors = [], [], []
        for c in (0, 1):
            xc = x[y == c]
            means.append(xc.mean(axis=0))
            variances.append(np.maximum(xc.var(axis=0), self.variance_floor))
            priors.append(xc.shape[0] / x.shape[0])
        self.means = np.asarray(means)
        self.variances = np.asarray(variances)
        self.log_priors = np.log(np.asarray(priors))
        return self

    def _joint_log_likelihood(self, x: np.ndarray) -> np.ndarray:
        assert self.means is not None
        ll = np.empty((x.shape[0], 2))
        for c in (0, 1):
            var = self.variances[c]
            ll[:, c] = self.log_priors[c] - 0.5 * np.sum(
                np.log(2.0 * np.pi * var) + (x - self.means[c]) ** 2 / var, axis=1
            )
        return ll

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        assert self.means is not None
        x = _check_query(x, self.means.shape[1])
        ll = self._joint_log_likelihood(x)
        shifted = ll - ll.max(axis=1, keepdims=True)
        weights = np.exp(shifted)
        return weights[:, 1] / weights.sum(axis=1)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_proba(x) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "kind": "gnb",
            "variance_floor": self.variance_floor,
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "log_priors": self.log_priors.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianNaiveBayes":
        model = cls(variance_floor=float(d["variance_floor"]))
        model.means = np.asarray(d["means"], dtype=np.float64)
        model.variances = np.asarray(d["variances"], dtype=np.float64)
        model.log_priors = np.asarray(d["log_priors"], dtype=np.float64)
        return model


def logistic_loss_and_grad(
    w: np.ndarray, b: float, x: np.ndarray, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray, float]:
    """Mean cross-entropy + (l2/2)·|w|² (bias unregularized) and its gradient."""
    z = x @ w + b
    p = sigmoid(z)
    # log(1+e^{-|z|}) form keeps the loss finite for extreme margins.
    per_row = np.logaddexp(0.0, z) - y * z
    loss = float(per_row.mean() + 0.5 * l2 * float(w @ w))
    residual = (p - y) / y.size
    return loss, x.T @ residual + l2 * w, float(residual.sum())


class LogisticRegression:
    """L2-regularized logistic regression, full-batch gradient descent until
    the gradient norm falls under the tolerance or epochs run out."""

    def __init__(
        self,
        l2: float = 1e-4,
        lr: float = 0.5,
        epochs: int = 300,
        tolerance: float = 1e-6,
    ):
        self.l2 = l2
        self.lr = lr
        self.epochs = epochs
        self.tolerance = tolerance
        self.w: np.ndarray | None = None
        self.b: float = 0.0

    def fit(self, x: np.ndarray, y: np.ndarray) -> "LogisticRegression":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        _check_training_input(x, y)
        w = np.zeros(x.shape[1])
        b = 0.0
        for _ in range(self.epochs):
            _, gw, gb = logistic_loss_and_grad(w, b, x, y, self.l2)
            if np.sqrt(float(gw @ gw) + gb * gb) <= self.tolerance:
                break
            w -= self.lr * gw
            b -= self.lr * gb
        self.w = w
        self.b = b
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        assert self.w is not None
        x = _check_query(x, self.w.size)
        return sigmoid(x @ self.w + self.b)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_proba(x) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "kind": "logreg",
            "l2": self.l2,
            "lr": self.lr,
            "epochs": self.epochs,
            "tolerance": self.tolerance,
            "w": self.w.tolist(),
            "b": self.b,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticRegression":
        model = cls(
            l2=float(d["l2"]),
            lr=float(d["lr"]),
            epochs=int(d["epochs"]),
            tolerance=float(d["tolerance"]),
        )
        model.w = np.asarray(d["w"], dtype=np.float64)
        model.b = float(d["b"])
        return model


def mlp_loss_and_grads(
    params: dict[str, np.ndarray], x: np.ndarray, y: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy of the one-hidden-layer net and its gradients."""
    w1, b1, w2, b2 = params["w1"], params["b1"], params["w2"], params["b2"]
    z1 = x @ w1 + b1
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ w2 + b2
    loss = float(np.mean(np.logaddexp(0.0, z2) - y * z2))
    d_z2 = (sigmoid(z2) - y) / y.size
    d_a1 = np.outer(d_z2, w2)
    d_z1 = d_a1 * (z1 > 0.0)
    return loss, {
        "w1": x.T @ d_z1,
        "b1": d_z1.sum(axis=0),
        "w2": a1.T @ d_z2,
        "b2": np.asarray(d_z2.sum()),
    }


class MultilayerPerceptron:
    """One ReLU hidden layer into a sigmoid output, trained with full-batch
    momentum gradient descent from a seeded uniform init."""

    def __init__(
        self,
        hidden: int = 64,
        lr: float = 0.05,
        epochs: int = 80,
        momentum: float = 0.9,
        seed: int = 0,
    ):
        self.hidden = hidden
        self.lr = lr
        self.epochs = epochs
        self.momentum = momentum
        self.seed = seed
        self.params: dict[str, np.ndarray] | None = None

    def _init_params(self, dim: int) -> dict[str, np.ndarray]:
        rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(911,)))
        return {
            "w1": rng.uniform(-0.05, 0.05, size=(dim, self.hidden)),
            "b1": rng.uniform(-0.05, 0.05, size=self.hidden),
            "w2": rng.uniform(-0.05, 0.05, size=self.hidden),
            "b2": np.asarray(rng.uniform(-0.05, 0.05)),
        }

    def fit(self, x: np.ndarray, y: np.ndarray) -> "MultilayerPerceptron":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        _check_training_input(x, y)
        params = self._init_params(x.shape[1])
        velocity = {k: np.zeros_like(v) for k, v in params.items()}
        for _ in range(self.epochs):
            _, grads = mlp_loss_and_grads(params, x, y)
            for k in params:
                velocity[k] = self.momentum * velocity[k] - self.lr * grads[k]
                params[k] = params[k] + velocity[k]
        self.params = params
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        assert self.params is not None
        x = _check_query(x, self.params["w1"].shape[0])
        a1 = np.maximum(x @ self.params["w1"] + self.params["b1"], 0.0)
        return sigmoid(a1 @ self.params["w2"] + float(self.params["b2"]))

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_proba(x) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        assert self.params is not None
        return {
            "kind": "mlp",
            "hidden": self.hidden,
            "lr": self.lr,
            "epochs": self.epochs,
            "momentum": self.momentum,
            "seed": self.seed,
            "params": {k: v.tolist() for k, v in self.params.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MultilayerPerceptron":
        model = cls(
            hidden=int(d["hidden"]),
            lr=float(d["lr"]),
            epochs=int(d["epochs"]),
            momentum=float(d["momentum"]),
            seed=int(d["seed"]),
        )
        model.params = {k: np.asarray(v, dtype=np.float64) for k, v in d["params"].items()}
        return model


class LinearSVM:
    """Hinge loss + L2, minimized by subgradient steps over the rows in index
    order each epoch; probability = sigmoid of the signed margin."""

    def __init__(self, l2: float = 1e-4, lr: float = 0.01, epochs: int = 30):
        self.l2 = l2
        self.lr = lr
        self.epochs = epochs
        self.w: np.ndarray | None = None
        self.b: float = 0.0

    def fit(self, x: np.ndarray, y: np.ndarray) -> "LinearSVM":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        _check_training_input(x, y)
        signs = np.where(y == 1, 1.0, -1.0)
        w = np.zeros(x.shape[1])
        b = 0.0
        for _ in range(self.epochs):
            for i in range(x.shape[0]):
                margin = signs[i] * (x[i] @ w + b)
                w *= 1.0 - self.lr * self.l2
                if margin < 1.0:
                    w += self.lr * signs[i] * x[i]
                    b += self.lr * signs[i]
        self.w = w
        self.b = b
        return self

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        assert self.w is not None
        x = _check_query(x, self.w.size)
        return x @ self.w + self.b

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(self.decision_function(x))

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_proba(x) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "kind": "svm",
            "l2": self.l2,
            "lr": self.lr,
            "epochs": self.epochs,
            "w": self.w.tolist(),
            "b": self.b,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinearSVM":
        model = cls(l2=float(d["l2"]), lr=float(d["lr"]), epochs=int(d["epochs"]))
        model.w = np.asarray(d["w"], dtype=np.float64)
        model.b = float(d["b"])
        return model
