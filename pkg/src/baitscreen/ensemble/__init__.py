"""Six from-scratch base learners stacked under a random-forest meta-model."""

from .learners import (
    GaussianNaiveBayes,
    KNearestNeighbors,
    LinearSVM,
    LogisticRegression,
    MultilayerPerceptron,
    SingleClassError,
    logistic_loss_and_grad,
    mlp_loss_and_grads,
    sigmoid,
)
from .stacking import (
    BASE_ORDER,
    EnsembleConfig,
    StackingModel,
    base_probability_matrix,
    load_model,
    make_base,
    model_from_dict,
    model_to_dict,
    save_model,
    stacking_predict,
    train_stacking,
)
from .trees import CartTree, GradientBoostedTrees, RandomForest

__all__ = [
    "BASE_ORDER",
    "CartTree",
    "EnsembleConfig",
    "GaussianNaiveBayes",
    "GradientBoostedTrees",
    "KNearestNeighbors",
    "LinearSVM",
    "LogisticRegression",
    "MultilayerPerceptron",
    "RandomForest",
    "SingleClassError",
    "StackingModel",
    "base_probability_matrix",
    "load_model",
    "logistic_loss_and_grad",
    "make_base",
    "mlp_loss_and_grads",
    "model_from_dict",
    "model_to_dict",
    "save_model",
    "sigmoid",
    "stacking_predict",
    "train_stacking",
]
