"""Tree-based meta-classifiers over 5-dimensional flooding score vectors.

Implemented from scratch so that every split, stage weight, and leaf value is
auditable and bit-for-bit reproducible:

- :class:`DecisionTreeDetector` -- greedy CART on Gini impurity.
- :class:`RandomForestDetector` -- bootstrap + per-split feature subsampling.
- :class:`AdaBoostDetector` -- discrete AdaBoost over decision stumps.
- :class:`GradientBoostingDetector` -- logistic-loss gradient boosting with
  depth-limited regression trees.

Shared conventions: candidate thresholds are midpoints between consecutive
distinct feature values, the split rule is ``value < threshold -> left``, and
ties are broken toward the lowest feature index, then the smallest threshold.
Class decisions are ``probability >= 0.5`` (for the boosted models: margin
``>= 0``, which is the same decision boundary).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .flooding import derive_seed
from .validation import N_BANDS, as_labels, as_score_matrix

# Gains within this tolerance of the best are treated as ties so that the
# documented tie-break order decides, not float summation order.
GAIN_TIE_TOL = 1e-12


@dataclass
class TreeNode:
    """One node of a binary tree; a leaf iff ``feature`` is None.

    ``value`` holds the leaf payload: the adversarial class probability for
    classification trees, the mean residual for regression trees.
    """

    value: float
    n_samples: int
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf value for every row of X."""
        out = np.empty(X.shape[0], dtype=float)
        self._apply_into(X, np.arange(X.shape[0]), out)
        return out

    def _apply_into(self, X, idx, out) -> None:
        if self.is_leaf:
            out[idx] = self.value
            return
        goes_left = X[idx, self.feature] < self.threshold
        self.left._apply_into(X, idx[goes_left], out)
        self.right._apply_into(X, idx[~goes_left], out)

    def to_dict(self) -> dict:
        node = {"value": self.value, "n_samples": self.n_samples}
        if not self.is_leaf:
            node["feature"] = self.feature
            node["threshold"] = self.threshold
            node["left"] = self.left.to_dict()
            node["right"] = self.right.to_dict()
        return node

    @classmethod
    def from_dict(cls, data: dict) -> "TreeNode":
        node = cls(value=float(data["value"]), n_samples=int(data["n_samples"]))
        if "feature" in data:
            node.feature = int(data["feature"])
            node.threshold = float(data["threshold"])
            node.left = cls.from_dict(data["left"])
            node.right = cls.from_dict(data["right"])
        return node


# ---------------------------------------------------------------------------
# Split search
# ---------------------------------------------------------------------------

def _column_splits(column: np.ndarray, target: np.ndarray, min_leaf: int):
    """Candidate thresholds with left-side counts and target sums.

    Returns (thresholds, n_left, sum_left, sumsq_left) restricted to splits
    leaving at least ``min_leaf`` rows on each side; empty arrays when the
    column is constant.
    """
    order = np.argsort(column, kind="stable")
    sv = column[order]
    st = target[order]
    edges = np.nonzero(sv[1:] > sv[:-1])[0]
    if edges.size == 0:
        empty = np.empty(0)
        return empty, empty, empty, empty
    thresholds = (sv[edges] + sv[edges + 1]) / 2.0
    n_left = (edges + 1).astype(float)
    sum_left = np.cumsum(st)[edges]
    sumsq_left = np.cumsum(st * st)[edges]
    keep = (n_left >= min_leaf) & (column.size - n_left >= min_leaf)
    return thresholds[keep], n_left[keep], sum_left[keep], sumsq_left[keep]


def gini_impurity(n_pos: float, n_total: float) -> float:
    if n_total == 0:
        return 0.0
    p = n_pos / n_total
    return 2.0 * p * (1.0 - p)


def _best_split(X, target, features, min_leaf, criterion):
    """Best (gain, feature, threshold) over the given features, or None.

    ``criterion`` is "gini" (target is 0/1) or "mse" (target is a residual).
    """
    n = target.size
    total = float(target.sum())
    if criterion == "gini":
        parent = gini_impurity(total, n)
    else:
        parent = float(np.mean(target * target)) - (total / n) ** 2
    best = None
    best_gain = 0.0
    for feature in features:
        thresholds, n_left, sum_left, sumsq_left = _column_splits(
            X[:, feature], target, min_leaf
        )
        if thresholds.size == 0:
            continue
        n_right = n - n_left
        sum_right = total - sum_left
        if criterion == "gini":
            child_left = 2.0 * (sum_left / n_left) * (1.0 - sum_left / n_left)
            child_right = 2.0 * (sum_right / n_right) * (1.0 - sum_right / n_right)
        else:
            sumsq_right = float(np.sum(target * target)) - sumsq_left
            child_left = sumsq_left / n_left - (sum_left / n_left) ** 2
            child_right = sumsq_right / n_right - (sum_right / n_right) ** 2
        gains = parent - (n_left * child_left + n_right * child_right) / n
        top = float(gains.max())
        if top <= GAIN_TIE_TOL:
            continue
        # smallest threshold among within-tolerance ties
        pick = int(np.nonzero(gains >= top - GAIN_TIE_TOL)[0][0])
        if best is None or gains[pick] > best_gain + GAIN_TIE_TOL:
            best = (int(feature), float(thresholds[pick]))
            best_gain = float(gains[pick])
    if best is None:
        return None
    return best_gain, best[0], best[1]


def _grow(X, target, depth, max_depth, min_leaf, criterion, rng=None, max_features=None):
    value = float(np.mean(target))
    node = TreeNode(value=value, n_samples=int(target.size))
    if depth >= max_depth or target.size < 2 * min_leaf or np.all(target == target[0]):
        return node
    if rng is None:
        features = np.arange(X.shape[1])
    else:
        features = np.sort(rng.choice(X.shape[1], size=max_features, replace=False))
    found = _best_split(X, target, features, min_leaf, criterion)
    if found is None:
        return node
    _, node.feature, node.threshold = found
    goes_left = X[:, node.feature] < node.threshold
    node.left = _grow(
        X[goes_left], target[goes_left], depth + 1, max_depth, min_leaf,
        criterion, rng, max_features,
    )
    node.right = _grow(
        X[~goes_left], target[~goes_left], depth + 1, max_depth, min_leaf,
        criterion, rng, max_features,
    )
    return node


def _proba_matrix(p_adversarial: np.ndarray) -> np.ndarray:
    p = np.clip(np.asarray(p_adversarial, dtype=float), 0.0, 1.0)
    return np.column_stack([1.0 - p, p])


class _TreeEstimatorBase(BaseEstimator, ClassifierMixin):
    """Shared predict plumbing; subclasses provide _adversarial_proba."""

    classes_ = np.array([False, True])
    _fitted_attr = ""

    def _check_fitted(self) -> None:
        if not hasattr(self, self._fitted_attr):
            raise NotFittedError(
                f"{type(self).__name__} is not fitted; call fit() first"
            )

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        X = as_score_matrix(X)
        return _proba_matrix(self._adversarial_proba(X))

    def predict(self, X) -> np.ndarray:
        return self.predict_proba(X)[:, 1] >= 0.5


# ---------------------------------------------------------------------------
# CART
# ---------------------------------------------------------------------------

class DecisionTreeDetector(_TreeEstimatorBase):
    """Greedy CART on Gini impurity over score vectors.

    Both classes must be present in ``y``; the degenerate case where every
    vector is identical yields a single leaf carrying the empirical class
    probability. Split search is independent of training-row order.
    """

    _fitted_attr = "tree_"

    def __init__(self, max_depth: int = 4, min_leaf: int = 1):
        self.max_depth = max_depth
        self.min_leaf = min_leaf

    def fit(self, X, y) -> "DecisionTreeDetector":
        X = as_score_matrix(X)
        y = as_labels(y, X.shape[0], require_both_classes=True)
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        self.tree_ = _grow(
            X, y.astype(float), 0, self.max_depth, self.min_leaf, "gini"
        )
        return self

    def _adversarial_proba(self, X: np.ndarray) -> np.ndarray:
        return self.tree_.apply(X)

    def to_dict(self) -> dict:
        self._check_fitted()
        return {
            "params": {"max_depth": self.max_depth, "min_leaf": self.min_leaf},
            "tree": self.tree_.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionTreeDetector":
        model = cls(**data["params"])
        model.tree_ = TreeNode.from_dict(data["tree"])
        return model


# ---------------------------------------------------------------------------
# Random forest
# ---------------------------------------------------------------------------

class RandomForestDetector(_TreeEstimatorBase):
    """Bagged CART trees with per-split feature subsampling.

    Each tree draws its bootstrap sample and feature subsets from its own
    generator derived from ``seed`` and the tree index, so fits are
    reproducible and independent of evaluation order. The ensemble predicts
    the majority of hard tree votes; the reported probability is the fraction
    of trees voting adversarial.
    """

    _fitted_attr = "trees_"

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: int = 4,
        min_leaf: int = 1,
        max_features: int = 2,
        bootstrap: bool = True,
        seed: int = 0,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed

    def fit(self, X, y) -> "RandomForestDetector":
        X = as_score_matrix(X)
        y = as_labels(y, X.shape[0], require_both_classes=True)
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if not 1 <= self.max_features <= N_BANDS:
            raise ValueError(f"max_features must be in 1..{N_BANDS}")
        target = y.astype(float)
        n = X.shape[0]
        self.seeds_ = tuple(
            int(derive_seed(self.seed, t)) for t in range(self.n_trees)
        )
        self.trees_ = []
        for tree_seed in self.seeds_:
            rng = np.random.default_rng(tree_seed)
            if self.bootstrap:
                rows = rng.integers(0, n, size=n)
            else:
                rows = np.arange(n)
            self.trees_.append(
                _grow(
                    X[rows], target[rows], 0, self.max_depth, self.min_leaf,
                    "gini", rng=rng, max_features=self.max_features,
                )
            )
        return self

    def _adversarial_proba(self, X: np.ndarray) -> np.ndarray:
        votes = np.stack([tree.apply(X) >= 0.5 for tree in self.trees_])
        return votes.mean(axis=0)

    def to_dict(self) -> dict:
        self._check_fitted()
        return {
            "params": self.get_params(),
            "seeds": list(self.seeds_),
            "trees": [tree.to_dict() for tree in self.trees_],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RandomForestDetector":
        model = cls(**data["params"])
        model.seeds_ = tuple(int(s) for s in data["seeds"])
        model.trees_ = [TreeNode.from_dict(t) for t in data["trees"]]
        return model


# ---------------------------------------------------------------------------
# AdaBoost
# ---------------------------------------------------------------------------

@dataclass
class Stump:
    """Decision stump: adversarial iff (value < threshold) == (polarity > 0)."""

    feature: int
    threshold: float
    polarity: int

    def predict_sign(self, X: np.ndarray) -> np.ndarray:
        """+1 for adversarial, -1 for benign."""
        below = X[:, self.feature] < self.threshold
        signs = np.where(below, 1, -1)
        return signs * self.polarity

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "polarity": self.polarity,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Stump":
        return cls(
            feature=int(data["feature"]),
            threshold=float(data["threshold"]),
            polarity=int(data["polarity"]),
        )


def _best_stump(X, y_sign, weights):
    """Minimum-weighted-error stump.

    Candidate thresholds are per-feature midpoints; both polarities are
    tried. Tie-break: lowest feature, then smallest threshold, then positive
    polarity.
    """
    best = None
    best_err = math.inf
    for feature in range(X.shape[1]):
        column = X[:, feature]
        values = np.unique(column)
        if values.size < 2:
            continue
        thresholds = (values[:-1] + values[1:]) / 2.0
        below = column[None, :] < thresholds[:, None]
        # err of polarity +1: weight where prediction sign != y_sign
        pred_pos = np.where(below, 1, -1)
        err_pos = np.sum(np.where(pred_pos != y_sign[None, :], weights[None, :], 0.0), axis=1)
        for t_idx in range(thresholds.size):
            for polarity, err in ((1, err_pos[t_idx]), (-1, 1.0 - err_pos[t_idx])):
                if err < best_err - GAIN_TIE_TOL:
                    best_err = float(err)
                    best = Stump(feature, float(thresholds[t_idx]), polarity)
    return best, best_err


class AdaBoostDetector(_TreeEstimatorBase):
    """Discrete AdaBoost over decision stumps.

    Stage weight is ``0.5 * ln((1 - err) / err)`` on the weighted training
    error. Boosting stops early when the best stump is no better than chance
    (err >= 0.5) or perfect (err == 0); a perfect stump is kept as a final
    stage with weight 1.0 so stage weights stay finite. The decision is the
    sign of the weighted margin, and the reported probability maps the margin
    through the implied logistic link ``sigmoid(2 * margin)``.
    """

    _fitted_attr = "stages_"

    def __init__(self, n_stages: int = 50):
        self.n_stages = n_stages

    def fit(self, X, y) -> "AdaBoostDetector":
        X = as_score_matrix(X)
        y = as_labels(y, X.shape[0], require_both_classes=True)
        if self.n_stages < 1:
            raise ValueError("n_stages must be >= 1")
        y_sign = np.where(y, 1, -1)
        weights = np.full(X.shape[0], 1.0 / X.shape[0])
        self.stages_: list[tuple[Stump, float]] = []
        self.stage_errors_: list[float] = []
        for _ in range(self.n_stages):
            stump, err = _best_stump(X, y_sign, weights)
            if stump is None or err >= 0.5 - GAIN_TIE_TOL:
                break
            if err <= GAIN_TIE_TOL:
                self.stages_.append((stump, 1.0))
                self.stage_errors_.append(0.0)
                break
            alpha = 0.5 * math.log((1.0 - err) / err)
            self.stages_.append((stump, alpha))
            self.stage_errors_.append(err)
            weights = weights * np.exp(-alpha * y_sign * stump.predict_sign(X))
            weights /= weights.sum()
        return self

    def margin(self, X) -> np.ndarray:
        self._check_fitted()
        X = as_score_matrix(X)
        total = np.zeros(X.shape[0])
        for stump, alpha in self.stages_:
            total += alpha * stump.predict_sign(X)
        return total

    def _adversarial_proba(self, X: np.ndarray) -> np.ndarray:
        # sigmoid(2F): the additive-logistic view of the AdaBoost margin
        return 1.0 / (1.0 + np.exp(-2.0 * self.margin(X)))

    def predict(self, X) -> np.ndarray:
        return self.margin(X) >= 0.0

    def to_dict(self) -> dict:
        self._check_fitted()
        return {
            "params": {"n_stages": self.n_stages},
            "stages": [
                {"stump": stump.to_dict(), "alpha": alpha}
                for stump, alpha in self.stages_
            ],
            "stage_errors": list(self.stage_errors_),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AdaBoostDetector":
        model = cls(**data["params"])
        model.stages_ = [
            (Stump.from_dict(stage["stump"]), float(stage["alpha"]))
            for stage in data["stages"]
        ]
        model.stage_errors_ = [float(e) for e in data["stage_errors"]]
        return model


# ---------------------------------------------------------------------------
# Gradient boosting
# ---------------------------------------------------------------------------

def _logistic_loss(y: np.ndarray, raw: np.ndarray) -> float:
    # numerically stable -[y*log(p) + (1-y)*log(1-p)] for raw log-odds
    margin = np.where(y, raw, -raw)
    return float(np.mean(np.logaddexp(0.0, -margin)))


class GradientBoostingDetector(_TreeEstimatorBase):
    """Gradient boosting on the logistic loss with regression trees.

    Starts from the prior log-odds and at each stage fits a depth-limited
    squared-error regression tree to the residuals ``y - sigmoid(F)``; leaves
    carry the mean residual, scaled by ``learning_rate``. ``loss_trace_``
    records the mean training logistic loss after every stage (index 0 is the
    prior-only model); for learning_rate <= 1 the trace never increases.
    """

    _fitted_attr = "trees_"

    def __init__(
        self,
        n_stages: int = 100,
        learning_rate: float = 0.1,
        max_depth: int = 3,
        min_leaf: int = 1,
    ):
        self.n_stages = n_stages
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_leaf = min_leaf

    def fit(self, X, y) -> "GradientBoostingDetector":
        X = as_score_matrix(X)
        y = as_labels(y, X.shape[0], require_both_classes=True)
        if self.n_stages < 0:
            raise ValueError("n_stages must be >= 0")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        p0 = float(np.mean(y))
        self.prior_ = math.log(p0 / (1.0 - p0))
        raw = np.full(X.shape[0], self.prior_)
        self.trees_: list[TreeNode] = []
        self.loss_trace_ = [_logistic_loss(y, raw)]
        for _ in range(self.n_stages):
            residual = y.astype(float) - 1.0 / (1.0 + np.exp(-raw))
            tree = _grow(X, residual, 0, self.max_depth, self.min_leaf, "mse")
            self.trees_.append(tree)
            raw = raw + self.learning_rate * tree.apply(X)
            self.loss_trace_.append(_logistic_loss(y, raw))
        return self

    def decision_function(self, X) -> np.ndarray:
        self._check_fitted()
        X = as_score_matrix(X)
        raw = np.full(X.shape[0], self.prior_)
        for tree in self.trees_:
            raw = raw + self.learning_rate * tree.apply(X)
        return raw

    def _adversarial_proba(self, X: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 + np.exp(-self.decision_function(X)))

    def predict(self, X) -> np.ndarray:
        return self.decision_function(X) >= 0.0

    def to_dict(self) -> dict:
        self._check_fitted()
        return {
            "params": self.get_params(),
            "prior": self.prior_,
            "trees": [tree.to_dict() for tree in self.trees_],
            "loss_trace": list(self.loss_trace_),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GradientBoostingDetector":
        model = cls(**data["params"])
        model.prior_ = float(data["prior"])
        model.trees_ = [TreeNode.from_dict(t) for t in data["trees"]]
        model.loss_trace_ = [float(v) for v in data["loss_trace"]]
        return model
