"""Threshold and voting detectors over flooding scores.

A low flooding score marks a fragile, likely-adversarial input. The single
band detector learns the score threshold of maximum information gain on
labeled training scores and declares inputs with ``score < threshold``
adversarial (strictly). Voting ensembles combine the five per-band detectors,
either with the fixed majority rule (3 of 5) or with a vote count learned to
maximize training F1.

All estimators follow the scikit-learn protocol: ``fit(X, y)`` on an (n, 5)
score matrix in canonical band order (lists of ScoreVector are accepted too),
``predict`` returns a boolean array with True = adversarial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .audio import BAND_NAMES
from .evaluation import f1_score
from .validation import N_BANDS, as_labels, as_score_matrix

MAJORITY_VOTES = 3


@dataclass(frozen=True)
class ThresholdFit:
    """A learned score threshold plus how it was found."""

    threshold: float
    info_gain: float
    n_adversarial: int
    n_benign: int
    degenerate: bool = False  # no candidate split existed (all scores equal)


def _entropy(n_pos: int, n_total: int) -> float:
    if n_total == 0 or n_pos == 0 or n_pos == n_total:
        return 0.0
    p = n_pos / n_total
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def information_gain(scores: np.ndarray, labels: np.ndarray, threshold: float) -> float:
    """Entropy reduction of the labels under the split ``score < threshold``."""
    left = scores < threshold
    n = labels.size
    n_left = int(left.sum())
    n_right = n - n_left
    base = _entropy(int(labels.sum()), n)
    h_left = _entropy(int(labels[left].sum()), n_left)
    h_right = _entropy(int(labels[~left].sum()), n_right)
    return base - (n_left / n) * h_left - (n_right / n) * h_right


def learn_threshold(scores, labels) -> ThresholdFit:
    """Pick the midpoint threshold of maximum information gain.

    Candidates are midpoints between consecutive distinct sorted scores; ties
    break toward the smallest threshold. Requires both classes present. When
    every score is identical there is no candidate; the degenerate fit keeps
    that single value as threshold with zero gain.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = as_labels(labels, scores.size, require_both_classes=True)
    n_adv = int(labels.sum())
    distinct = np.unique(scores)
    if distinct.size < 2:
        return ThresholdFit(
            threshold=float(distinct[0]),
            info_gain=0.0,
            n_adversarial=n_adv,
            n_benign=labels.size - n_adv,
            degenerate=True,
        )
    candidates = (distinct[:-1] + distinct[1:]) / 2.0
    best_t, best_gain = candidates[0], -1.0
    for t in candidates:
        gain = information_gain(scores, labels, t)
        if gain > best_gain + 1e-12:
            best_t, best_gain = t, gain
    return ThresholdFit(
        threshold=float(best_t),
        info_gain=float(best_gain),
        n_adversarial=n_adv,
        n_benign=labels.size - n_adv,
    )


def detect(score: float, threshold: float) -> bool:
    """Adversarial iff the flooding score is strictly below the threshold."""
    return score < threshold


class ThresholdDetector(BaseEstimator, ClassifierMixin):
    """Single-band detector: adversarial iff that band's score < threshold.

    Parameters
    ----------
    band : str
        Which canonical band's score to threshold (default "unfiltered").
    """

    def __init__(self, band: str = "unfiltered"):
        self.band = band

    def _column(self) -> int:
        try:
            return BAND_NAMES.index(self.band)
        except ValueError:
            raise ValueError(
                f"unknown band {self.band!r}; expected one of {BAND_NAMES}"
            ) from None

    def fit(self, X, y):
        column = self._column()
        X = as_score_matrix(X)
        y = as_labels(y, X.shape[0], require_both_classes=True)
        fit = learn_threshold(X[:, column], y)
        self.threshold_ = fit.threshold
        self.info_gain_ = fit.info_gain
        self.training_stats_ = fit
        return self

    def predict(self, X):
        if not hasattr(self, "threshold_"):
            raise NotFittedError("ThresholdDetector is not fitted")
        X = as_score_matrix(X)
        return X[:, self._column()] < self.threshold_

    def to_dict(self) -> dict:
        if not hasattr(self, "threshold_"):
            raise NotFittedError("ThresholdDetector is not fitted")
        return {
            "params": {"band": self.band},
            "threshold": self.threshold_,
            "info_gain": self.info_gain_,
            "n_adversarial": self.training_stats_.n_adversarial,
            "n_benign": self.training_stats_.n_benign,
            "degenerate": self.training_stats_.degenerate,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ThresholdDetector":
        model = cls(**data["params"])
        model.threshold_ = float(data["threshold"])
        model.info_gain_ = float(data["info_gain"])
        model.training_stats_ = ThresholdFit(
            threshold=model.threshold_,
            info_gain=model.info_gain_,
            n_adversarial=int(data["n_adversarial"]),
            n_benign=int(data["n_benign"]),
            degenerate=bool(data["degenerate"]),
        )
        return model


def vote_counts(X, members) -> np.ndarray:
    """Number of member detectors voting adversarial per row."""
    if len(members) != N_BANDS:
        raise ValueError(f"expected {N_BANDS} member detectors, got {len(members)}")
    X = as_score_matrix(X)
    votes = np.zeros(X.shape[0], dtype=int)
    for member in members:
        votes += member.predict(X).astype(int)
    return votes


def majority_vote(X, members) -> np.ndarray:
    """Fixed majority rule: adversarial iff at least 3 of the 5 members agree."""
    return vote_counts(X, members) >= MAJORITY_VOTES


def learn_vote_threshold(X, y, members) -> tuple[int, list[float]]:
    """Pick the vote count k in 1..5 maximizing training F1; ties favor larger k."""
    y = as_labels(y, require_both_classes=True)
    votes = vote_counts(X, members)
    f1_per_k = [f1_score(votes >= k, y) for k in range(1, N_BANDS + 1)]
    best_k = int(np.argmax(f1_per_k)) + 1
    for k in range(best_k + 1, N_BANDS + 1):
        if f1_per_k[k - 1] >= f1_per_k[best_k - 1] - 1e-12:
            best_k = k
    return best_k, f1_per_k


class VotingDetector(BaseEstimator, ClassifierMixin):
    """Ensemble of the five per-band threshold detectors.

    With ``vote_threshold=None`` the required vote count is learned from the
    training set (the count maximizing F1, ties resolved to the largest
    count); an integer fixes it, e.g. 3 for plain majority voting.
    """

    def __init__(self, vote_threshold: int | None = None):
        self.vote_threshold = vote_threshold

    def fit(self, X, y):
        if self.vote_threshold is not None and not 1 <= self.vote_threshold <= N_BANDS:
            raise ValueError(f"vote_threshold must be in [1, {N_BANDS}]")
        X = as_score_matrix(X)
        y = as_labels(y, X.shape[0], require_both_classes=True)
        self.members_ = [ThresholdDetector(band=name).fit(X, y) for name in BAND_NAMES]
        if self.vote_threshold is None:
            self.vote_threshold_, self.training_f1_per_k_ = learn_vote_threshold(
                X, y, self.members_
            )
        else:
            self.vote_threshold_ = int(self.vote_threshold)
        return self

    def predict(self, X):
        if not hasattr(self, "members_"):
            raise NotFittedError("VotingDetector is not fitted")
        return vote_counts(X, self.members_) >= self.vote_threshold_

    def to_dict(self) -> dict:
        if not hasattr(self, "members_"):
            raise NotFittedError("VotingDetector is not fitted")
        data = {
            "params": {"vote_threshold": self.vote_threshold},
            "vote_threshold": self.vote_threshold_,
            "members": [member.to_dict() for member in self.members_],
        }
        if hasattr(self, "training_f1_per_k_"):
            data["training_f1_per_k"] = list(self.training_f1_per_k_)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "VotingDetector":
        model = cls(**data["params"])
        model.vote_threshold_ = int(data["vote_threshold"])
        model.members_ = [
            ThresholdDetector.from_dict(member) for member in data["members"]
        ]
        if "training_f1_per_k" in data:
            model.training_f1_per_k_ = [float(v) for v in data["training_f1_per_k"]]
        return model


def majority_voting_detector() -> VotingDetector:
    """The fixed 3-of-5 majority ensemble."""
    return VotingDetector(vote_threshold=MAJORITY_VOTES)
