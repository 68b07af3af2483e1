"""Input validation shared by the detector estimators."""

from __future__ import annotations

import numpy as np

from .audio import BAND_NAMES
from .flooding import ScoreVector

N_BANDS = len(BAND_NAMES)


def as_score_matrix(X) -> np.ndarray:
    """Coerce score vectors (or anything array-like) to a float (n, 5) matrix."""
    if isinstance(X, ScoreVector):
        X = [X]
    if len(X) and isinstance(X[0], ScoreVector):
        X = [v.epsilons for v in X]
    matrix = np.asarray(X, dtype=np.float64)
    if matrix.ndim == 1:
        matrix = matrix.reshape(1, -1)
    if matrix.ndim != 2 or matrix.shape[1] != N_BANDS:
        raise ValueError(f"expected an (n, {N_BANDS}) score matrix, got {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("score matrix contains non-finite values")
    return matrix


def as_labels(y, n: int | None = None, require_both_classes: bool = False) -> np.ndarray:
    """Coerce ground-truth labels to a boolean array (True = adversarial)."""
    labels = np.asarray(y)
    if labels.dtype != bool:
        if not np.all(np.isin(labels, (0, 1))):
            raise ValueError("labels must be boolean (True = adversarial)")
        labels = labels.astype(bool)
    if labels.ndim != 1:
        raise ValueError("labels must be 1-d")
    if n is not None and labels.size != n:
        raise ValueError(f"got {labels.size} labels for {n} samples")
    if require_both_classes and len(np.unique(labels)) < 2:
        raise ValueError("training data must contain both classes")
    return labels


def labels_from_vectors(vectors) -> np.ndarray:
    truth = [v.is_adversarial for v in vectors]
    if any(t is None for t in truth):
        raise ValueError("score vectors are missing ground truth")
    return np.asarray(truth, dtype=bool)
