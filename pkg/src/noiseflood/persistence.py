"""Versioned, human-readable persistence for learned detector models.

One JSON document per model:

    {
      "format": "noiseflood-model",
      "version": 1,
      "kind": "threshold" | "majority" | "ltv" | "tree" | "forest"
              | "adaboost" | "gboost",
      "model": <kind-specific payload>,
      "metadata": {"seed": ..., "step": ..., "eps_max": ...,
                   "dataset_sha256": ..., "bands": [...], ...}
    }

The metadata block pins the flooding configuration the training scores were
produced with, so detection runs can refuse inputs scored under different
settings. Round-trips are exact: a reloaded model predicts identically on
every input.
"""

from __future__ import annotations

import hashlib
import json

from .audio import BAND_NAMES
from .detectors import ThresholdDetector, VotingDetector
from .trees import (
    AdaBoostDetector,
    DecisionTreeDetector,
    GradientBoostingDetector,
    RandomForestDetector,
)

FORMAT_NAME = "noiseflood-model"
FORMAT_VERSION = 1

MODEL_KINDS = {
    "threshold": ThresholdDetector,
    "majority": VotingDetector,
    "ltv": VotingDetector,
    "tree": DecisionTreeDetector,
    "forest": RandomForestDetector,
    "adaboost": AdaBoostDetector,
    "gboost": GradientBoostingDetector,
}


class ModelFormatError(ValueError):
    """Raised when a model file is missing or malformed."""


def kind_of(detector) -> str:
    """The persistence kind for a fitted detector instance."""
    if isinstance(detector, ThresholdDetector):
        return "threshold"
    if isinstance(detector, VotingDetector):
        return "majority" if detector.vote_threshold is not None else "ltv"
    if isinstance(detector, DecisionTreeDetector):
        return "tree"
    if isinstance(detector, RandomForestDetector):
        return "forest"
    if isinstance(detector, AdaBoostDetector):
        return "adaboost"
    if isinstance(detector, GradientBoostingDetector):
        return "gboost"
    raise ModelFormatError(f"no persistence kind for {type(detector).__name__}")


def dataset_digest(path) -> str:
    """SHA-256 of the training score CSV, hex-encoded."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def save_model(path, detector, metadata: dict | None = None) -> None:
    """Write one fitted detector with its training provenance."""
    document = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": kind_of(detector),
        "model": detector.to_dict(),
        "metadata": {"bands": list(BAND_NAMES), **(metadata or {})},
    }
    with open(path, "w") as fh:
        json.dump(document, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path):
    """Read a model file back into a fitted detector.

    Returns (detector, kind, metadata). Unknown formats, versions, or kinds
    raise ModelFormatError.
    """
    try:
        with open(path) as fh:
            document = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(document, dict) or document.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"{path}: not a {FORMAT_NAME} file")
    if document.get("version") != FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported version {document.get('version')!r}"
        )
    kind = document.get("kind")
    if kind not in MODEL_KINDS:
        raise ModelFormatError(f"{path}: unknown model kind {kind!r}")
    try:
        detector = MODEL_KINDS[kind].from_dict(document["model"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed {kind} payload ({exc})") from exc
    metadata = document.get("metadata", {})
    if metadata.get("bands") not in (None, list(BAND_NAMES)):
        raise ModelFormatError(f"{path}: band order does not match this build")
    return detector, kind, metadata
