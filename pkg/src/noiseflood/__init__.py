"""Noise flooding: band-limited random-noise probing that exposes adversarial
audio by how little noise it takes to flip a classifier's prediction."""

from .audio import (
    BAND_NAMES,
    CANONICAL_BANDS,
    CANONICAL_SAMPLE_RATE,
    AudioSignal,
    FrequencyBand,
    UnsupportedWavError,
    WavFormatError,
    band_pass,
    generate_noise,
    load_wav,
    mix,
    save_wav,
)
from .classifiers import (
    BandEnergyToyClassifier,
    Classifier,
    ClassifierError,
    ExternalClassifier,
    ProtocolError,
    resolve_classifier,
    spawn_external,
)
from .detectors import (
    MAJORITY_VOTES,
    ThresholdDetector,
    ThresholdFit,
    VotingDetector,
    detect,
    information_gain,
    learn_threshold,
    learn_vote_threshold,
    majority_vote,
    majority_voting_detector,
    vote_counts,
)
from .evaluation import (
    ConfusionCounts,
    EvalReport,
    RecallMatrix,
    detector_identity,
    evaluate,
    f1_from_counts,
    f1_score,
    percent_half_up,
    precision,
    recall,
    recall_matrix,
    write_comparison_csv,
    write_recall_matrix_csv,
    write_report,
)
from .flooding import (
    DEFAULT_EPS_MAX,
    DEFAULT_STEP,
    SCORE_CSV_HEADER,
    DatasetScores,
    FloodingConfig,
    FloodingScore,
    RowFailure,
    RowScore,
    ScoreRecord,
    ScoreVector,
    derive_seed,
    flooding_score,
    max_loop_calls,
    read_score_csv,
    read_score_provenance,
    score_dataset,
    score_vector,
    write_score_csv,
)
from .manifest import ManifestError, ManifestRow, read_manifest, write_manifest
from .persistence import (
    ModelFormatError,
    dataset_digest,
    kind_of,
    load_model,
    save_model,
)
from .trees import (
    AdaBoostDetector,
    DecisionTreeDetector,
    GradientBoostingDetector,
    RandomForestDetector,
    Stump,
    TreeNode,
)

__version__ = "1.0.0"

__all__ = [
    "AdaBoostDetector",
    "AudioSignal",
    "BAND_NAMES",
    "band_pass",
    "BandEnergyToyClassifier",
    "CANONICAL_BANDS",
    "CANONICAL_SAMPLE_RATE",
    "Classifier",
    "ClassifierError",
    "ConfusionCounts",
    "dataset_digest",
    "DatasetScores",
    "DecisionTreeDetector",
    "DEFAULT_EPS_MAX",
    "DEFAULT_STEP",
    "derive_seed",
    "detect",
    "detector_identity",
    "EvalReport",
    "evaluate",
    "ExternalClassifier",
    "f1_from_counts",
    "f1_score",
    "flooding_score",
    "FloodingConfig",
    "FloodingScore",
    "FrequencyBand",
    "generate_noise",
    "GradientBoostingDetector",
    "information_gain",
    "kind_of",
    "learn_threshold",
    "learn_vote_threshold",
    "load_model",
    "load_wav",
    "majority_vote",
    "MAJORITY_VOTES",
    "majority_voting_detector",
    "ManifestError",
    "ManifestRow",
    "max_loop_calls",
    "mix",
    "ModelFormatError",
    "percent_half_up",
    "precision",
    "ProtocolError",
    "RandomForestDetector",
    "read_manifest",
    "read_score_csv",
    "read_score_provenance",
    "recall",
    "recall_matrix",
    "RecallMatrix",
    "resolve_classifier",
    "RowFailure",
    "RowScore",
    "save_model",
    "save_wav",
    "SCORE_CSV_HEADER",
    "score_dataset",
    "score_vector",
    "ScoreRecord",
    "ScoreVector",
    "spawn_external",
    "Stump",
    "ThresholdDetector",
    "ThresholdFit",
    "TreeNode",
    "UnsupportedWavError",
    "vote_counts",
    "VotingDetector",
    "WavFormatError",
    "write_comparison_csv",
    "write_manifest",
    "write_recall_matrix_csv",
    "write_report",
    "write_score_csv",
]
