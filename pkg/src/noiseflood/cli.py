"""Command line entry points: score, train, detect, eval.

Pipeline: ``score`` floods a manifest of WAVs and writes the score CSV,
``train`` learns a detector from a labeled score CSV, ``detect`` scores fresh
inputs and applies a saved model, ``eval`` reports precision/recall/F1 and
the source-to-target recall matrix of saved models on a labeled score CSV.

Exit codes: 0 success, 1 some rows failed, 2 configuration or data error,
3 classifier could not be started. All randomness flows from the mandatory
``--seed``; re-running a command with identical inputs and configuration
reproduces its output files byte for byte (worker count never changes
results, so it is not part of recorded provenance).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .audio import BAND_NAMES, load_wav
from .classifiers import ClassifierError, resolve_classifier
from .detectors import ThresholdDetector, VotingDetector
from .evaluation import evaluate, f1_score, write_comparison_csv, write_recall_matrix_csv, write_report
from .flooding import (
    DEFAULT_EPS_MAX,
    DEFAULT_STEP,
    FloodingConfig,
    read_score_csv,
    read_score_provenance,
    score_dataset,
    write_score_csv,
)
from .manifest import ManifestError, ManifestRow, read_manifest
from .persistence import ModelFormatError, dataset_digest, load_model, save_model
from .trees import (
    AdaBoostDetector,
    DecisionTreeDetector,
    GradientBoostingDetector,
    RandomForestDetector,
)
from .validation import as_score_matrix, labels_from_vectors

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2
EXIT_CLASSIFIER = 3

CANONICAL_BAND_SPEC = ",".join(BAND_NAMES)


class ConfigError(Exception):
    """Bad flags, manifests, CSVs, or model files; maps to exit code 2."""


def _show_metric(value: float | None) -> str:
    return "undefined" if value is None else f"{value:.4f}"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noiseflood",
        description="Detect adversarial audio by band-limited noise flooding.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_flood_flags(p, needs_classifier=True):
        p.add_argument("--classifier", required=needs_classifier,
                       help="builtin:band-energy or exec:<command line>")
        p.add_argument("--step", type=int, default=DEFAULT_STEP,
                       help="noise amplitude increment s (default %(default)s)")
        p.add_argument("--eps-max", type=int, default=DEFAULT_EPS_MAX,
                       help="search cap (default %(default)s)")
        p.add_argument("--seed", type=int, required=True,
                       help="base seed; required, all noise derives from it")
        p.add_argument("--bands", default=CANONICAL_BAND_SPEC,
                       help="comma-separated band plan; only the canonical "
                            "5-band plan is supported")
        p.add_argument("--workers", type=int, default=1,
                       help="parallel scoring threads (default %(default)s)")
        p.add_argument("--timeout", type=float, default=30.0,
                       help="external classifier response timeout in seconds")

    p_score = sub.add_parser("score", help="flood a manifest, write score CSV")
    p_score.add_argument("--manifest", required=True)
    add_flood_flags(p_score)
    p_score.add_argument("--out", required=True, help="output score CSV path")
    p_score.set_defaults(func=cmd_score)

    p_train = sub.add_parser("train", help="learn a detector from a score CSV")
    p_train.add_argument("--scores", required=True, help="labeled score CSV")
    p_train.add_argument(
        "--kind", required=True,
        choices=["threshold", "majority", "ltv", "tree", "forest", "adaboost", "gboost"],
    )
    p_train.add_argument("--out", required=True, help="output model file")
    p_train.add_argument("--band", default="unfiltered",
                         help="band for --kind threshold (default %(default)s)")
    p_train.add_argument("--max-depth", type=int, default=None)
    p_train.add_argument("--min-leaf", type=int, default=1)
    p_train.add_argument("--n-trees", type=int, default=100)
    p_train.add_argument("--max-features", type=int, default=2)
    p_train.add_argument("--no-bootstrap", action="store_true")
    p_train.add_argument("--n-stages", type=int, default=None)
    p_train.add_argument("--learning-rate", type=float, default=0.1)
    p_train.add_argument("--seed", type=int, default=0,
                         help="seed for the forest's resampling")
    p_train.set_defaults(func=cmd_train)

    p_detect = sub.add_parser("detect", help="apply a saved model to fresh audio")
    p_detect.add_argument("--model", required=True)
    p_detect.add_argument("--manifest")
    p_detect.add_argument("--wav", help="classify a single WAV instead of a manifest")
    add_flood_flags(p_detect)
    p_detect.add_argument("--out", default="-",
                          help="verdict stream destination (default stdout)")
    p_detect.set_defaults(func=cmd_detect)

    p_eval = sub.add_parser("eval", help="report model quality on a labeled score CSV")
    p_eval.add_argument("--scores", required=True, help="labeled score CSV")
    p_eval.add_argument("--model", action="append", required=True,
                        help="model file; repeat to compare several")
    p_eval.add_argument("--out-dir", required=True)
    p_eval.set_defaults(func=cmd_eval)

    return parser


def _flood_config(args) -> FloodingConfig:
    if args.bands != CANONICAL_BAND_SPEC:
        raise ConfigError(
            f"--bands must be the canonical plan {CANONICAL_BAND_SPEC!r}; "
            "other band plans are not supported"
        )
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    try:
        return FloodingConfig(step=args.step, eps_max=args.eps_max, seed=args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _open_classifier(args):
    try:
        return resolve_classifier(args.classifier, timeout=args.timeout)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _provenance(args, cfg: FloodingConfig) -> dict:
    return {
        "classifier": args.classifier,
        "s": cfg.step,
        "eps_max": cfg.eps_max,
        "seed": cfg.seed,
        "bands": list(BAND_NAMES),
    }


def cmd_score(args) -> int:
    cfg = _flood_config(args)
    try:
        rows = read_manifest(args.manifest)
    except (OSError, ManifestError) as exc:
        raise ConfigError(str(exc)) from exc
    if not rows:
        raise ConfigError(f"{args.manifest}: manifest has no rows")
    try:
        classifier = _open_classifier(args)
    except ConfigError:
        raise
    except (ClassifierError, OSError) as exc:
        print(f"error: could not start classifier: {exc}", file=sys.stderr)
        return EXIT_CLASSIFIER
    with classifier:
        scores = score_dataset(rows, classifier, cfg, workers=args.workers)
    write_score_csv(args.out, scores, provenance=_provenance(args, cfg))
    for failure in scores.failures:
        print(f"FAIL {failure.row.id}: {failure.error}", file=sys.stderr)
    print(
        f"scored {len(scores.rows)} of {len(rows)} rows "
        f"({len(scores.failures)} failed) -> {args.out}",
        file=sys.stderr,
    )
    return EXIT_OK if not scores.failures else EXIT_PARTIAL


def _train_detector(args):
    if args.kind == "threshold":
        if args.band not in BAND_NAMES:
            raise ConfigError(f"--band must be one of {BAND_NAMES}")
        return ThresholdDetector(band=args.band)
    if args.kind == "majority":
        return VotingDetector(vote_threshold=3)
    if args.kind == "ltv":
        return VotingDetector(vote_threshold=None)
    if args.kind == "tree":
        return DecisionTreeDetector(
            max_depth=args.max_depth or 4, min_leaf=args.min_leaf
        )
    if args.kind == "forest":
        return RandomForestDetector(
            n_trees=args.n_trees,
            max_depth=args.max_depth or 4,
            min_leaf=args.min_leaf,
            max_features=args.max_features,
            bootstrap=not args.no_bootstrap,
            seed=args.seed,
        )
    if args.kind == "adaboost":
        return AdaBoostDetector(n_stages=args.n_stages or 50)
    return GradientBoostingDetector(
        n_stages=args.n_stages if args.n_stages is not None else 100,
        learning_rate=args.learning_rate,
        max_depth=args.max_depth or 3,
        min_leaf=args.min_leaf,
    )


def cmd_train(args) -> int:
    try:
        records = read_score_csv(args.scores)
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if not records:
        raise ConfigError(f"{args.scores}: no score rows")
    vectors = [rec.vector for rec in records]
    try:
        y = labels_from_vectors(vectors)
        detector = _train_detector(args)
        detector.fit(vectors, y)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    X = as_score_matrix(vectors)
    training_f1 = f1_score(detector.predict(X), y)
    if args.kind == "threshold":
        print(
            f"threshold={detector.threshold_:g} "
            f"info_gain={detector.info_gain_:.4f} training_f1={training_f1:.4f}"
        )
    elif args.kind in ("majority", "ltv"):
        print(
            f"vote_threshold={detector.vote_threshold_} training_f1={training_f1:.4f}"
        )
    else:
        print(f"kind={args.kind} training_f1={training_f1:.4f}")

    provenance = read_score_provenance(args.scores)
    metadata = {
        "dataset_sha256": dataset_digest(args.scores),
        "training_rows": len(records),
    }
    for key in ("s", "eps_max", "seed", "classifier"):
        if key in provenance:
            metadata[key] = provenance[key]
    save_model(args.out, detector, metadata)
    print(f"model -> {args.out}", file=sys.stderr)
    return EXIT_OK


def _detect_rows(args) -> list[ManifestRow]:
    if bool(args.manifest) == bool(args.wav):
        raise ConfigError("give exactly one of --manifest or --wav")
    if args.manifest:
        try:
            return read_manifest(args.manifest)
        except (OSError, ManifestError) as exc:
            raise ConfigError(str(exc)) from exc
    wav = Path(args.wav)
    try:
        load_wav(wav)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"{wav}: {exc}") from exc
    return [
        ManifestRow(
            id=wav.stem,
            path=str(wav),
            is_adversarial=False,
            resolved_path=wav.resolve(),
        )
    ]


def cmd_detect(args) -> int:
    cfg = _flood_config(args)
    try:
        detector, kind, metadata = load_model(args.model)
    except (OSError, ModelFormatError) as exc:
        raise ConfigError(str(exc)) from exc
    for key, value in (("s", cfg.step), ("eps_max", cfg.eps_max)):
        if key in metadata and metadata[key] != value:
            raise ConfigError(
                f"model was trained from scores with {key}={metadata[key]}, "
                f"but this run uses {key}={value}; pass matching flags"
            )
    rows = _detect_rows(args)
    try:
        classifier = _open_classifier(args)
    except ConfigError:
        raise
    except (ClassifierError, OSError) as exc:
        print(f"error: could not start classifier: {exc}", file=sys.stderr)
        return EXIT_CLASSIFIER
    with classifier:
        scores = score_dataset(rows, classifier, cfg, workers=args.workers)

    out = sys.stdout if args.out == "-" else open(args.out, "w")
    try:
        for rec in scores.rows:
            verdict = "adversarial" if detector.predict(rec.vector)[0] else "benign"
            eps = "\t".join(str(e) for e in rec.vector.epsilons)
            out.write(f"{rec.row.id}\t{verdict}\t{eps}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    for failure in scores.failures:
        print(f"FAIL {failure.row.id}: {failure.error}", file=sys.stderr)
    return EXIT_OK if not scores.failures else EXIT_PARTIAL


def cmd_eval(args) -> int:
    try:
        records = read_score_csv(args.scores)
        vectors = [rec.vector for rec in records]
        labels_from_vectors(vectors)
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = dataset_digest(args.scores)
    reports = []
    for model_path in args.model:
        try:
            detector, kind, _ = load_model(model_path)
        except (OSError, ModelFormatError) as exc:
            raise ConfigError(str(exc)) from exc
        try:
            report = evaluate(detector, vectors, with_matrix=True)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        stem = Path(model_path).stem
        write_report(
            out_dir / f"{stem}_report.txt",
            report,
            provenance={"scores_sha256": digest, "kind": kind},
        )
        write_recall_matrix_csv(out_dir / f"{stem}_matrix.csv", report.matrix)
        write_recall_matrix_csv(
            out_dir / f"{stem}_matrix_raw.csv", report.matrix, raw=True
        )
        reports.append(report)
        print(
            f"{kind}: precision={_show_metric(report.precision)} "
            f"recall={_show_metric(report.recall)} f1={report.f1:.4f}"
        )
    write_comparison_csv(out_dir / "comparison.csv", reports)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
