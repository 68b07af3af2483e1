import numpy as np
import pytest
from sklearn.metrics import f1_score as sk_f1
from sklearn.metrics import precision_score, recall_score

from noiseflood import (
    CANONICAL_BANDS,
    ConfusionCounts,
    EvalReport,
    FloodingScore,
    RecallMatrix,
    ScoreVector,
    ThresholdDetector,
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


def vector(epsilons, is_adversarial=None, source=None, target=None):
    scores = tuple(
        FloodingScore(epsilon=e, flipped=e < 2500, band=b)
        for e, b in zip(epsilons, CANONICAL_BANDS)
    )
    return ScoreVector(
        scores=scores, is_adversarial=is_adversarial, source=source, target=target
    )


def unfiltered_detector(threshold=150.0):
    """A detector on the unfiltered column with a hand-set threshold."""
    return ThresholdDetector.from_dict(
        {
            "params": {"band": "unfiltered"},
            "threshold": threshold,
            "info_gain": 1.0,
            "n_adversarial": 1,
            "n_benign": 1,
            "degenerate": False,
        }
    )


# ---------------------------------------------------------------------------
# Counts and scalar metrics
# ---------------------------------------------------------------------------

class TestConfusionCounts:
    def test_from_predictions(self):
        predicted = [True, True, False, False, True]
        truth = [True, False, True, False, True]
        c = ConfusionCounts.from_predictions(predicted, truth)
        assert (c.tp, c.fp, c.tn, c.fn) == (2, 1, 1, 1)
        assert c.total == 5

    def test_mismatched_lengths(self):
        with pytest.raises(ValueError):
            ConfusionCounts.from_predictions([True], [True, False])


class TestMetricConventions:
    def test_precision_none_when_nothing_declared(self):
        c = ConfusionCounts(tp=0, fp=0, tn=5, fn=3)
        assert precision(c) is None
        assert recall(c) == 0.0

    def test_recall_none_when_no_positives(self):
        c = ConfusionCounts(tp=0, fp=2, tn=5, fn=0)
        assert recall(c) is None
        assert precision(c) == 0.0

    def test_f1_zero_when_either_undefined(self):
        assert f1_from_counts(ConfusionCounts(tp=0, fp=0, tn=5, fn=3)) == 0.0
        assert f1_from_counts(ConfusionCounts(tp=0, fp=2, tn=5, fn=0)) == 0.0
        assert f1_from_counts(ConfusionCounts(tp=0, fp=1, tn=1, fn=1)) == 0.0

    def test_perfect_scores(self):
        c = ConfusionCounts(tp=4, fp=0, tn=6, fn=0)
        assert precision(c) == 1.0
        assert recall(c) == 1.0
        assert f1_from_counts(c) == 1.0

    def test_agrees_with_sklearn_when_defined(self):
        rng = np.random.default_rng(0)
        for _ in range(60):
            n = int(rng.integers(2, 40))
            predicted = rng.random(n) < 0.5
            truth = rng.random(n) < 0.5
            c = ConfusionCounts.from_predictions(predicted, truth)
            p, r = precision(c), recall(c)
            if p is not None:
                assert p == pytest.approx(
                    precision_score(truth, predicted, zero_division=np.nan)
                )
            if r is not None:
                assert r == pytest.approx(
                    recall_score(truth, predicted, zero_division=np.nan)
                )
            assert f1_score(predicted, truth) == pytest.approx(
                sk_f1(truth, predicted, zero_division=0)
            )

    def test_dual_route_f1_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(40):
            predicted = rng.random(10) < 0.5
            truth = rng.random(10) < 0.5
            c = ConfusionCounts.from_predictions(predicted, truth)
            assert f1_score(predicted, truth) == f1_from_counts(c)


class TestPercentHalfUp:
    @pytest.mark.parametrize(
        "fraction,expected",
        [
            (0.915, 92),
            (0.914, 91),
            (0.926, 93),
            (0.125, 13),
            (0.0, 0),
            (1.0, 100),
            (0.005, 1),
            (0.004999, 0),
            (0.995, 100),
        ],
    )
    def test_frozen_values(self, fraction, expected):
        assert percent_half_up(fraction) == expected

    def test_half_rounds_up_not_to_even(self):
        # 0.125 and 0.625 are exact binary fractions; round-half-even would
        # give 12 and 62 here
        assert percent_half_up(0.125) == 13
        assert percent_half_up(0.625) == 63


# ---------------------------------------------------------------------------
# evaluate()
# ---------------------------------------------------------------------------

def mixed_vectors():
    """4 adversarial (low unfiltered score), 4 benign; one benign is a FP."""
    rows = [
        vector((50, 50, 50, 50, 50), True, "yes", "no"),
        vector((100, 50, 50, 50, 50), True, "yes", "stop"),
        vector((100, 50, 50, 50, 50), True, "go", "no"),
        vector((2500, 50, 50, 50, 50), True, "go", "no"),  # missed
        vector((100, 2500, 2500, 2500, 2500), False),  # false positive
        vector((2500, 2500, 2500, 2500, 2500), False),
        vector((2000, 2500, 2500, 2500, 2500), False),
        vector((1000, 2500, 2500, 2500, 2500), False),
    ]
    return rows


class TestEvaluate:
    def test_counts_and_metrics(self):
        report = evaluate(unfiltered_detector(), mixed_vectors())
        assert (report.counts.tp, report.counts.fp) == (3, 1)
        assert (report.counts.tn, report.counts.fn) == (3, 1)
        assert report.precision == pytest.approx(0.75)
        assert report.recall == pytest.approx(0.75)
        assert report.f1 == pytest.approx(0.75)
        assert report.matrix is None

    def test_identity_fields(self):
        detector = unfiltered_detector()
        report = evaluate(detector, mixed_vectors())
        name, digest = detector_identity(detector)
        assert report.detector == name == "ThresholdDetector"
        assert report.config_digest == digest
        assert len(digest) == 12

    def test_identity_distinguishes_params(self):
        a = detector_identity(ThresholdDetector(band="unfiltered"))
        b = detector_identity(ThresholdDetector(band="0_2000"))
        assert a[0] == b[0]
        assert a[1] != b[1]

    def test_empty_test_set_rejected(self):
        with pytest.raises(ValueError):
            evaluate(unfiltered_detector(), [])

    def test_missing_ground_truth_rejected(self):
        rows = [vector((50, 50, 50, 50, 50))]
        with pytest.raises(ValueError):
            evaluate(unfiltered_detector(), rows)

    def test_with_matrix(self):
        report = evaluate(unfiltered_detector(), mixed_vectors(), with_matrix=True)
        assert isinstance(report.matrix, RecallMatrix)


# ---------------------------------------------------------------------------
# Recall matrix
# ---------------------------------------------------------------------------

class TestRecallMatrix:
    def test_per_pair_recall(self):
        matrix = recall_matrix(unfiltered_detector(), mixed_vectors())
        assert matrix.labels == ("go", "no", "stop", "yes")
        assert matrix.fraction("yes", "no") == 1.0
        assert matrix.fraction("yes", "stop") == 1.0
        assert matrix.fraction("go", "no") == 0.5  # one of two missed

    def test_absent_cells_are_none(self):
        matrix = recall_matrix(unfiltered_detector(), mixed_vectors())
        assert matrix.fraction("no", "yes") is None
        assert matrix.percent("stop", "go") is None

    def test_diagonal_is_always_absent(self):
        matrix = recall_matrix(unfiltered_detector(), mixed_vectors())
        for label in matrix.labels:
            assert matrix.fraction(label, label) is None

    def test_benign_rows_do_not_count(self):
        rows = mixed_vectors()
        matrix = recall_matrix(unfiltered_detector(), rows)
        assert sum(matrix.totals.values()) == 4

    def test_adversarial_rows_need_pair_labels(self):
        rows = [vector((50, 50, 50, 50, 50), True)]
        with pytest.raises(ValueError):
            recall_matrix(unfiltered_detector(), rows)

    def test_percent_uses_half_up(self):
        matrix = RecallMatrix(
            labels=("a", "b"),
            detected={("a", "b"): 11},
            totals={("a", "b"): 8},
        )
        # 11/8 = 1.375 -> 138 (contrived, but pins the rounding rule)
        assert matrix.percent("a", "b") == 138


# ---------------------------------------------------------------------------
# Report files
# ---------------------------------------------------------------------------

class TestReportFiles:
    def test_report_text(self, tmp_path):
        report = evaluate(unfiltered_detector(), mixed_vectors())
        out = tmp_path / "report.txt"
        write_report(out, report, provenance={"seed": 5, "classifier": "x"})
        lines = out.read_text().splitlines()
        assert lines[0] == "noiseflood evaluation report v1"
        assert "precision: 0.7500" in lines
        assert "recall: 0.7500" in lines
        assert "f1: 0.7500" in lines
        assert "classifier: x" in lines
        assert "seed: 5" in lines

    def test_report_shows_undefined(self, tmp_path):
        counts = ConfusionCounts(tp=0, fp=0, tn=2, fn=1)
        report = EvalReport(
            detector="X",
            config_digest="0" * 12,
            counts=counts,
            precision=precision(counts),
            recall=recall(counts),
            f1=f1_from_counts(counts),
        )
        out = tmp_path / "report.txt"
        write_report(out, report)
        text = out.read_text()
        assert "precision: undefined" in text
        assert "f1: 0.0000" in text

    def test_report_rerun_byte_identical(self, tmp_path):
        report = evaluate(unfiltered_detector(), mixed_vectors())
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        write_report(a, report, provenance={"seed": 1})
        write_report(b, report, provenance={"seed": 1})
        assert a.read_bytes() == b.read_bytes()

    def test_matrix_csv_layout(self, tmp_path):
        matrix = recall_matrix(unfiltered_detector(), mixed_vectors())
        out = tmp_path / "matrix.csv"
        write_recall_matrix_csv(out, matrix)
        lines = out.read_text().splitlines()
        assert lines[0] == "source,go,no,stop,yes"
        row = dict(zip(("go", "no", "stop", "yes"), lines[1].split(",")[1:]))
        assert row["no"] == "50"
        assert row["go"] == ""  # diagonal stays blank

    def test_matrix_csv_raw_fractions(self, tmp_path):
        matrix = recall_matrix(unfiltered_detector(), mixed_vectors())
        out = tmp_path / "matrix_raw.csv"
        write_recall_matrix_csv(out, matrix, raw=True)
        text = out.read_text()
        assert "0.5" in text
        assert "1.0" in text

    def test_matrix_csv_rerun_byte_identical(self, tmp_path):
        matrix = recall_matrix(unfiltered_detector(), mixed_vectors())
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_recall_matrix_csv(a, matrix)
        write_recall_matrix_csv(b, matrix)
        assert a.read_bytes() == b.read_bytes()

    def test_comparison_csv(self, tmp_path):
        defined = evaluate(unfiltered_detector(), mixed_vectors())
        counts = ConfusionCounts(tp=0, fp=0, tn=2, fn=1)
        undefined = EvalReport(
            detector="NullDetector",
            config_digest="0" * 12,
            counts=counts,
            precision=None,
            recall=0.0,
            f1=0.0,
        )
        out = tmp_path / "comparison.csv"
        write_comparison_csv(out, [defined, undefined])
        lines = out.read_text().splitlines()
        assert lines[0] == "method,precision,recall,f1"
        assert lines[1] == "ThresholdDetector,0.7500,0.7500,0.7500"
        assert lines[2] == "NullDetector,undefined,0.0000,0.0000"
