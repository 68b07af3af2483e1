import sys
from pathlib import Path

import numpy as np
import pytest

from noiseflood import AudioSignal
from noiseflood.classifiers import Classifier
from noiseflood.synth import make_tone, materialize, synthetic_dataset

TESTS_DIR = Path(__file__).parent
STUB = TESTS_DIR / "stub_classifier.py"

SYNTH_SEED = 11


def stub_command(*args: str) -> str:
    return " ".join([sys.executable, str(STUB), *args])


def tone_signal(freq_hz, amplitude, n=1024, sample_rate=16000) -> AudioSignal:
    samples = np.rint(make_tone(freq_hz, amplitude, n, sample_rate)).astype(np.int16)
    return AudioSignal(samples=samples, sample_rate=sample_rate)


class NeverFlipClassifier(Classifier):
    """Constant label: the flooding loop always exhausts the grid."""

    labels = ("same",)

    def _classify(self, signal):
        return "same"


class FlipOnAnyNoiseClassifier(Classifier):
    """Flips as soon as the audio differs from the reference signal."""

    labels = ("orig", "other")

    def __init__(self, reference: AudioSignal):
        super().__init__()
        self._reference = reference.samples.copy()

    def _classify(self, signal):
        return "orig" if np.array_equal(signal.samples, self._reference) else "other"


class RecordingClassifier(Classifier):
    """Never flips, but keeps a copy of every signal it was shown."""

    labels = ("same",)

    def __init__(self):
        super().__init__()
        self.seen: list[np.ndarray] = []

    def _classify(self, signal):
        self.seen.append(signal.samples.copy())
        return "same"


@pytest.fixture(scope="session")
def synth400(tmp_path_factory):
    """200 fragile + 200 robust synthetic signals on disk, with manifest."""
    directory = tmp_path_factory.mktemp("synth400")
    examples = synthetic_dataset(200, 200, seed=SYNTH_SEED)
    manifest = materialize(examples, directory)
    return manifest


@pytest.fixture()
def small_synth(tmp_path):
    """A quick 12-signal set for CLI round-trips."""
    examples = synthetic_dataset(6, 6, seed=3)
    return materialize(examples, tmp_path / "data")
