"""Audio classifiers the flooding engine queries.

Two implementations are provided: a deterministic band-energy toy classifier
for desk-scale experiments, and a subprocess adapter that bridges to any
external model speaking a line-oriented wire protocol:

    handshake:  child emits ``VOCAB <label> <label> ...`` then ``READY``
    request:    parent writes ``CLASSIFY <absolute path to 16-bit mono WAV>``
    response:   child writes ``LABEL <label>`` (or ``ERROR <reason>``)
    shutdown:   parent writes ``QUIT``

External models must be deterministic: the flooding search caches the original
prediction, so a model that answers differently on identical audio produces
undefined flooding scores.
"""

from __future__ import annotations

import queue
import shlex
import subprocess
import tempfile
import threading
from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np

from .audio import AudioSignal, save_wav


class ClassifierError(RuntimeError):
    """The classifier could not produce a label (process died, I/O failure)."""


class ProtocolError(ClassifierError):
    """An external classifier violated the wire protocol."""


class Classifier(ABC):
    """A deterministic mapping from audio to a label in a fixed vocabulary.

    ``calls`` counts classify invocations; the flooding engine's call-count
    bound is verified against it.
    """

    labels: tuple[str, ...] = ()

    def __init__(self):
        self.calls = 0
        self._count_lock = threading.Lock()

    def classify(self, signal: AudioSignal) -> str:
        if not self.labels:
            raise ValueError("classifier has an empty vocabulary")
        with self._count_lock:
            self.calls += 1
        return self._classify(signal)

    @abstractmethod
    def _classify(self, signal: AudioSignal) -> str: ...

    def close(self) -> None:  # pragma: no cover - default no-op
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


class BandEnergyToyClassifier(Classifier):
    """Labels audio by the sub-band holding the most weighted spectral energy.

    ``band_edges`` are K+1 ascending Hz cut points tiling [0, Nyquist]; band i
    spans [edges[i], edges[i+1]) with the final band closed at the top edge.
    Ties go to the lowest band index, so all-zero audio gets ``labels[0]``.

    The decision is scale-invariant (argmax of energies), and it flips exactly
    when noise flooded into a rival band lifts that band's weighted energy
    above the currently dominant band's, which makes synthetic fragile and
    robust inputs analytically constructible.
    """

    def __init__(self, band_edges, labels, weights=None):
        super().__init__()
        edges = tuple(float(e) for e in band_edges)
        if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("band_edges must be ascending with at least 2 entries")
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(edges) - 1:
            raise ValueError("need exactly one label per sub-band")
        if weights is None:
            weights = (1.0,) * len(labels)
        weights = tuple(float(w) for w in weights)
        if len(weights) != len(labels):
            raise ValueError("need exactly one weight per sub-band")
        self.band_edges = edges
        self.labels = labels
        self.weights = weights

    @classmethod
    def default(cls) -> "BandEnergyToyClassifier":
        """Four equal bands over 0-8000 Hz, one label per band."""
        return cls((0, 2000, 4000, 6000, 8000), ("low", "midlow", "midhigh", "high"))

    def band_energies(self, signal: AudioSignal) -> np.ndarray:
        spectrum = np.abs(np.fft.rfft(signal.samples.astype(np.float64))) ** 2
        freqs = np.fft.rfftfreq(len(signal), d=1.0 / signal.sample_rate)
        energies = np.empty(len(self.labels))
        last = len(self.labels) - 1
        for i, (lo, hi) in enumerate(zip(self.band_edges, self.band_edges[1:])):
            in_band = (freqs >= lo) & ((freqs <= hi) if i == last else (freqs < hi))
            energies[i] = self.weights[i] * spectrum[in_band].sum()
        return energies

    def _classify(self, signal: AudioSignal) -> str:
        return self.labels[int(np.argmax(self.band_energies(signal)))]


class ExternalClassifier(Classifier):
    """Adapter around a child process speaking the wire protocol.

    Calls are serialized internally (one in-flight request per process), so a
    handle may be shared across threads. Audio is handed over as a temporary
    WAV file path per request.
    """

    def __init__(self, command, timeout: float = 30.0):
        super().__init__()
        if isinstance(command, str):
            command = shlex.split(command)
        self.command = list(command)
        self.timeout = timeout
        self._lock = threading.Lock()
        self._lines: queue.Queue[str | None] = queue.Queue()
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ClassifierError(f"failed to spawn {self.command!r}: {exc}") from exc
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        self._handshake()

    def _pump(self):
        for line in self._proc.stdout:
            self._lines.put(line.rstrip("\n"))
        self._lines.put(None)  # EOF sentinel

    def _read_line(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise ClassifierError(
                f"no response from {self.command[0]} within {self.timeout} s"
            ) from None
        if line is None:
            raise ClassifierError(f"{self.command[0]} closed its output stream")
        return line

    def _send(self, line: str):
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ClassifierError(f"{self.command[0]} is not accepting requests") from exc

    def _handshake(self):
        first = self._read_line()
        if not first.startswith("VOCAB "):
            raise ProtocolError(f"expected VOCAB line, got {first!r}")
        vocab = tuple(first.split()[1:])
        if not vocab:
            raise ProtocolError("VOCAB line declared an empty vocabulary")
        ready = self._read_line()
        if ready != "READY":
            raise ProtocolError(f"expected READY, got {ready!r}")
        self.labels = vocab

    def _classify(self, signal: AudioSignal) -> str:
        with self._lock:
            with tempfile.NamedTemporaryFile(suffix=".wav", delete=False) as tmp:
                wav_path = Path(tmp.name)
            try:
                save_wav(signal, wav_path)
                self._send(f"CLASSIFY {wav_path.resolve()}")
                reply = self._read_line()
            finally:
                wav_path.unlink(missing_ok=True)
        if reply.startswith("LABEL "):
            label = reply[len("LABEL "):].strip()
            if label not in self.labels:
                raise ProtocolError(
                    f"label {label!r} is outside the declared vocabulary {self.labels}"
                )
            return label
        if reply.startswith("ERROR "):
            raise ClassifierError(f"classifier reported: {reply[len('ERROR '):]}")
        raise ProtocolError(f"unexpected response {reply!r}")

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._send("QUIT")
            except ClassifierError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()


def spawn_external(command, timeout: float = 30.0) -> ExternalClassifier:
    """Start an external classifier process and complete its handshake."""
    return ExternalClassifier(command, timeout=timeout)


def resolve_classifier(spec: str, timeout: float = 30.0) -> Classifier:
    """Build a classifier from a CLI spec: ``builtin:band-energy`` or ``exec:<cmd>``."""
    if spec == "builtin:band-energy":
        return BandEnergyToyClassifier.default()
    if spec.startswith("exec:"):
        return spawn_external(spec[len("exec:"):], timeout=timeout)
    raise ValueError(
        f"unknown classifier spec {spec!r}; use builtin:band-energy or exec:<command>"
    )
