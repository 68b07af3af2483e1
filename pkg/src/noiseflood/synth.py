"""Synthetic fragile/robust signals for desk-scale end-to-end runs.

Signals are sums of bin-aligned tones, one per band of the default
:class:`~noiseflood.classifiers.BandEnergyToyClassifier`, sized so that the
flooding outcome is analytically known in advance.

For a length-``n`` signal, a tone of amplitude ``A`` contributes one-sided
spectral energy ``A^2 n^2 / 4`` to its band, while uniform integer noise of
bound ``eps`` flooded through one quarter-band filter adds expected energy
``n^2 eps^2 / 24``. Flooding a rival band therefore flips the toy
classifier's argmax at

    eps* = sqrt(6 * (A_dominant^2 - A_rival^2))

"Fragile" signals place the dominant tone barely above the strongest rival
so eps* lands inside the search grid (they flip early, like adversarial
examples whose perturbation is drowned out); "robust" signals give the
dominant tone a wide margin so eps* exceeds the grid and no flood flips them.
Flooding the dominant band itself only reinforces the argmax, so that band's
score stays at the cap. Everything is derived from one seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import CANONICAL_SAMPLE_RATE, AudioSignal, save_wav
from .classifiers import BandEnergyToyClassifier
from .flooding import derive_seed
from .manifest import ManifestRow, write_manifest

SYNTH_N = 1024

# mid-band tone frequencies, all bin-aligned for n=1024 at 16 kHz
TONE_HZ = (1000.0, 3000.0, 5000.0, 7000.0)

FRAGILE_RIVAL_AMP = 300.0
FRAGILE_EPS_RANGE = (150.0, 900.0)
ROBUST_DOMINANT_AMP = 1500.0
ROBUST_RIVAL_RANGE = (150.0, 250.0)


@dataclass(frozen=True)
class SynthExample:
    signal: AudioSignal
    is_adversarial: bool
    source: str
    target: str


def make_tone(
    freq_hz: float,
    amplitude: float,
    n: int = SYNTH_N,
    sample_rate: int = CANONICAL_SAMPLE_RATE,
) -> np.ndarray:
    """Float sine tone; bin-aligned frequencies give a single-bin spectrum."""
    t = np.arange(n) / sample_rate
    return amplitude * np.sin(2.0 * np.pi * freq_hz * t)


def _tonal_signal(amplitudes) -> AudioSignal:
    total = np.zeros(SYNTH_N)
    for freq, amp in zip(TONE_HZ, amplitudes):
        total += make_tone(freq, amp)
    samples = np.rint(total).astype(np.int16)
    return AudioSignal(samples=samples, sample_rate=CANONICAL_SAMPLE_RATE)


def fragile_example(rng: np.random.Generator, dominant: int, labels) -> SynthExample:
    """Signal whose dominant tone barely beats its rivals.

    The flooding level that flips the strongest rival band is drawn from
    FRAGILE_EPS_RANGE, well inside the default 50..2500 grid.
    """
    eps_star = rng.uniform(*FRAGILE_EPS_RANGE)
    amplitudes = FRAGILE_RIVAL_AMP + rng.uniform(0.0, 20.0, size=len(TONE_HZ))
    rivals = [b for b in range(len(TONE_HZ)) if b != dominant]
    strongest = max(rivals, key=lambda b: amplitudes[b])
    amplitudes[dominant] = np.sqrt(amplitudes[strongest] ** 2 + eps_star**2 / 6.0)
    return SynthExample(
        signal=_tonal_signal(amplitudes),
        is_adversarial=True,
        source=labels[strongest],
        target=labels[dominant],
    )


def robust_example(rng: np.random.Generator, dominant: int) -> SynthExample:
    """Signal whose dominant tone has a wide margin: no flood flips it.

    Worst case (rival amplitude 250) still needs eps ~ 3625 to flip, beyond
    the default 2500 cap.
    """
    amplitudes = rng.uniform(*ROBUST_RIVAL_RANGE, size=len(TONE_HZ))
    amplitudes[dominant] = ROBUST_DOMINANT_AMP
    return SynthExample(
        signal=_tonal_signal(amplitudes),
        is_adversarial=False,
        source="",
        target="",
    )


def synthetic_dataset(
    n_fragile: int, n_robust: int, seed: int = 0
) -> list[SynthExample]:
    """Deterministic mixed dataset, shuffled, dominant band cycling per row."""
    labels = BandEnergyToyClassifier.default().labels
    examples = []
    for i in range(n_fragile):
        rng = np.random.default_rng(derive_seed(seed, 0, i))
        examples.append(fragile_example(rng, i % len(TONE_HZ), labels))
    for j in range(n_robust):
        rng = np.random.default_rng(derive_seed(seed, 1, j))
        examples.append(robust_example(rng, j % len(TONE_HZ)))
    order = np.random.default_rng(derive_seed(seed, 2)).permutation(len(examples))
    return [examples[k] for k in order]


def materialize(examples, directory) -> Path:
    """Write one WAV per example plus a manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rows = []
    for index, example in enumerate(examples):
        name = f"synth_{index:04d}.wav"
        save_wav(example.signal, directory / name)
        rows.append(
            ManifestRow(
                id=f"synth_{index:04d}",
                path=name,
                is_adversarial=example.is_adversarial,
                source=example.source,
                target=example.target,
                resolved_path=directory / name,
            )
        )
    manifest_path = directory / "manifest.csv"
    write_manifest(manifest_path, rows)
    return manifest_path
