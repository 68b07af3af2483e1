"""Flooding-score search: the smallest noise bound that flips a prediction.

The search walks a grid of noise levels s, 2s, ... and at each level draws
fresh uniform integer noise, band-filters it, mixes it into the signal and
re-classifies. It stops at the first level whose noised signal is classified
differently from the original, or at the first grid point >= eps_max.

Reproducibility: the noise drawn at level eps is a pure function of
``(seed, eps, n)`` via a seed-sequence mix, so a run is deterministic for a
fixed seed, independent of worker scheduling, and two searches with different
step sizes see identical noise at any level they both visit. Per-band and
per-row sub-seeds are derived the same way from (seed, band index) and
(seed, row index).
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .audio import AudioSignal, Band, BAND_NAMES, CANONICAL_BANDS, band_pass, generate_noise, load_wav, mix
from .classifiers import Classifier
from .manifest import ManifestRow

DEFAULT_STEP = 50
DEFAULT_EPS_MAX = 2500


def derive_seed(base_seed: int, *indices: int) -> int:
    """Deterministically mix a base seed with index coordinates."""
    state = np.random.SeedSequence([int(base_seed), *[int(i) for i in indices]])
    return int(state.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class FloodingConfig:
    """Search parameters: step size, noise cap, band, and the RNG seed."""

    step: int = DEFAULT_STEP
    eps_max: int = DEFAULT_EPS_MAX
    band: Band = None
    seed: int = 0

    def __post_init__(self):
        if int(self.step) != self.step or self.step < 1:
            raise ValueError("step must be a positive integer")
        if int(self.eps_max) != self.eps_max or self.eps_max < self.step:
            raise ValueError("eps_max must be an integer >= step")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True)
class FloodingScore:
    """Result of one search: the flip level (or the cap) for one band."""

    epsilon: int
    flipped: bool
    band: Band = None
    calls_used: int | None = None


@dataclass(frozen=True)
class ScoreVector:
    """The five per-band flooding scores of one signal, in canonical order.

    Order is [unfiltered, 0-2000, 2000-4000, 4000-6000, 6000-8000] and is
    enforced structurally: construction fails for any other band sequence.
    """

    scores: tuple[FloodingScore, ...]
    is_adversarial: bool | None = None
    source: str | None = None
    target: str | None = None

    def __post_init__(self):
        scores = tuple(self.scores)
        if tuple(s.band for s in scores) != CANONICAL_BANDS:
            raise ValueError(
                "score vector must hold exactly the canonical bands in order: "
                + ", ".join(BAND_NAMES)
            )
        object.__setattr__(self, "scores", scores)

    @property
    def epsilons(self) -> tuple[int, ...]:
        return tuple(s.epsilon for s in self.scores)


def flooding_score(x: AudioSignal, m: Classifier, cfg: FloodingConfig) -> FloodingScore:
    """Search for the smallest noise bound on the step grid that flips m on x."""
    n = len(x)
    pred_orig = m.classify(x)
    pred = pred_orig
    calls = 1
    eps = 0
    flipped = False
    while eps < cfg.eps_max:
        eps += cfg.step
        rng = np.random.default_rng(derive_seed(cfg.seed, eps))
        noise = generate_noise(n, eps, rng)
        noise = band_pass(noise, cfg.band, x.sample_rate)
        pred = m.classify(mix(x, noise))
        calls += 1
        if pred != pred_orig:
            flipped = True
            break
    return FloodingScore(epsilon=eps, flipped=flipped, band=cfg.band, calls_used=calls)


def score_vector(
    x: AudioSignal,
    m: Classifier,
    base_cfg: FloodingConfig,
    is_adversarial: bool | None = None,
    source: str | None = None,
    target: str | None = None,
) -> ScoreVector:
    """Run the flooding search once per canonical band with independent sub-seeds."""
    scores = []
    for idx, band in enumerate(CANONICAL_BANDS):
        cfg = replace(base_cfg, band=band, seed=derive_seed(base_cfg.seed, idx))
        scores.append(flooding_score(x, m, cfg))
    return ScoreVector(
        scores=tuple(scores),
        is_adversarial=is_adversarial,
        source=source,
        target=target,
    )


@dataclass(frozen=True)
class RowScore:
    """One successfully scored manifest row."""

    row: ManifestRow
    vector: ScoreVector
    seed: int  # the row's derived sub-seed


@dataclass(frozen=True)
class RowFailure:
    row: ManifestRow
    error: str


@dataclass
class DatasetScores:
    """Per-row results of scoring a manifest, in manifest order."""

    rows: list[RowScore] = field(default_factory=list)
    failures: list[RowFailure] = field(default_factory=list)
    config: FloodingConfig | None = None

    @property
    def vectors(self) -> list[ScoreVector]:
        return [r.vector for r in self.rows]


def score_dataset(
    manifest: list[ManifestRow],
    m: Classifier,
    base_cfg: FloodingConfig,
    workers: int = 1,
) -> DatasetScores:
    """Score every manifest row; failures are recorded, never fatal.

    Row seeds are derived from (base seed, row index), so the output is
    identical for any worker count.
    """

    def one(indexed) -> RowScore:
        index, row = indexed
        row_seed = derive_seed(base_cfg.seed, index)
        signal = load_wav(row.resolved_path)
        vector = score_vector(
            signal,
            m,
            replace(base_cfg, seed=row_seed),
            is_adversarial=row.is_adversarial,
            source=row.source,
            target=row.target,
        )
        return RowScore(row=row, vector=vector, seed=row_seed)

    result = DatasetScores(config=base_cfg)
    indexed_rows = list(enumerate(manifest))
    if workers <= 1:
        outcomes = []
        for item in indexed_rows:
            try:
                outcomes.append(one(item))
            except Exception as exc:
                outcomes.append(RowFailure(row=item[1], error=str(exc)))
    else:
        def safe(item):
            try:
                return one(item)
            except Exception as exc:
                return RowFailure(row=item[1], error=str(exc))

        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(safe, indexed_rows))

    for outcome in outcomes:
        if isinstance(outcome, RowScore):
            result.rows.append(outcome)
        else:
            result.failures.append(outcome)
    return result


# ---------------------------------------------------------------------------
# Score CSV interchange format
# ---------------------------------------------------------------------------

SCORE_CSV_HEADER = (
    ["id", "path", "is_adversarial", "source", "target"]
    + [f"eps_{name}" for name in BAND_NAMES]
    + [f"flipped_{name}" for name in BAND_NAMES]
    + ["seed", "s", "eps_max"]
)


@dataclass(frozen=True)
class ScoreRecord:
    """One score CSV row: manifest identity plus the score vector and config."""

    id: str
    path: str
    vector: ScoreVector
    seed: int
    step: int
    eps_max: int


def write_score_csv(path, scores: DatasetScores, provenance: dict | None = None) -> None:
    """Write the score CSV; a leading ``#`` comment line carries provenance."""
    with open(path, "w", newline="") as fh:
        meta = {"format": "noiseflood-scores", "version": 1}
        if provenance:
            meta.update(provenance)
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(SCORE_CSV_HEADER)
        for rec in scores.rows:
            v = rec.vector
            writer.writerow(
                [
                    rec.row.id,
                    rec.row.path,
                    _format_bool(v.is_adversarial),
                    v.source or "",
                    v.target or "",
                ]
                + [s.epsilon for s in v.scores]
                + [_format_bool(s.flipped) for s in v.scores]
                + [rec.seed, scores.config.step, scores.config.eps_max]
            )


def read_score_csv(path) -> list[ScoreRecord]:
    """Read a score CSV back into records (comment lines are skipped)."""
    records = []
    with open(path, newline="") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(rows)
    missing = set(SCORE_CSV_HEADER) - set(reader.fieldnames or [])
    if missing:
        raise ValueError(f"{path}: score CSV is missing columns {sorted(missing)}")
    for row in reader:
        scores = tuple(
            FloodingScore(
                epsilon=int(row[f"eps_{name}"]),
                flipped=_parse_bool(row[f"flipped_{name}"]),
                band=band,
            )
            for name, band in zip(BAND_NAMES, CANONICAL_BANDS)
        )
        vector = ScoreVector(
            scores=scores,
            is_adversarial=_parse_bool(row["is_adversarial"]),
            source=row["source"] or None,
            target=row["target"] or None,
        )
        records.append(
            ScoreRecord(
                id=row["id"],
                path=row["path"],
                vector=vector,
                seed=int(row["seed"]),
                step=int(row["s"]),
                eps_max=int(row["eps_max"]),
            )
        )
    return records


def read_score_provenance(path) -> dict:
    """The JSON provenance from a score CSV's leading comment, or {}."""
    with open(path) as fh:
        first = fh.readline()
    if not first.startswith("# "):
        return {}
    try:
        meta = json.loads(first[2:])
    except json.JSONDecodeError:
        return {}
    return meta if isinstance(meta, dict) else {}


def max_loop_calls(cfg: FloodingConfig) -> int:
    """Upper bound on loop classifier calls: ceil(eps_max / step)."""
    return math.ceil(cfg.eps_max / cfg.step)


def _format_bool(value: bool | None) -> str:
    if value is None:
        return ""
    return "true" if value else "false"


def _parse_bool(text: str) -> bool | None:
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"bad boolean {text!r}")
