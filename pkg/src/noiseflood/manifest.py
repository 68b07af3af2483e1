"""Dataset manifests: CSV rows pointing at WAV files with ground truth.

Format (version 1): a ``# noiseflood-manifest v1`` comment line, then a CSV
with columns ``id,path,is_adversarial,source,target``. Paths are relative to
the manifest file. Adversarial rows must carry a source and a distinct target
label; benign rows may leave target empty.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

MANIFEST_MAGIC = "# noiseflood-manifest v1"
MANIFEST_HEADER = ["id", "path", "is_adversarial", "source", "target"]


@dataclass(frozen=True)
class ManifestRow:
    id: str
    path: str
    is_adversarial: bool
    source: str | None = None
    target: str | None = None
    resolved_path: Path | None = None


class ManifestError(ValueError):
    pass


def read_manifest(path) -> list[ManifestRow]:
    path = Path(path)
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != MANIFEST_MAGIC:
            raise ManifestError(
                f"{path}: expected leading '{MANIFEST_MAGIC}' line, got {first!r}"
            )
        reader = csv.DictReader(fh)
        if reader.fieldnames != MANIFEST_HEADER:
            raise ManifestError(
                f"{path}: expected columns {MANIFEST_HEADER}, got {reader.fieldnames}"
            )
        rows = []
        seen_ids = set()
        for lineno, row in enumerate(reader, start=3):
            row_id = row["id"].strip()
            if not row_id:
                raise ManifestError(f"{path}:{lineno}: empty id")
            if row_id in seen_ids:
                raise ManifestError(f"{path}:{lineno}: duplicate id {row_id!r}")
            seen_ids.add(row_id)
            adv = row["is_adversarial"].strip().lower()
            if adv not in ("true", "false"):
                raise ManifestError(
                    f"{path}:{lineno}: is_adversarial must be true or false"
                )
            is_adv = adv == "true"
            source = row["source"].strip() or None
            target = row["target"].strip() or None
            if is_adv:
                if not source or not target:
                    raise ManifestError(
                        f"{path}:{lineno}: adversarial rows need source and target"
                    )
                if source == target:
                    raise ManifestError(
                        f"{path}:{lineno}: adversarial source equals target ({source!r})"
                    )
            rows.append(
                ManifestRow(
                    id=row_id,
                    path=row["path"],
                    is_adversarial=is_adv,
                    source=source,
                    target=target,
                    resolved_path=(path.parent / row["path"]).resolve(),
                )
            )
    return rows


def write_manifest(path, rows: list[ManifestRow]) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(MANIFEST_MAGIC + "\n")
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row.id,
                    row.path,
                    "true" if row.is_adversarial else "false",
                    row.source or "",
                    row.target or "",
                ]
            )
