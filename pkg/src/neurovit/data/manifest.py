"""Dataset manifests and subject-stratified splitting.

A manifest is the list of (subject_id, path, label, split) records that
drives every experiment.  Splits are always assigned at the subject
level: all scans of one subject land in the same fold, so no identity
leaks between train and evaluation data.

On disk a manifest is UTF-8 CSV with header ``subject_id,path,label,split``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .. import prng
from ..errors import ContractError, InfeasibleSplitError

SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class ManifestEntry:
    subject_id: str
    path: str
    label: int
    split: str = "train"

    def __post_init__(self):
        if not self.subject_id:
            raise ContractError("subject_id must be non-empty")
        if not self.path:
            raise ContractError("path must be non-empty")
        if self.label not in (0, 1):
            raise ContractError(f"label must be 0 or 1, got {self.label!r}")
        if self.split not in SPLITS:
            raise ContractError(f"split must be one of {SPLITS}, got {self.split!r}")


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        seen: dict[str, str] = {}
        for e in self.entries:
            prior = seen.setdefault(e.subject_id, e.split)
            if prior != e.split:
                raise ContractError(
                    f"subject {e.subject_id!r} appears in splits "
                    f"{prior!r} and {e.split!r}"
                )

    def __len__(self) -> int:
        return len(self.entries)

    def split(self, name: str) -> tuple[ManifestEntry, ...]:
        if name not in SPLITS:
            raise ContractError(f"unknown split {name!r}")
        return tuple(e for e in self.entries if e.split == name)

    def subjects(self, split: str | None = None) -> tuple[str, ...]:
        entries = self.entries if split is None else self.split(split)
        return tuple(sorted({e.subject_id for e in entries}))

    def replace_entries(self, entries: Iterable[ManifestEntry]) -> "DatasetManifest":
        return DatasetManifest(tuple(entries))


def largest_remainder_counts(n: int, fractions: Sequence[float]) -> list[int]:
    """Apportion ``n`` items to ``fractions`` by the largest-remainder rule.

    Remainder ties are broken by position (earlier fraction wins), which
    keeps the result independent of input ordering elsewhere.
    """
    quotas = [n * f for f in fractions]
    counts = [math.floor(q) for q in quotas]
    remainders = [q - c for q, c in zip(quotas, counts)]
    short = n - sum(counts)
    order = sorted(range(len(fractions)), key=lambda i: (-remainders[i], i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def split_by_subject(
    entries: Iterable[ManifestEntry],
    fractions: tuple[float, float, float],
    seed: int,
) -> DatasetManifest:
    """Assign train/val/test splits at the subject level.

    Subject counts per split follow ``fractions`` under largest-remainder
    rounding.  The assignment permutes lexicographically sorted subject
    ids with a seeded stream, so it is deterministic and independent of
    the order of ``entries``.
    """
    entries = tuple(entries)
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise ContractError(f"need 3 positive fractions, got {fractions}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ContractError(f"fractions must sum to 1, got sum {sum(fractions)}")

    subjects = sorted({e.subject_id for e in entries})
    if len(subjects) < len(SPLITS):
        raise InfeasibleSplitError(
            f"{len(subjects)} subjects cannot populate {len(SPLITS)} splits"
        )

    rng = prng.stream(seed, "split")
    order = [subjects[i] for i in rng.permutation(len(subjects))]
    counts = largest_remainder_counts(len(subjects), fractions)

    assignment: dict[str, str] = {}
    take = 0
    for split_name, count in zip(SPLITS, counts):
        for sid in order[take : take + count]:
            assignment[sid] = split_name
        take += count

    return DatasetManifest(
        tuple(
            ManifestEntry(e.subject_id, e.path, e.label, assignment[e.subject_id])
            for e in entries
        )
    )


def save_manifest(path, manifest: DatasetManifest) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subject_id", "path", "label", "split"])
        for e in manifest.entries:
            writer.writerow([e.subject_id, e.path, e.label, e.split])


def load_manifest(path) -> DatasetManifest:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["subject_id", "path", "label", "split"]:
            raise ContractError(f"{path}: unexpected manifest header {header}")
        entries = []
        for row in reader:
            if not row:
                continue
            sid, p, label, split = row
            entries.append(ManifestEntry(sid, p, int(label), split))
    return DatasetManifest(tuple(entries))
