"""Dataset manifests: stratified train/test splits and the on-disk format.

Manifest files are UTF-8 CSV with header `path,label,split`, preceded by a
`#`-prefixed `key = value` preamble recording the label order and the
split seed. Paths are stored with forward slashes, relative to the
manifest's directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInput, ParseError


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: str
    split: str  # "train" | "test"


@dataclass(frozen=True)
class DatasetManifest:
    entries: list[ManifestEntry]
    label_set: list[str]
    seed: int

    def paths_for(self, split: str) -> list[ManifestEntry]:
        return [e for e in self.entries if e.split == split]

    def counts(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for e in self.entries:
            out.setdefault(e.label, {"train": 0, "test": 0})[e.split] += 1
        return out


def build_manifest(
    labeled_paths: list[tuple[str, str]],
    label_set: list[str],
    train_fraction: float,
    seed: int,
) -> DatasetManifest:
    """Assign a stratified train/test split to (path, label) pairs.

    Per class, round(n * train_fraction) entries go to train, chosen by a
    seeded shuffle; entries keep their input order in the result.
    """
    if not 0 < train_fraction < 1:
        raise InvalidInput(f"train_fraction must be in (0, 1), got {train_fraction}")
    if len(set(label_set)) != len(label_set):
        raise InvalidInput("label_set contains duplicates")
    for label in label_set:
        if "," in label or not label:
            raise InvalidInput(f"bad label name {label!r}")
    known = set(label_set)
    for path, label in labeled_paths:
        if label not in known:
            raise InvalidInput(f"{path}: label {label!r} not in label set {label_set}")

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    split_of = {}
    for label in label_set:
        idx = [i for i, (_, lab) in enumerate(labeled_paths) if lab == label]
        order = rng.permutation(len(idx))
        n_train = int(np.floor(len(idx) * train_fraction + 0.5))
        train_positions = {idx[j] for j in order[:n_train]}
        for i in idx:
            split_of[i] = "train" if i in train_positions else "test"

    entries = [
        ManifestEntry(path, label, split_of[i])
        for i, (path, label) in enumerate(labeled_paths)
    ]
    return DatasetManifest(entries, list(label_set), seed)


def save_manifest(manifest: DatasetManifest, path) -> None:
    lines = [
        f"# label_set = {','.join(manifest.label_set)}",
        f"# seed = {manifest.seed}",
        "path,label,split",
    ]
    lines += [f"{e.path},{e.label},{e.split}" for e in manifest.entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_manifest(path) -> DatasetManifest:
    text = Path(path).read_text(encoding="utf-8")
    label_set: list[str] | None = None
    seed: int | None = None
    entries = []
    saw_header = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, _, value = body.partition("=")
            key, value = key.strip(), value.strip()
            if key == "label_set":
                label_set = value.split(",")
            elif key == "seed":
                try:
                    seed = int(value)
                except ValueError:
                    raise ParseError(f"bad seed {value!r}", line=lineno) from None
            else:
                raise ParseError(f"unknown preamble key {key!r}", line=lineno)
            continue
        if not saw_header:
            if line != "path,label,split":
                raise ParseError("expected header path,label,split", line=lineno)
            saw_header = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"expected 3 fields, got {len(parts)}", line=lineno)
        p, label, split = parts
        if split not in ("train", "test"):
            raise ParseError(f"bad split {split!r}", line=lineno)
        entries.append(ManifestEntry(p, label, split))
    if label_set is None or seed is None or not saw_header:
        raise ParseError("manifest missing preamble or header")
    known = set(label_set)
    for e in entries:
        if e.label not in known:
            raise ParseError(f"entry label {e.label!r} not in label_set")
    return DatasetManifest(entries, label_set, seed)
