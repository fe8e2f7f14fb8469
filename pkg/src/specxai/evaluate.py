"""Confusion matrices, accuracy, and pairwise misclassification asymmetry.

Convention, stated in every emitted file: rows are true labels, columns
are predicted labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidInput
from .pipeline import load_split, normalize_images

ORIENTATION_NOTE = "# rows = true label, columns = predicted label"


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # [K, K] int64
    label_set: list[str]

    def __post_init__(self):
        k = len(self.label_set)
        if self.counts.shape != (k, k):
            raise InvalidInput(f"counts shape {self.counts.shape} != ({k}, {k})")
        if (self.counts < 0).any():
            raise InvalidInput("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return int(np.trace(self.counts)) / self.total


@dataclass(frozen=True)
class ClassMetric:
    label: str
    value: float
    defined: bool  # False when the denominator was zero


@dataclass(frozen=True)
class PairAsymmetry:
    label_a: str
    label_b: str
    a_to_b: int
    b_to_a: int
    ratio: float
    flagged: bool  # one direction has zero counts


@dataclass(frozen=True)
class EvalReport:
    overall_accuracy: float
    n_samples: int
    recalls: list[ClassMetric]
    precisions: list[ClassMetric]
    asymmetry: list[PairAsymmetry]
    runtime_seconds: float


def evaluate(checkpoint, manifest, manifest_root, split: str = "test", batch_size: int = 64):
    """Score a manifest split with a checkpointed model."""
    if list(manifest.label_set) != list(checkpoint.label_set):
        raise ConfigError(
            f"manifest labels {manifest.label_set} != checkpoint labels "
            f"{checkpoint.label_set}"
        )
    if not manifest.paths_for(split):
        raise ConfigError(f"manifest has no entries in split {split!r}")
    images, labels, _ = load_split(manifest, manifest_root, checkpoint.pipeline, split)
    images = normalize_images(images, checkpoint.norm_mean, checkpoint.norm_std)
    net = checkpoint.build_network()
    k = len(checkpoint.label_set)
    counts = np.zeros((k, k), dtype=np.int64)
    for start in range(0, images.shape[0], batch_size):
        batch = slice(start, start + batch_size)
        logits, _ = net.forward(images[batch])
        predictions = logits.argmax(axis=1)
        np.add.at(counts, (labels[batch], predictions), 1)
    return ConfusionMatrix(counts, list(checkpoint.label_set))


def summarize(cm: ConfusionMatrix, runtime_seconds: float = 0.0) -> EvalReport:
    """Accuracy, per-class recall/precision, and pairwise asymmetry."""
    if cm.total == 0:
        raise InvalidInput("cannot summarize an empty confusion matrix")
    counts = cm.counts
    recalls, precisions = [], []
    for i, label in enumerate(cm.label_set):
        row = int(counts[i].sum())
        col = int(counts[:, i].sum())
        diag = int(counts[i, i])
        recalls.append(ClassMetric(label, diag / row if row else 0.0, row > 0))
        precisions.append(ClassMetric(label, diag / col if col else 0.0, col > 0))
    asymmetry = []
    for i in range(len(cm.label_set)):
        for j in range(i + 1, len(cm.label_set)):
            a_to_b = int(counts[i, j])
            b_to_a = int(counts[j, i])
            ratio = max(a_to_b, b_to_a) / max(1, min(a_to_b, b_to_a))
            asymmetry.append(
                PairAsymmetry(
                    cm.label_set[i],
                    cm.label_set[j],
                    a_to_b,
                    b_to_a,
                    ratio,
                    flagged=min(a_to_b, b_to_a) == 0,
                )
            )
    return EvalReport(cm.accuracy, cm.total, recalls, precisions, asymmetry, runtime_seconds)


def save_confusion_csv(cm: ConfusionMatrix, path) -> None:
    lines = [ORIENTATION_NOTE, "true," + ",".join(cm.label_set)]
    for i, label in enumerate(cm.label_set):
        lines.append(label + "," + ",".join(str(int(c)) for c in cm.counts[i]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_report(report: EvalReport, path) -> None:
    """key = value block plus the asymmetry table; excludes runtime so
    identical runs produce identical bytes."""
    lines = [ORIENTATION_NOTE]
    lines.append(f"overall_accuracy = {report.overall_accuracy!r}")
    lines.append(f"n_samples = {report.n_samples}")
    for m in report.recalls:
        suffix = "" if m.defined else "  # undefined: empty row"
        lines.append(f"recall_{m.label} = {m.value!r}{suffix}")
    for m in report.precisions:
        suffix = "" if m.defined else "  # undefined: never predicted"
        lines.append(f"precision_{m.label} = {m.value!r}{suffix}")
    lines.append("")
    lines.append("label_a,label_b,a_to_b,b_to_a,ratio,flagged")
    for p in report.asymmetry:
        lines.append(
            f"{p.label_a},{p.label_b},{p.a_to_b},{p.b_to_a},{p.ratio!r},"
            f"{int(p.flagged)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
