"""Train/test splitting, confusion matrices, and precision/recall/F1 reports."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .audio import DatasetManifest
from .errors import EmptyClass, EmptyMatrix, LabelMismatch

TRAIN = "train"
TEST = "test"


def round_half_up(x: float, digits: int = 0) -> float:
    """Decimal rounding with halves up; used for counts and printed metrics."""
    factor = 10 ** digits
    return np.floor(x * factor + 0.5) / factor


@dataclass
class SplitManifest:
    """Per-label train/test assignment; paths are relative to root."""

    root: str
    labels: dict[str, dict[str, list[str]]]  # label -> {"train": [...], "test": [...]}
    seed: int
    ratio: float
    per_label_ratio: dict[str, float] = field(default_factory=dict)
    sample_rate_hz: int = 16000

    def test_fraction(self, label: str) -> float:
        n_train = len(self.labels[label][TRAIN])
        n_test = len(self.labels[label][TEST])
        return n_test / (n_train + n_test)

    def clips(self, split: str) -> list[tuple[str, str]]:
        """(relative path, label) pairs for one split, in manifest order."""
        out = []
        for label in sorted(self.labels):
            for path in self.labels[label][split]:
                out.append((path, label))
        return out

    def to_json(self) -> str:
        return json.dumps({
            "root": self.root,
            "seed": self.seed,
            "ratio": self.ratio,
            "per_label_ratio": self.per_label_ratio,
            "sample_rate_hz": self.sample_rate_hz,
            "labels": self.labels,
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, root: Optional[str] = None) -> "SplitManifest":
        d = json.loads(text)
        return cls(root=root if root is not None else d.get("root", "."),
                   labels=d["labels"], seed=d["seed"], ratio=d["ratio"],
                   per_label_ratio=d.get("per_label_ratio", {}),
                   sample_rate_hz=d.get("sample_rate_hz", 16000))


def split_dataset(manifest: DatasetManifest, ratio: float = 0.20, seed: int = 0,
                  per_label_ratio: Optional[Mapping[str, float]] = None) -> SplitManifest:
    """Shuffled per-label split with round-half-up test counts.

    ``ratio`` is the test fraction; ``per_label_ratio`` overrides it per label.
    Deterministic under ``seed`` and independent of label iteration order.
    """
    per_label_ratio = dict(per_label_ratio or {})
    labels: dict[str, dict[str, list[str]]] = {}
    for label in sorted(manifest.labels):
        paths = list(manifest.labels[label])
        if not paths:
            raise EmptyClass(f"label {label!r} has no clips")
        r = per_label_ratio.get(label, ratio)
        n_test = int(round_half_up(len(paths) * r))
        rng = random.Random(f"{seed}:{label}")
        rng.shuffle(paths)
        labels[label] = {TEST: sorted(paths[:n_test]), TRAIN: sorted(paths[n_test:])}
    return SplitManifest(root=manifest.root, labels=labels, seed=seed, ratio=ratio,
                         per_label_ratio=per_label_ratio,
                         sample_rate_hz=manifest.sample_rate_hz)


def merge_split(split: SplitManifest) -> dict[str, list[str]]:
    """Recombine both splits per label (sorted), for loss-free checks."""
    return {label: sorted(parts[TRAIN] + parts[TEST])
            for label, parts in split.labels.items()}


@dataclass
class ConfusionMatrix:
    labels: tuple[str, ...]
    counts: np.ndarray  # rows: true, cols: predicted

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (len(self.labels), len(self.labels)):
            raise LabelMismatch("counts must be square over the label set")
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        self.counts = counts

    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self) -> str:
        lines = ["true\\pred," + ",".join(self.labels)]
        for i, label in enumerate(self.labels):
            lines.append(label + "," + ",".join(str(int(c)) for c in self.counts[i]))
        return "\n".join(lines) + "\n"


def confusion(predict: Callable[[object], str],
              clips: Sequence[tuple[object, str]],
              labels: Sequence[str]) -> ConfusionMatrix:
    """Count (true, predicted) pairs for each clip; raw argmax, no gating."""
    labels = tuple(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for clip, true_label in clips:
        if true_label not in index:
            raise LabelMismatch(f"clip label {true_label!r} unknown to the model")
        predicted = predict(clip)
        if predicted not in index:
            raise LabelMismatch(f"prediction {predicted!r} unknown to the model")
        counts[index[true_label], index[predicted]] += 1
    return ConfusionMatrix(labels=labels, counts=counts)


@dataclass
class EvalReport:
    labels: tuple[str, ...]
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    support: np.ndarray  # per-label true-clip counts


def f1_from_precision_recall(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def metrics(cm: ConfusionMatrix) -> EvalReport:
    """Per-label precision/recall/F1 plus accuracy and unweighted macro means.

    A label whose denominator is zero gets 0 for that metric, so reports on
    tiny datasets are always total.
    """
    total = cm.total()
    if total == 0:
        raise EmptyMatrix("confusion matrix has no counts")
    counts = cm.counts.astype(np.float64)
    tp = np.diag(counts)
    col = counts.sum(axis=0)  # tp + fp
    row = counts.sum(axis=1)  # tp + fn
    precision = np.divide(tp, col, out=np.zeros_like(tp), where=col > 0)
    recall = np.divide(tp, row, out=np.zeros_like(tp), where=row > 0)
    pr_sum = precision + recall
    f1 = np.divide(2 * precision * recall, pr_sum,
                   out=np.zeros_like(tp), where=pr_sum > 0)
    return EvalReport(
        labels=cm.labels,
        precision=precision,
        recall=recall,
        f1=f1,
        accuracy=float(tp.sum() / total),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        support=cm.counts.sum(axis=1),
    )


def table_report(report: EvalReport) -> str:
    """Fixed-width text table: per-label F1/precision/recall plus a macro row."""
    width = max(len("keyword"), *(len(lab) for lab in report.labels))
    lines = [f"{'keyword':<{width}}  {'f1':>5}  {'precision':>9}  {'recall':>6}"]
    for i, label in enumerate(report.labels):
        lines.append(
            f"{label:<{width}}  "
            f"{round_half_up(report.f1[i], 2):>5.2f}  "
            f"{round_half_up(report.precision[i], 2):>9.2f}  "
            f"{round_half_up(report.recall[i], 2):>6.2f}"
        )
    lines.append(
        f"{'macro':<{width}}  "
        f"{round_half_up(report.macro_f1, 2):>5.2f}  "
        f"{round_half_up(report.macro_precision, 2):>9.2f}  "
        f"{round_half_up(report.macro_recall, 2):>6.2f}"
    )
    lines.append(f"accuracy: {round_half_up(report.accuracy, 2):.2f}")
    return "\n".join(lines) + "\n"


def csv_report(report: EvalReport) -> str:
    lines = ["label,f1,precision,recall"]
    for i, label in enumerate(report.labels):
        lines.append(f"{label},{round_half_up(report.f1[i], 2):.2f},"
                     f"{round_half_up(report.precision[i], 2):.2f},"
                     f"{round_half_up(report.recall[i], 2):.2f}")
    lines.append(f"macro,{round_half_up(report.macro_f1, 2):.2f},"
                 f"{round_half_up(report.macro_precision, 2):.2f},"
                 f"{round_half_up(report.macro_recall, 2):.2f}")
    return "\n".join(lines) + "\n"
