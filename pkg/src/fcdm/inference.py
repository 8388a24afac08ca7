"""Prediction and evaluation against a trained model."""

import math
from dataclasses import dataclass

import numpy as np

from .dataset import apply_scaler
from .grid import map_to_pixel


@dataclass(frozen=True)
class Prediction:
    """Argmax outcome for one point: label, per-class probabilities, pixel hit."""

    label: str
    probabilities: tuple
    pixel: object


@dataclass
class EvalReport:
    """Aggregate accuracy statistics over a labeled dataset.

    confusion[t, p] counts points of true class t predicted as p, indexed
    in model vocabulary order. macro_recall averages recall over classes
    that actually appear (true count > 0).
    """

    labels: tuple
    confusion: np.ndarray
    per_class_recall: np.ndarray
    macro_recall: float
    accuracy: float
    n_points: int

    def to_dict(self):
        return {
            "labels": list(self.labels),
            "confusion": self.confusion.tolist(),
            "per_class_recall": [float(r) for r in self.per_class_recall],
            "macro_recall": float(self.macro_recall),
            "accuracy": float(self.accuracy),
            "n_points": int(self.n_points),
        }


def predict(model, point):
    """Classify one raw-coordinate point.

    The point is scaled with the model's scaler, clamped into the unit
    square (so far-out points read the boundary pixel), located on the
    grid, and assigned the class with the largest probability there. Ties
    go to the lowest class index. NaN coordinates raise ValueError.
    """
    x1, x2 = float(point[0]), float(point[1])
    if math.isnan(x1) or math.isnan(x2):
        raise ValueError("cannot classify a point with NaN coordinates")
    scaled = apply_scaler(np.array([[x1, x2]]), model.scaler)[0]
    u = min(max(float(scaled[0]), 0.0), 1.0)
    v = min(max(float(scaled[1]), 0.0), 1.0)
    pixel = map_to_pixel((u, v), model.grid)
    probs = tuple(
        float(f.values[pixel.i, pixel.j]) for f in model.probability_fields
    )
    best = 0
    for k in range(1, len(probs)):
        if probs[k] > probs[best]:
            best = k
    return Prediction(label=model.labels[best], probabilities=probs, pixel=pixel)


def evaluate(model, data):
    """Score a labeled dataset; every label must exist in the model vocabulary."""
    if len(data) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    unknown = sorted(set(data.labels) - set(model.labels))
    if unknown:
        raise ValueError(
            f"dataset labels not in model vocabulary: {', '.join(map(repr, unknown))}"
        )
    k = len(model.labels)
    index = {lab: i for i, lab in enumerate(model.labels)}
    confusion = np.zeros((k, k), dtype=np.int64)
    for p in data.points:
        pred = predict(model, (p.x1, p.x2))
        confusion[index[p.label], index[pred.label]] += 1
    row_sums = confusion.sum(axis=1)
    present = row_sums > 0
    recall = np.zeros(k, dtype=np.float64)
    recall[present] = confusion.diagonal()[present] / row_sums[present]
    macro = float(recall[present].mean()) if present.any() else 0.0
    accuracy = float(confusion.diagonal().sum() / confusion.sum())
    return EvalReport(
        labels=model.labels,
        confusion=confusion,
        per_class_recall=recall,
        macro_recall=macro,
        accuracy=accuracy,
        n_points=len(data),
    )
