"""Labeled 2-feature point sets: CSV ingestion, synthetic spirals, scaling, splits."""

import csv
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LabeledPoint:
    """A single observation: two real features and a class label."""

    x1: float
    x2: float
    label: str

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError(
                f"point coordinates must be finite, got ({self.x1}, {self.x2})"
            )
        if not self.label:
            raise ValueError("point label must be a non-empty string")


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of points plus the label vocabulary.

    The vocabulary fixes the class order used everywhere downstream
    (rasters, probability fields, confusion matrices). Treat instances
    as immutable.
    """

    points: tuple
    labels: tuple

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("label vocabulary contains duplicates")
        if len(self.labels) < 2:
            raise ValueError(f"need at least 2 classes, got {len(self.labels)}")
        vocab = set(self.labels)
        for p in self.points:
            if p.label not in vocab:
                raise ValueError(f"point label {p.label!r} missing from vocabulary")

    def __len__(self):
        return len(self.points)

    def xy(self):
        """Feature matrix of shape (n_points, 2), float64."""
        out = np.empty((len(self.points), 2), dtype=np.float64)
        for row, p in enumerate(self.points):
            out[row, 0] = p.x1
            out[row, 1] = p.x2
        return out

    def label_indices(self):
        """Per-point index into the vocabulary, shape (n_points,)."""
        lut = {lab: k for k, lab in enumerate(self.labels)}
        return np.array([lut[p.label] for p in self.points], dtype=np.intp)

    def class_counts(self):
        counts = {lab: 0 for lab in self.labels}
        for p in self.points:
            counts[p.label] += 1
        return counts


@dataclass(frozen=True)
class FeatureScaler:
    """Per-feature affine map onto the unit square: x -> (x - min) / (max - min)."""

    min1: float
    max1: float
    min2: float
    max2: float

    def __post_init__(self):
        for lo, hi, name in ((self.min1, self.max1, "x1"), (self.min2, self.max2, "x2")):
            if not (hi > lo):
                raise ValueError(f"degenerate scaler range for {name}: [{lo}, {hi}]")
            if not math.isfinite(hi - lo):
                raise ValueError(f"scaler range for {name} overflows: [{lo}, {hi}]")


def fit_scaler(data):
    """Per-feature min/max over a dataset.

    Raises ValueError on an empty dataset or when either feature is
    constant (the affine map would be undefined).
    """
    if len(data) == 0:
        raise ValueError("cannot fit a scaler to an empty dataset")
    xy = data.xy()
    min1, min2 = xy.min(axis=0)
    max1, max2 = xy.max(axis=0)
    if max1 <= min1:
        raise ValueError(f"feature x1 is constant (= {min1}); cannot scale")
    if max2 <= min2:
        raise ValueError(f"feature x2 is constant (= {min2}); cannot scale")
    return FeatureScaler(
        min1=float(min1), max1=float(max1), min2=float(min2), max2=float(max2)
    )


def apply_scaler(points, scaler):
    """Map raw coordinate pairs through the scaler. Returns an (n, 2) array.

    Points inside the fitted bounding box land in [0, 1]^2; outside points
    fall outside that range (callers decide whether to clamp).
    """
    xy = np.asarray(points, dtype=np.float64)
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) coordinate array, got shape {xy.shape}")
    out = np.empty_like(xy)
    out[:, 0] = (xy[:, 0] - scaler.min1) / (scaler.max1 - scaler.min1)
    out[:, 1] = (xy[:, 1] - scaler.min2) / (scaler.max2 - scaler.min2)
    return out


def normalize_dataset(data, scaler):
    """Return a copy of the dataset with coordinates pushed through the scaler."""
    xy = apply_scaler(data.xy(), scaler)
    pts = tuple(
        LabeledPoint(float(xy[k, 0]), float(xy[k, 1]), p.label)
        for k, p in enumerate(data.points)
    )
    return Dataset(points=pts, labels=data.labels)


def _gaussian_pairs(rng, n):
    """Standard-normal pairs from a Box-Muller transform on PCG64 uniforms.

    Done by hand (rather than rng.normal) so that generated datasets are
    reproducible from the seed alone, independent of the numpy version's
    normal-sampling internals. u1 is reflected into (0, 1] to keep the log
    finite.
    """
    u1 = 1.0 - rng.random(n)
    u2 = rng.random(n)
    r = np.sqrt(-2.0 * np.log(u1))
    return r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)


def generate_spirals(n_classes, n_per_class, noise_sigmas, turns, seed):
    """Interleaved noisy spiral arms, one arm per class.

    Arm k is offset by angle 2*pi*k/n_classes; the arc parameter t is
    uniform on [0.2, 1], radius grows as 0.45*t around center (0.5, 0.5),
    and isotropic Gaussian noise with per-class sigma is added to both
    coordinates. Labels are "c0", "c1", ... in class order. Deterministic
    for a fixed (n_classes, n_per_class, noise_sigmas, turns, seed); draws
    come from a PCG64 stream in a fixed order (t first, then the noise
    pair, class by class).
    """
    if n_classes < 2:
        raise ValueError(f"need at least 2 classes, got {n_classes}")
    if n_per_class < 1:
        raise ValueError(f"need at least 1 point per class, got {n_per_class}")
    sigmas = [float(s) for s in noise_sigmas]
    if len(sigmas) != n_classes:
        raise ValueError(
            f"got {len(sigmas)} noise sigmas for {n_classes} classes"
        )
    if any(s < 0 for s in sigmas):
        raise ValueError("noise sigmas must be nonnegative")
    rng = np.random.Generator(np.random.PCG64(seed))
    labels = tuple(f"c{k}" for k in range(n_classes))
    pts = []
    for k, sigma in enumerate(sigmas):
        t = 0.2 + 0.8 * rng.random(n_per_class)
        g1, g2 = _gaussian_pairs(rng, n_per_class)
        angle = 2.0 * np.pi * turns * t + 2.0 * np.pi * k / n_classes
        x1 = 0.5 + 0.45 * t * np.cos(angle) + sigma * g1
        x2 = 0.5 + 0.45 * t * np.sin(angle) + sigma * g2
        pts.extend(
            LabeledPoint(float(a), float(b), labels[k]) for a, b in zip(x1, x2)
        )
    return Dataset(points=tuple(pts), labels=labels)


def split(data, test_fraction, seed):
    """Stratified train/test split, deterministic in the seed.

    Each class is shuffled separately (PCG64 permutation) and the first
    round(m * (1 - test_fraction)) points go to train, clamped so both
    halves keep at least one point per class. Rounding is half-up. Output
    order is class by class in vocabulary order, shuffled within a class.
    Both halves carry the parent vocabulary. Classes with fewer than two
    points cannot be stratified and raise ValueError.
    """
    if not (0.0 < test_fraction < 1.0):
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    if len(data) == 0:
        raise ValueError("cannot split an empty dataset")
    rng = np.random.Generator(np.random.PCG64(seed))
    by_class = {lab: [] for lab in data.labels}
    for p in data.points:
        by_class[p.label].append(p)
    train_pts, test_pts = [], []
    for lab in data.labels:
        members = by_class[lab]
        m = len(members)
        if m < 2:
            raise ValueError(
                f"class {lab!r} has {m} point(s); need at least 2 to stratify"
            )
        perm = rng.permutation(m)
        n_train = int(math.floor((1.0 - test_fraction) * m + 0.5))
        n_train = min(max(n_train, 1), m - 1)
        train_pts.extend(members[i] for i in perm[:n_train])
        test_pts.extend(members[i] for i in perm[n_train:])
    return (
        Dataset(points=tuple(train_pts), labels=data.labels),
        Dataset(points=tuple(test_pts), labels=data.labels),
    )


def load_csv(path, has_header=False):
    """Read a labeled dataset from CSV rows of the form x1,x2,label.

    Blank lines are skipped. Malformed rows (wrong field count, unparsable
    or non-finite coordinates, empty label) raise ValueError naming the
    1-based line number. The vocabulary is the labels in order of first
    appearance.
    """
    points = []
    labels = []
    seen = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=1):
            if has_header and line_no == 1:
                continue
            if not row or all(not field.strip() for field in row):
                continue
            if len(row) != 3:
                raise ValueError(
                    f"{path}: line {line_no}: expected 3 fields, got {len(row)}"
                )
            try:
                x1 = float(row[0])
                x2 = float(row[1])
            except ValueError:
                raise ValueError(
                    f"{path}: line {line_no}: cannot parse coordinates "
                    f"{row[0]!r}, {row[1]!r}"
                ) from None
            if not (math.isfinite(x1) and math.isfinite(x2)):
                raise ValueError(
                    f"{path}: line {line_no}: coordinates must be finite"
                )
            label = row[2].strip()
            if not label:
                raise ValueError(f"{path}: line {line_no}: empty label")
            if label not in seen:
                seen.add(label)
                labels.append(label)
            points.append(LabeledPoint(x1, x2, label))
    if len(labels) < 2:
        raise ValueError(
            f"{path}: need at least 2 classes, found {len(labels)}"
        )
    return Dataset(points=tuple(points), labels=tuple(labels))


def write_csv(data, path):
    """Write x1,x2,label rows (no header, LF line endings, repr precision)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for p in data.points:
            writer.writerow([repr(p.x1), repr(p.x2), p.label])
