"""One-vs-rest training: bandwidth search, cross-class cap, probability fields.

The bandwidth schedule widens the low-pass filter one step at a time
(sigma_tilde = n / L). Each class stops when the correlation between
consecutive smoothed fields flattens out; the final bandwidth shared by
all classes is the largest of the per-class stops, which keeps every
class at least as sharp as its own optimum.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import FeatureScaler, fit_scaler, normalize_dataset
from .grid import DensityField, GridSpec, is_power_of_two, rasterize_signed
from .spectral import smooth_density

# below this total shifted density a pixel carries no information and
# falls back to the uniform distribution
_DEGENERATE_EPS = 1e-12


@dataclass
class TrainConfig:
    """Knobs for train(). n_max defaults to n_mesh // 8 when left None."""

    n_mesh: int = 512
    epsilon: float = 0.01
    n_max: int = None
    test_fraction: float = 0.25

    def __post_init__(self):
        if not isinstance(self.n_mesh, int) or not is_power_of_two(self.n_mesh) or self.n_mesh < 8:
            raise ValueError(
                f"n_mesh must be a power of two >= 8, got {self.n_mesh!r}"
            )
        if self.n_max is None:
            self.n_max = self.n_mesh // 8
        if not (self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.n_max < 4:
            raise ValueError(f"n_max must be at least 4, got {self.n_max}")
        if not (0.0 < self.test_fraction < 1.0):
            raise ValueError(
                f"test_fraction must lie in (0, 1), got {self.test_fraction}"
            )


@dataclass
class ConvergenceTrace:
    """Diagnostics from one class's bandwidth search.

    correlations[t] is c(n) for n = 2 + t: the Pearson correlation between
    the fields smoothed at n and n - 1. second_derivatives[t] is the
    central difference d2(n) = c(n+1) - 2 c(n) + c(n-1) for n = 3 + t.
    """

    label: str
    correlations: list
    second_derivatives: list
    n_k: int
    converged: bool

    def correlation_at(self, n):
        return self.correlations[n - 2]

    def second_derivative_at(self, n):
        return self.second_derivatives[n - 3]


@dataclass
class ClassifierModel:
    """A trained classifier: per-class probability fields over the unit square.

    probability_fields[k] matches labels[k]. class_iterations, point_counts
    and traces are training diagnostics; models restored from disk carry
    None there.
    """

    labels: tuple
    grid: GridSpec
    scaler: FeatureScaler
    n_final: int
    epsilon: float
    probability_fields: list = field(repr=False)
    class_iterations: dict = None
    point_counts: dict = None
    traces: list = field(default=None, repr=False)

    def __post_init__(self):
        k = len(self.labels)
        if k < 2:
            raise ValueError(f"need at least 2 classes, got {k}")
        if len(set(self.labels)) != k:
            raise ValueError("label vocabulary contains duplicates")
        if len(self.probability_fields) != k:
            raise ValueError(
                f"{k} labels but {len(self.probability_fields)} probability fields"
            )
        for f in self.probability_fields:
            if f.grid != self.grid:
                raise ValueError("probability field grid does not match model grid")
        if not (isinstance(self.n_final, int) and self.n_final >= 1):
            raise ValueError(f"n_final must be a positive integer, got {self.n_final!r}")
        if not (self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        stack = np.stack([f.values for f in self.probability_fields])
        total = stack.sum(axis=0)
        if np.abs(total - 1.0).max() > 1e-9:
            raise ValueError("probability fields do not sum to 1 per pixel")
        if stack.min() < -1e-12 or stack.max() > 1.0 + 1e-12:
            raise ValueError("probability fields leave [0, 1]")
        if self.class_iterations is not None:
            if set(self.class_iterations) != set(self.labels):
                raise ValueError("class_iterations keys do not match labels")
            if max(self.class_iterations.values()) != self.n_final:
                raise ValueError("n_final is not the maximum per-class iteration")


def pearson_correlation(a, b):
    """Pearson correlation of two fields over their flattened pixels.

    Both fields must share a grid. A constant field has no variance and
    raises ValueError. The result is clipped into [-1, 1] to absorb
    roundoff.
    """
    if a.grid != b.grid:
        raise ValueError("cannot correlate fields on different grids")
    x = a.values.ravel()
    y = b.values.ravel()
    dx_ = x - x.mean()
    dy_ = y - y.mean()
    sx = float(np.sqrt(dx_ @ dx_))
    sy = float(np.sqrt(dy_ @ dy_))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined for a constant field")
    r = float(dx_ @ dy_) / (sx * sy)
    return min(max(r, -1.0), 1.0)


def find_optimal_iteration(raster, epsilon, n_max, label=""):
    """Pick the bandwidth step where the correlation curve flattens.

    Smooths the raster at n = 1, 2, ... and records
    c(n) = corr(smooth(n), smooth(n-1)). The discrete second derivative
    d2(n) = c(n+1) - 2 c(n) + c(n-1) is checked at centers n = 3, 4, ...,
    n_max - 1 in order; the first with |d2(n)| < epsilon wins. If none
    falls below epsilon the search returns n_max with converged=False.
    Returns (n_k, trace).
    """
    if not (epsilon > 0):
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if n_max < 4:
        raise ValueError(f"n_max must be at least 4, got {n_max}")
    prev = smooth_density(raster, 1)
    cur = smooth_density(raster, 2)
    corr = [pearson_correlation(cur, prev)]
    d2s = []
    n_k = None
    converged = False
    for n in range(3, n_max + 1):
        prev, cur = cur, smooth_density(raster, n)
        corr.append(pearson_correlation(cur, prev))
        if len(corr) < 3:
            continue
        center = n - 1
        d2 = corr[-1] - 2.0 * corr[-2] + corr[-3]
        d2s.append(d2)
        if abs(d2) < epsilon:
            n_k = center
            converged = True
            break
    if n_k is None:
        n_k = n_max
    trace = ConvergenceTrace(
        label=label,
        correlations=corr,
        second_derivatives=d2s,
        n_k=n_k,
        converged=converged,
    )
    return n_k, trace


def build_probabilities(smoothed):
    """Normalize smoothed class densities into per-pixel probabilities.

    Shifts all fields by the single global minimum (so the smallest value
    becomes 0) and divides by the per-pixel sum across classes. Pixels
    where that sum is below 1e-12 carry no evidence and get the uniform
    1/K instead. The output sums to 1 at every pixel with each entry in
    [0, 1].
    """
    fields = list(smoothed)
    if len(fields) < 2:
        raise ValueError(f"need at least 2 class fields, got {len(fields)}")
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError("class fields live on different grids")
    stack = np.stack([f.values for f in fields])
    shifted = stack - stack.min()
    total = shifted.sum(axis=0)
    degenerate = total < _DEGENERATE_EPS
    safe = np.where(degenerate, 1.0, total)
    probs = np.where(degenerate[np.newaxis, :, :], 1.0 / len(fields), shifted / safe)
    return [DensityField(grid=grid, values=probs[k]) for k in range(len(fields))]


def train(data, config=None):
    """Fit a classifier on a labeled dataset.

    Pipeline: fit the feature scaler, normalize onto the unit square,
    rasterize each class one-vs-rest, run the per-class bandwidth search,
    cap every class at the largest per-class stop n_final, re-smooth all
    rasters there and normalize into probability fields.
    """
    if config is None:
        config = TrainConfig()
    counts = data.class_counts()
    empty = [lab for lab, c in counts.items() if c == 0]
    if empty:
        raise ValueError(f"classes without points: {', '.join(map(repr, empty))}")
    scaler = fit_scaler(data)
    normalized = normalize_dataset(data, scaler)
    grid = GridSpec(n_mesh=config.n_mesh)
    rasters = [rasterize_signed(normalized, lab, grid) for lab in data.labels]
    traces = []
    for lab, raster in zip(data.labels, rasters):
        _, trace = find_optimal_iteration(raster, config.epsilon, config.n_max, label=lab)
        traces.append(trace)
    n_final = max(t.n_k for t in traces)
    smoothed = [smooth_density(r, n_final) for r in rasters]
    fields = build_probabilities(smoothed)
    return ClassifierModel(
        labels=data.labels,
        grid=grid,
        scaler=scaler,
        n_final=n_final,
        epsilon=config.epsilon,
        probability_fields=fields,
        class_iterations={t.label: t.n_k for t in traces},
        point_counts=counts,
        traces=traces,
    )
