import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import fcdm.trainer
from fcdm.dataset import Dataset, LabeledPoint, generate_spirals, split
from fcdm.grid import DensityField, GridSpec, PixelIndex
from fcdm.model_io import model_to_bytes
from fcdm.spectral import smooth_density_direct
from fcdm.trainer import (
    ClassifierModel,
    TrainConfig,
    build_probabilities,
    find_optimal_iteration,
    pearson_correlation,
    train,
)


# ---------------------------------------------------------------- config

def test_config_defaults():
    config = TrainConfig()
    assert config.n_mesh == 512
    assert config.epsilon == 0.01
    assert config.n_max == 64  # n_mesh / 8
    assert config.test_fraction == 0.25


def test_config_nmax_follows_mesh():
    assert TrainConfig(n_mesh=128).n_max == 16


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(n_mesh=100)
    with pytest.raises(ValueError):
        TrainConfig(epsilon=0.0)
    with pytest.raises(ValueError):
        TrainConfig(n_max=3)
    with pytest.raises(ValueError):
        TrainConfig(test_fraction=1.0)
    with pytest.raises(ValueError):
        TrainConfig(n_mesh=16)  # default n_max would be 2


# ---------------------------------------------------------------- pearson

def _field(grid, values):
    return DensityField(grid=grid, values=values)


def test_pearson_self_is_one():
    grid = GridSpec(8)
    rng = np.random.default_rng(0)
    a = _field(grid, rng.uniform(-1, 1, (8, 8)))
    assert pearson_correlation(a, a) == pytest.approx(1.0, abs=1e-15)


def test_pearson_negated_is_minus_one():
    grid = GridSpec(8)
    rng = np.random.default_rng(1)
    a = _field(grid, rng.uniform(-1, 1, (8, 8)))
    b = _field(grid, -a.values)
    assert pearson_correlation(a, b) == pytest.approx(-1.0, abs=1e-15)


def test_pearson_constant_rejected():
    grid = GridSpec(8)
    a = _field(grid, np.full((8, 8), 3.0))
    b = _field(grid, np.arange(64, dtype=float).reshape(8, 8))
    with pytest.raises(ValueError, match="constant"):
        pearson_correlation(a, b)
    with pytest.raises(ValueError, match="constant"):
        pearson_correlation(b, a)


def test_pearson_grid_mismatch_rejected():
    rng = np.random.default_rng(2)
    a = _field(GridSpec(8), rng.uniform(-1, 1, (8, 8)))
    b = _field(GridSpec(16), rng.uniform(-1, 1, (16, 16)))
    with pytest.raises(ValueError, match="grid"):
        pearson_correlation(a, b)


@given(seed=st.integers(min_value=0, max_value=2**31))
@settings(max_examples=30)
def test_pearson_stays_in_unit_interval(seed):
    grid = GridSpec(8)
    rng = np.random.default_rng(seed)
    a = _field(grid, rng.uniform(-5, 5, (8, 8)))
    b = _field(grid, rng.uniform(-5, 5, (8, 8)))
    assert -1.0 <= pearson_correlation(a, b) <= 1.0


# ------------------------------------------------- find_optimal_iteration

def _orthonormal_pair(grid, seed):
    """Two orthonormal, mean-zero fields spanning a plane of rotations."""
    rng = np.random.default_rng(seed)
    n = grid.n_mesh
    u = rng.normal(size=(n, n)).ravel()
    u -= u.mean()
    u /= np.linalg.norm(u)
    v = rng.normal(size=(n, n)).ravel()
    v -= v.mean()
    v -= (u @ v) * u
    v /= np.linalg.norm(v)
    return u.reshape(n, n), v.reshape(n, n)


def test_linear_correlation_sequence_stops_at_first_center(monkeypatch):
    # Rotating a fixed field by angle increments arccos(c_target(n)) makes
    # corr(f_n, f_{n-1}) an exactly linear sequence, so every second
    # difference vanishes and the search must stop at the first stencil
    # center n = 3.
    grid = GridSpec(8)
    u, v = _orthonormal_pair(grid, 5)

    def c_target(n):
        return 0.90 + 0.005 * (n - 2)

    theta = {1: 0.0}
    for n in range(2, 10):
        theta[n] = theta[n - 1] + float(np.arccos(c_target(n)))
    fields = {
        n: DensityField(grid=grid, values=np.cos(t) * u + np.sin(t) * v)
        for n, t in theta.items()
    }
    monkeypatch.setattr(fcdm.trainer, "smooth_density", lambda raster, n: fields[n])
    raster = DensityField(grid=grid, values=u)
    n_k, trace = find_optimal_iteration(raster, 0.01, 8, label="stub")
    assert n_k == 3
    assert trace.converged
    assert abs(trace.second_derivative_at(3)) < 1e-12
    assert trace.correlations == pytest.approx(
        [c_target(n) for n in (2, 3, 4)], abs=1e-12
    )


def test_threshold_never_met_returns_cap_with_flag():
    data = generate_spirals(2, 40, [0.01, 0.01], 1.5, 3)
    from fcdm.dataset import fit_scaler, normalize_dataset
    from fcdm.grid import rasterize_signed

    normalized = normalize_dataset(data, fit_scaler(data))
    raster = rasterize_signed(normalized, "c0", GridSpec(32))
    n_k, trace = find_optimal_iteration(raster, 1e-12, 6, label="c0")
    assert n_k == 6
    assert not trace.converged
    # searched every center 3..5: c(2)..c(6) plus three second differences
    assert len(trace.correlations) == 5
    assert len(trace.second_derivatives) == 3
    assert all(abs(d) >= 1e-12 for d in trace.second_derivatives)


def test_search_validates_arguments():
    raster = DensityField(grid=GridSpec(8), values=np.eye(8))
    with pytest.raises(ValueError):
        find_optimal_iteration(raster, 0.0, 8)
    with pytest.raises(ValueError):
        find_optimal_iteration(raster, 0.01, 3)


def test_trace_index_helpers():
    data = generate_spirals(2, 60, [0.01, 0.02], 1.5, 8)
    from fcdm.dataset import fit_scaler, normalize_dataset
    from fcdm.grid import rasterize_signed

    normalized = normalize_dataset(data, fit_scaler(data))
    raster = rasterize_signed(normalized, "c1", GridSpec(64))
    n_k, trace = find_optimal_iteration(raster, 0.01, 8, label="c1")
    assert trace.label == "c1"
    assert trace.correlation_at(2) == trace.correlations[0]
    if trace.converged:
        assert 3 <= n_k <= 8
        assert abs(trace.second_derivative_at(n_k)) < 0.01
        # converged at the first qualifying center: earlier ones stay above
        for earlier in range(3, n_k):
            assert abs(trace.second_derivative_at(earlier)) >= 0.01


# ---------------------------------------------------- build_probabilities

def test_two_class_shift_and_normalize():
    grid = GridSpec(8)
    a = np.zeros((8, 8))
    b = np.zeros((8, 8))
    a[2, 3] = 0.5
    b[2, 3] = -0.5
    probs = build_probabilities([_field(grid, a), _field(grid, b)])
    # global min -0.5 shifts the pixel to (1.0, 0.0)
    assert probs[0].values[2, 3] == 1.0
    assert probs[1].values[2, 3] == 0.0
    # elsewhere both classes shifted to 0.5 each
    assert probs[0].values[0, 0] == 0.5


def test_all_zero_fields_fall_back_to_uniform():
    grid = GridSpec(8)
    zero = np.zeros((8, 8))
    probs = build_probabilities([_field(grid, zero)] * 3)
    for p in probs:
        assert np.all(p.values == 1.0 / 3.0)


def test_equal_shifted_values_give_symmetric_probabilities():
    grid = GridSpec(8)
    ones = np.ones((8, 8))
    anchor = np.ones((8, 8))
    anchor[0, 0] = 0.0  # pins the global minimum at zero
    probs = build_probabilities([_field(grid, ones), _field(grid, ones),
                                 _field(grid, anchor)])
    assert probs[0].values[4, 4] == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert probs[1].values[4, 4] == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_probabilities_require_matching_grids():
    with pytest.raises(ValueError):
        build_probabilities([
            _field(GridSpec(8), np.zeros((8, 8))),
            _field(GridSpec(16), np.zeros((16, 16))),
        ])
    with pytest.raises(ValueError):
        build_probabilities([_field(GridSpec(8), np.zeros((8, 8)))])


@given(
    seed=st.integers(min_value=0, max_value=2**31),
    k=st.integers(min_value=2, max_value=5),
)
@settings(max_examples=40)
def test_probability_axioms(seed, k):
    grid = GridSpec(8)
    rng = np.random.default_rng(seed)
    fields = [_field(grid, rng.uniform(-3, 3, (8, 8))) for _ in range(k)]
    probs = build_probabilities(fields)
    stack = np.stack([p.values for p in probs])
    assert np.abs(stack.sum(axis=0) - 1.0).max() <= 1e-9
    assert stack.min() >= -1e-12
    assert stack.max() <= 1.0 + 1e-12


@given(seed=st.integers(min_value=0, max_value=2**31))
@settings(max_examples=20)
def test_probabilities_permute_with_input_order(seed):
    grid = GridSpec(8)
    rng = np.random.default_rng(seed)
    fields = [_field(grid, rng.uniform(-2, 2, (8, 8))) for _ in range(3)]
    direct = build_probabilities(fields)
    rotated = build_probabilities([fields[2], fields[0], fields[1]])
    # the per-pixel sum accumulates in a different order, so allow roundoff
    for got, want in ((rotated[0], direct[2]), (rotated[1], direct[0]),
                      (rotated[2], direct[1])):
        assert np.abs(got.values - want.values).max() <= 1e-12


# ---------------------------------------------------------------- train

def test_golden_spiral_run_at_128():
    data = generate_spirals(3, 400, [0.01, 0.015, 0.02], 1.75, 42)
    train_set, _ = split(data, 0.25, 42)
    model = train(train_set, TrainConfig(n_mesh=128))
    # frozen from the recorded run of this exact configuration
    assert model.class_iterations == {"c0": 5, "c1": 5, "c2": 5}
    assert model.n_final == 5
    assert model.point_counts == {"c0": 300, "c1": 300, "c2": 300}
    for trace in model.traces:
        assert trace.converged
        corrs = trace.correlations
        assert all(b > a for a, b in zip(corrs, corrs[1:]))


def test_n_final_is_max_of_class_stops():
    data = generate_spirals(3, 80, [0.005, 0.02, 0.04], 1.75, 13)
    model = train(data, TrainConfig(n_mesh=64))
    assert model.n_final == max(model.class_iterations.values())
    assert set(model.class_iterations) == set(model.labels)


def test_far_apart_two_point_classes():
    # one point per class in opposite corners: each class's own pixel must
    # favor it, on both the spectral route and the brute-force route
    data = Dataset(
        points=(LabeledPoint(0.2, 0.2, "A"), LabeledPoint(0.8, 0.8, "B")),
        labels=("A", "B"),
    )
    model = train(data, TrainConfig(n_mesh=32))
    # scaling stretches the two points onto corner pixels (0,0) and (31,31)
    assert not model.traces[0].converged  # capped at n_max = 4
    assert model.n_final == 4
    p_a = model.probability_fields[0].values
    p_b = model.probability_fields[1].values
    assert p_a[0, 0] > 0.5
    assert p_b[31, 31] > 0.5

    grid = model.grid
    direct_a = smooth_density_direct(
        [(PixelIndex(0, 0), 1.0), (PixelIndex(31, 31), -1.0)], model.n_final, grid
    )
    direct_b = smooth_density_direct(
        [(PixelIndex(0, 0), -1.0), (PixelIndex(31, 31), 1.0)], model.n_final, grid
    )
    brute = build_probabilities([direct_a, direct_b])
    assert brute[0].values[0, 0] > 0.5
    assert brute[1].values[31, 31] > 0.5
    # at n=4 on a 32 mesh the truncated frequency window costs the spectral
    # route ~1.4e-4 of filter mass, so the two routes agree only to ~1e-3
    assert np.abs(brute[0].values - p_a).max() <= 1e-3


def test_train_is_deterministic():
    data = generate_spirals(3, 50, [0.01, 0.015, 0.02], 1.75, 21)
    config = TrainConfig(n_mesh=32)
    assert model_to_bytes(train(data, config)) == model_to_bytes(train(data, config))


def test_train_rejects_empty_class():
    pts = (
        LabeledPoint(0.1, 0.2, "A"), LabeledPoint(0.9, 0.8, "A"),
        LabeledPoint(0.4, 0.6, "B"),
    )
    data = Dataset(points=pts, labels=("A", "B", "C"))
    with pytest.raises(ValueError, match="'C'"):
        train(data, TrainConfig(n_mesh=32))


def test_model_invariants_enforced():
    grid = GridSpec(8)
    from fcdm.dataset import FeatureScaler

    scaler = FeatureScaler(0, 1, 0, 1)
    bad = [_field(grid, np.full((8, 8), 0.6))] * 2  # sums to 1.2
    with pytest.raises(ValueError, match="sum"):
        ClassifierModel(
            labels=("A", "B"), grid=grid, scaler=scaler, n_final=3,
            epsilon=0.01, probability_fields=bad,
        )
    good = [_field(grid, np.full((8, 8), 0.5))] * 2
    with pytest.raises(ValueError, match="n_final"):
        ClassifierModel(
            labels=("A", "B"), grid=grid, scaler=scaler, n_final=3,
            epsilon=0.01, probability_fields=good,
            class_iterations={"A": 3, "B": 5},
        )
