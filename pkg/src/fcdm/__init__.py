"""Multiclass classification from Fourier-smoothed class density fields.

Labeled 2-feature points are rasterized into signed one-vs-rest density
grids, low-passed with a Gaussian spectral filter whose bandwidth is
picked by a correlation flattening rule, and normalized into per-class
probability fields that classify by argmax lookup.
"""

from .dataset import (
    Dataset,
    FeatureScaler,
    LabeledPoint,
    apply_scaler,
    fit_scaler,
    generate_spirals,
    load_csv,
    normalize_dataset,
    split,
    write_csv,
)
from .grid import DensityField, GridSpec, PixelIndex, map_to_pixel, rasterize_signed
from .inference import EvalReport, Prediction, evaluate, predict
from .model_io import (
    ModelFormatError,
    load_model,
    model_from_bytes,
    model_to_bytes,
    save_model,
)
from .render import class_palette, decision_ppm, probability_pgm
from .spectral import (
    FilterProfile,
    SpectrumField,
    dft2,
    gaussian_filter_spectrum,
    idft2,
    smooth_density,
    smooth_density_direct,
    wrapped_frequencies,
)
from .trainer import (
    ClassifierModel,
    ConvergenceTrace,
    TrainConfig,
    build_probabilities,
    find_optimal_iteration,
    pearson_correlation,
    train,
)

__all__ = [
    "ClassifierModel",
    "ConvergenceTrace",
    "Dataset",
    "DensityField",
    "EvalReport",
    "FeatureScaler",
    "FilterProfile",
    "GridSpec",
    "LabeledPoint",
    "ModelFormatError",
    "PixelIndex",
    "Prediction",
    "SpectrumField",
    "TrainConfig",
    "apply_scaler",
    "build_probabilities",
    "class_palette",
    "decision_ppm",
    "dft2",
    "evaluate",
    "find_optimal_iteration",
    "fit_scaler",
    "gaussian_filter_spectrum",
    "generate_spirals",
    "idft2",
    "load_csv",
    "load_model",
    "map_to_pixel",
    "model_from_bytes",
    "model_to_bytes",
    "normalize_dataset",
    "pearson_correlation",
    "predict",
    "probability_pgm",
    "rasterize_signed",
    "save_model",
    "smooth_density",
    "smooth_density_direct",
    "split",
    "train",
    "wrapped_frequencies",
    "write_csv",
]

__version__ = "0.1.0"
