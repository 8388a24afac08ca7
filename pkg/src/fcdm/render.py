"""Heatmap emission as binary netpbm images (P5 grayscale, P6 color).

Row 0 of a field becomes the top row of the image in both formats.
"""

import colorsys

import numpy as np


def class_palette(n_classes):
    """One fully saturated RGB color per class, hue k / n_classes."""
    colors = []
    for k in range(n_classes):
        r, g, b = colorsys.hsv_to_rgb(k / n_classes, 1.0, 1.0)
        colors.append((int(round(255 * r)), int(round(255 * g)), int(round(255 * b))))
    return colors


def probability_pgm(model, class_index):
    """Binary PGM (P5) of one class's probability field, 0..255 gray levels."""
    k = len(model.labels)
    if not (0 <= class_index < k):
        raise ValueError(f"class index {class_index} out of range [0, {k})")
    values = model.probability_fields[class_index].values
    gray = np.rint(255.0 * np.clip(values, 0.0, 1.0)).astype(np.uint8)
    n = model.grid.n_mesh
    header = f"P5\n{n} {n}\n255\n".encode("ascii")
    return header + gray.tobytes()


def decision_ppm(model):
    """Binary PPM (P6) of the per-pixel argmax class, palette colored.

    Ties resolve to the lowest class index, matching point prediction.
    """
    stack = np.stack([f.values for f in model.probability_fields])
    winners = stack.argmax(axis=0)  # argmax picks the first maximum
    palette = np.array(class_palette(len(model.labels)), dtype=np.uint8)
    rgb = palette[winners]
    n = model.grid.n_mesh
    header = f"P6\n{n} {n}\n255\n".encode("ascii")
    return header + rgb.tobytes()
