"""2D spectral machinery: DFT wrappers, Gaussian low-pass profile, smoothing.

Conventions: the forward transform is unnormalized and the inverse carries
the 1/N^2 factor. Sample k of an N-point axis lives at frequency k/L for
k < N/2 and (k - N)/L for k >= N/2 (the wrapped layout both numpy and the
filter below share). Smoothing in this space is circular, so fields are
implicitly L-periodic in both directions.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import DensityField, GridSpec

# tolerance for the imaginary residue of an inverse transform whose input
# should have been conjugate-symmetric
_IMAG_TOL = 1e-9


@dataclass
class SpectrumField:
    """Complex DFT coefficients of a field, same (row, col) layout."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        n = self.grid.n_mesh
        if self.values.shape != (n, n):
            raise ValueError(
                f"spectrum shape {self.values.shape} does not match grid ({n}, {n})"
            )


@dataclass
class FilterProfile:
    """A real transfer function sampled on the wrapped frequency lattice."""

    grid: GridSpec
    sigma_tilde: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        n = self.grid.n_mesh
        if self.values.shape != (n, n):
            raise ValueError(
                f"filter shape {self.values.shape} does not match grid ({n}, {n})"
            )


def wrapped_frequencies(grid):
    """The N frequencies of one axis in DFT storage order."""
    n = grid.n_mesh
    k = np.arange(n)
    return np.where(k < n // 2, k, k - n) / grid.domain_width


def dft2(density):
    """Forward 2D DFT of a real field (unnormalized)."""
    return SpectrumField(grid=density.grid, values=np.fft.fft2(density.values))


def idft2(spectrum):
    """Inverse 2D DFT back to a real field.

    The spectrum of a real field is conjugate-symmetric, so the inverse
    must come out real up to roundoff. A residue above
    1e-9 * (1 + max|real part|) means the caller fed a non-symmetric
    spectrum and raises instead of silently dropping it.
    """
    out = np.fft.ifft2(spectrum.values)
    real = out.real
    residue = np.abs(out.imag).max()
    if residue >= _IMAG_TOL * (1.0 + np.abs(real).max()):
        raise ValueError(
            f"inverse transform is not real (max imaginary {residue:.3e}); "
            "spectrum lost conjugate symmetry"
        )
    return DensityField(grid=spectrum.grid, values=real.copy())


def gaussian_filter_spectrum(grid, sigma_tilde):
    """Gaussian low-pass transfer function with frequency-domain width sigma_tilde.

    G(f1, f2) = exp(-(f1^2 + f2^2) / (2 sigma_tilde^2)) / (2 pi sigma_tilde^2),
    sampled at the wrapped frequencies of the grid. Larger sigma_tilde
    passes more bandwidth; the equivalent spatial kernel is a Gaussian of
    width 1 / (2 pi sigma_tilde).
    """
    st = float(sigma_tilde)
    if not (st > 0):
        raise ValueError(f"sigma_tilde must be positive, got {sigma_tilde}")
    f = wrapped_frequencies(grid)
    f1 = f[np.newaxis, :]  # columns carry x1 frequencies
    f2 = f[:, np.newaxis]
    values = np.exp(-(f1 * f1 + f2 * f2) / (2.0 * st * st)) / (2.0 * np.pi * st * st)
    return FilterProfile(grid=grid, sigma_tilde=st, values=values)


def smooth_density(density, n_iter):
    """Low-pass the field at bandwidth sigma_tilde = n_iter / L.

    Multiplies the spectrum by the Gaussian profile and transforms back;
    equivalent to circular convolution with a spatial Gaussian kernel
    scaled by dx^2. The result is real and the operation is linear in the
    input field.
    """
    if n_iter != int(n_iter) or int(n_iter) < 1:
        raise ValueError(f"iteration number must be a positive integer, got {n_iter}")
    grid = density.grid
    profile = gaussian_filter_spectrum(grid, int(n_iter) / grid.domain_width)
    spectrum = dft2(density)
    filtered = SpectrumField(grid=grid, values=spectrum.values * profile.values)
    return idft2(filtered)


def _unpack_pixel(p):
    if hasattr(p, "i") and hasattr(p, "j"):
        return int(p.i), int(p.j)
    i, j = p
    return int(i), int(j)


def smooth_density_direct(impulses, n_iter, grid):
    """Brute-force reference for smooth_density, O(points * N^2).

    Takes the raster as a sparse list of (pixel, sign) impulses and sums
    the spatial Gaussian kernel dx^2 * exp(-2 pi^2 sigma_tilde^2 r^2)
    directly, over the 3x3 block of periodic images so the circularity of
    the spectral route is reproduced. Intended for oracle checks on small
    grids, not production use.
    """
    if n_iter != int(n_iter) or int(n_iter) < 1:
        raise ValueError(f"iteration number must be a positive integer, got {n_iter}")
    st = int(n_iter) / grid.domain_width
    L = grid.domain_width
    dx = grid.pixel_size
    centers = grid.pixel_centers()
    X1 = centers[np.newaxis, :]  # column coordinate (x1)
    X2 = centers[:, np.newaxis]  # row coordinate (x2)
    out = np.zeros((grid.n_mesh, grid.n_mesh), dtype=np.float64)
    coef = 2.0 * np.pi * np.pi * st * st
    for pixel, sign in impulses:
        i, j = _unpack_pixel(pixel)
        c1 = (j + 0.5) * dx
        c2 = (i + 0.5) * dx
        acc = np.zeros_like(out)
        for m1 in (-L, 0.0, L):
            for m2 in (-L, 0.0, L):
                d1 = X1 - c1 + m1
                d2 = X2 - c2 + m2
                acc += np.exp(-coef * (d1 * d1 + d2 * d2))
        out += float(sign) * acc
    return DensityField(grid=grid, values=dx * dx * out)
