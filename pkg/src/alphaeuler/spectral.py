"""Periodic grid, Fourier transforms, spectral differentiation and dealiasing.

Real scalar fields on the 2*pi-periodic square torus are stored either as
collocation samples (``PhysicalField``) or as a full complex array of
Fourier-series coefficients (``SpectralField``) indexed by integer
wavenumbers in FFT order.  The coefficient convention is

    f(x) = sum_k c_k exp(i k . x),

so ``cos(x1)`` has coefficients 1/2 at k = (1, 0) and k = (-1, 0), and the
k = (0, 0) coefficient is the mean of the field.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * np.pi


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def dealias_cutoff(n: int) -> int:
    """Largest retained wavenumber of the 2/3-style rule on an n-point grid.

    The quadratic product of two fields band-limited to K is alias-free on
    the n-point grid iff 3K < n, so the cutoff is the largest such K.
    """
    return (n - 1) // 3


def dealias_mask(n: int) -> np.ndarray:
    """Boolean keep-mask over the (k1, k2) wavenumber lattice in FFT order."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    keep = np.abs(k) <= dealias_cutoff(n)
    return keep[:, None] & keep[None, :]


@dataclass(frozen=True)
class Grid:
    """Uniform n x n collocation grid on [0, 2*pi)^2, n a power of two >= 8."""

    n: int

    def __post_init__(self):
        if self.n < 8 or not _is_power_of_two(self.n):
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n}")

    @property
    def period(self) -> float:
        return TWO_PI

    @property
    def dx(self) -> float:
        return TWO_PI / self.n

    @property
    def cell_area(self) -> float:
        return self.dx * self.dx

    @cached_property
    def x(self) -> np.ndarray:
        """Collocation points along one axis."""
        return TWO_PI * np.arange(self.n) / self.n

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(X1, X2) meshes with values[i, j] = f(x[i], x[j]) indexing."""
        return np.meshgrid(self.x, self.x, indexing="ij")

    @cached_property
    def k1(self) -> np.ndarray:
        """Integer wavenumbers along axis 1, shape (n, 1)."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n)[:, None]

    @cached_property
    def k2(self) -> np.ndarray:
        """Integer wavenumbers along axis 2, shape (1, n)."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n)[None, :]

    @cached_property
    def ksq(self) -> np.ndarray:
        return self.k1**2 + self.k2**2

    @cached_property
    def inv_ksq(self) -> np.ndarray:
        """1/|k|^2 with the k = 0 entry set to zero (mean-zero inversion)."""
        inv = np.zeros((self.n, self.n))
        np.divide(1.0, self.ksq, out=inv, where=self.ksq > 0)
        return inv

    @cached_property
    def keep_mask(self) -> np.ndarray:
        return dealias_mask(self.n)

    @property
    def kmax_dealias(self) -> int:
        return dealias_cutoff(self.n)


@dataclass(frozen=True)
class PhysicalField:
    """Real scalar field sampled at the collocation points."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid.n, self.grid.n):
            raise ValueError("values shape does not match grid")
        if not np.isrealobj(self.values):
            raise ValueError("physical fields are real-valued")


@dataclass(frozen=True)
class SpectralField:
    """Real scalar field stored as complex Fourier coefficients in FFT order."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.grid.n, self.grid.n):
            raise ValueError("coefficient array shape does not match grid")
        if self.coeffs.dtype != np.complex128:
            raise ValueError("coefficients must be complex128")

    @property
    def mean(self) -> float:
        return float(self.coeffs[0, 0].real)

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())


def sample(grid: Grid, fn) -> PhysicalField:
    """Evaluate fn(X1, X2) on the collocation mesh."""
    x1, x2 = grid.mesh
    return PhysicalField(grid, np.asarray(fn(x1, x2), dtype=float))


def to_spectral(f: PhysicalField) -> SpectralField:
    n = f.grid.n
    return SpectralField(f.grid, np.fft.fft2(f.values) / (n * n))


def to_physical(f: SpectralField) -> PhysicalField:
    n = f.grid.n
    return PhysicalField(f.grid, np.fft.ifft2(f.coeffs).real * (n * n))


def spectral_derivative(f: SpectralField, axis: int) -> SpectralField:
    """Differentiate along axis 1 or 2 by multiplying with i*k_axis.

    The Nyquist mode is zeroed: at the collocation points the odd derivative
    of that mode vanishes identically, and i*k would make the result complex.
    """
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    g = f.grid
    k = g.k1 if axis == 1 else g.k2
    out = 1j * k * f.coeffs
    nyq = g.n // 2
    if axis == 1:
        out[nyq, :] = 0.0
    else:
        out[:, nyq] = 0.0
    return SpectralField(g, out)


def dealias(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, f.coeffs * f.grid.keep_mask)


def restrict(f: SpectralField, coarse: Grid) -> SpectralField:
    """Spectral truncation of a fine-grid field onto a coarser grid.

    Keeps the modes inside the coarse grid's dealias band; coefficients are
    resolution-independent under the Fourier-series convention, so this is a
    plain copy of the retained entries.
    """
    if coarse.n > f.grid.n:
        raise ValueError("target grid must not be finer than the source")
    kmax = coarse.kmax_dealias
    ks = np.concatenate([np.arange(0, kmax + 1), np.arange(-kmax, 0)])
    fine_idx = ks % f.grid.n
    coarse_idx = ks % coarse.n
    out = np.zeros((coarse.n, coarse.n), dtype=np.complex128)
    out[np.ix_(coarse_idx, coarse_idx)] = f.coeffs[np.ix_(fine_idx, fine_idx)]
    return SpectralField(coarse, out)


def hermitian_defect(f: SpectralField) -> float:
    """Max deviation from the conjugate symmetry c(-k) = conj(c(k))."""
    c = f.coeffs
    mirrored = np.roll(c[::-1, ::-1], 1, axis=(0, 1))
    return float(np.max(np.abs(c - np.conj(mirrored))))


def l2_norm(f: SpectralField) -> float:
    """L^2 norm over the torus via Parseval: 2*pi * sqrt(sum |c_k|^2)."""
    return TWO_PI * float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))
