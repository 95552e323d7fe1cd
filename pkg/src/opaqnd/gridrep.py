"""Position-grid representation of single-mode states.

Deeply squeezed and strongly displaced pump states are awkward in a Fock
truncation but trivial on a position grid, so the grid-state pipeline
works with wavefunctions psi(x) sampled on a uniform FFT-friendly grid.
The momentum representation uses the kernel of this package's quadrature
convention, psi~(p) = (1/sqrt(pi)) Int dx exp(-2ipx) psi(x), which is
unitary with the measures dx and dp.  Displacements are applied spectrally
(exact for band-limited states), so arbitrary real shifts do not require
grid-commensurate values.
"""

from dataclasses import dataclass

import numpy as np

from .quadrature import hermite_functions


@dataclass(frozen=True)
class XGrid:
    """Uniform grid x_k = (k - K/2) dx, k = 0..K-1, with K even."""

    size: int
    dx: float

    def __post_init__(self):
        if self.size % 2 or self.size < 8:
            raise ValueError("grid size must be even and at least 8")

    @property
    def xs(self):
        return (np.arange(self.size) - self.size // 2) * self.dx

    @property
    def dp(self):
        return np.pi / (self.size * self.dx)

    @property
    def ps(self):
        """Momentum samples in FFT order (use sorted() views for plotting)."""
        return np.pi * np.fft.fftfreq(self.size, d=self.dx)

    @property
    def p_nyquist(self):
        return np.pi / (2.0 * self.dx)

    def norm(self, psi):
        return float(np.sqrt(np.sum(np.abs(psi) ** 2) * self.dx))

    def overlap(self, f, g):
        return complex(np.sum(np.conj(f) * g) * self.dx)

    def to_momentum(self, psi):
        """psi~(p_j) on the FFT-ordered momentum grid; unitary."""
        j = np.fft.fftfreq(self.size, d=1.0) * self.size  # signed integer index
        sign = np.where(np.mod(j.astype(np.int64), 2) == 0, 1.0, -1.0)
        return (self.dx / np.sqrt(np.pi)) * sign * np.fft.fft(psi)

    def from_momentum(self, phi):
        j = np.fft.fftfreq(self.size, d=1.0) * self.size
        sign = np.where(np.mod(j.astype(np.int64), 2) == 0, 1.0, -1.0)
        return (self.dp / np.sqrt(np.pi)) * self.size * np.fft.ifft(sign * phi)

    def displace(self, psi, alpha):
        """Apply D(alpha): <x> shifts by Re(alpha), <p> by Im(alpha).

        The position shift is performed in the momentum representation, so
        it is exact for states band-limited below the Nyquist momentum.
        """
        ar, ai = float(np.real(alpha)), float(np.imag(alpha))
        out = np.asarray(psi, dtype=complex)
        if ar != 0.0:
            phi = self.to_momentum(out)
            out = self.from_momentum(np.exp(-2j * self.ps * ar) * phi)
        if ai != 0.0:
            out = np.exp(2j * ai * self.xs) * out
        return np.exp(-1j * ar * ai) * out

    def from_fock(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        basis = hermite_functions(len(coeffs) - 1, self.xs)
        return coeffs @ basis.astype(complex)

    def to_fock(self, psi, n_levels):
        basis = hermite_functions(n_levels - 1, self.xs)
        return (basis.astype(complex) @ np.asarray(psi, dtype=complex)) * self.dx

    def density_x(self, psi):
        return np.abs(psi) ** 2

    def density_p(self, psi):
        """Momentum marginal on the sorted momentum grid; returns (ps, dens)."""
        phi = self.to_momentum(psi)
        order = np.argsort(self.ps)
        return self.ps[order], np.abs(phi[order]) ** 2

    def moments_x(self, psi):
        dens = np.abs(psi) ** 2
        total = np.sum(dens) * self.dx
        mean = np.sum(self.xs * dens) * self.dx / total
        var = np.sum((self.xs - mean) ** 2 * dens) * self.dx / total
        return mean, var

    def characteristic_x(self, psi, freq):
        """E[exp(i freq x)] over the position marginal."""
        dens = np.abs(psi) ** 2
        return complex(np.sum(dens * np.exp(1j * freq * self.xs)) * self.dx)

    def characteristic_p(self, psi, freq):
        """E[exp(i freq p)] = <exp(i freq p_op)> via the exact spectral shift.

        exp(i freq p_op) is the position displacement D(-freq/2), so the
        expectation is an overlap with the displaced state; this avoids the
        coarse FFT momentum grid entirely.
        """
        return self.overlap(psi, self.displace(psi, -freq / 2.0))

    def momentum_amplitudes_at(self, psi, ps):
        """psi~(p) by direct quadrature at arbitrary momenta.

        Exact for states supported inside the grid; use for finely resolved
        momentum marginals beyond the FFT resolution dp.
        """
        ps = np.atleast_1d(np.asarray(ps, dtype=float))
        kernel = np.exp(-2j * np.outer(ps, self.xs))
        return (self.dx / np.sqrt(np.pi)) * (kernel @ np.asarray(psi, dtype=complex))


def gaussian_pump_wavefunction(grid: XGrid, w):
    """Position wavefunction of the p-squeezed vacuum with p-width w.

    A pure Gaussian with x-width 1/(4w); for w = 1/2 this is the vacuum.
    """
    if w <= 0:
        raise ValueError("width must be positive")
    sigma_x = 1.0 / (4.0 * w)
    psi = (2 * np.pi * sigma_x**2) ** (-0.25) * np.exp(-grid.xs**2 / (4 * sigma_x**2))
    return psi.astype(complex)


def default_pump_grid(half_width=10.24, dx=0.01):
    size = int(round(2 * half_width / dx))
    if size % 2:
        size += 1
    return XGrid(size=size, dx=dx)
