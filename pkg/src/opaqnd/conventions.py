"""Quadrature and squeezing conventions used throughout the package.

Quadratures are defined as x = (a + a^dag)/2 and p = (a - a^dag)/(2i),
so [x, p] = i/2 and the vacuum has Var(x) = Var(p) = 1/4.  A Gaussian
quadrature "width" always means the standard deviation of the marginal
distribution; the vacuum width is w0 = 1/2.  Squeezing in dB is measured
relative to w0:  dB = -20 log10(w / w0).  Time is measured in units of
the nonlinear rate (g = 1) unless stated otherwise.
"""

import numpy as np

VACUUM_WIDTH = 0.5
VACUUM_VARIANCE = 0.25


def squeezing_db(width):
    """Squeezing level in dB of a quadrature with standard deviation `width`.

    Positive values mean squeezed below vacuum (w < 1/2), negative values
    anti-squeezed.  `width` may be a scalar or array.
    """
    width = np.asarray(width, dtype=float)
    if np.any(width <= 0):
        raise ValueError("quadrature width must be positive")
    out = -20.0 * np.log10(width / VACUUM_WIDTH)
    return float(out) if out.ndim == 0 else out


def width_from_db(db):
    """Quadrature standard deviation corresponding to a squeezing level in dB."""
    db = np.asarray(db, dtype=float)
    out = VACUUM_WIDTH * 10.0 ** (-db / 20.0)
    return float(out) if out.ndim == 0 else out


def variance_db(variance):
    """Variance expressed in dB relative to the vacuum variance 1/4.

    Negative values indicate squeezing below the vacuum level.  This is the
    quantity plotted on "squeezing vs time" axes.
    """
    variance = np.asarray(variance, dtype=float)
    if np.any(variance <= 0):
        raise ValueError("variance must be positive")
    out = 10.0 * np.log10(variance / VACUUM_VARIANCE)
    return float(out) if out.ndim == 0 else out
