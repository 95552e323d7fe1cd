"""System parameters of the two-mode quadratic interaction.

The primitive parameters are the nonlinear rate g, the phase mismatch
delta and the (real, non-negative) pump displacement beta; everything
else is derived:

    r      = 2 g beta          (quadratic signal drive)
    Delta  = sqrt(delta^2 - r^2)
    u      = atanh(r/delta)/2  (squeezing of the measurement basis)
    g_eff  = g sinh(2u)        (enhanced coupling of the dispersive form)

The squeezed-basis transform exists only for delta > r.  Figures are
usually specified through the targets (Delta/g, g_eff/g), hence
`params_from_targets` inverts the map.
"""

from dataclasses import dataclass, field

import numpy as np


class BogoliubovDomainError(ValueError):
    """The squeezed-basis transform requires delta > r >= 0."""


def bogoliubov_params(delta, r, g=1.0):
    """Map (delta, r) to (Delta, u, g_eff).

    Delta = sqrt(delta^2 - r^2), u = atanh(r/delta)/2, g_eff = g sinh(2u).
    Raises BogoliubovDomainError outside delta > r >= 0.
    """
    if r < 0:
        raise BogoliubovDomainError(f"r must be non-negative, got {r}")
    if delta <= r:
        raise BogoliubovDomainError(
            f"need delta > r for the squeezed-basis transform (delta={delta}, r={r})"
        )
    Delta = np.sqrt(delta**2 - r**2)
    u = 0.5 * np.arctanh(r / delta)
    g_eff = g * np.sinh(2 * u)
    return float(Delta), float(u), float(g_eff)


def params_from_targets(Delta, g_eff, g=1.0):
    """Invert bogoliubov_params: find (delta, r) producing the given targets.

    Uses sinh(2u) = g_eff/g, delta = Delta cosh(2u), r = Delta sinh(2u).
    """
    if Delta <= 0:
        raise ValueError("Delta target must be positive")
    if g_eff < 0:
        raise ValueError("g_eff target must be non-negative")
    s2u = g_eff / g
    c2u = np.sqrt(1.0 + s2u**2)
    return float(Delta * c2u), float(Delta * s2u)


@dataclass(frozen=True)
class SystemParams:
    """Rates of the two-mode model, in units of g unless g is set.

    kappa_a / kappa_b are the signal / pump loss rates and lam the pump
    drive rate of the cavity configuration; all three default to zero
    (closed system).
    """

    delta: float
    beta: float
    g: float = 1.0
    kappa_a: float = 0.0
    kappa_b: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be non-negative (fix the pump phase)")
        if self.kappa_a < 0 or self.kappa_b < 0:
            raise ValueError("loss rates must be non-negative")

    @property
    def r(self):
        return 2.0 * self.g * self.beta

    @property
    def Delta(self):
        return bogoliubov_params(self.delta, self.r, self.g)[0]

    @property
    def u(self):
        return bogoliubov_params(self.delta, self.r, self.g)[1]

    @property
    def g_eff(self):
        return bogoliubov_params(self.delta, self.r, self.g)[2]

    @classmethod
    def from_targets(cls, Delta, g_eff, g=1.0, **kw):
        """Build parameters from the (Delta, g_eff) targets used by presets."""
        delta, r = params_from_targets(Delta, g_eff, g)
        return cls(delta=delta, beta=r / (2.0 * g), g=g, **kw)
