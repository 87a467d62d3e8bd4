"""Low-temperature expansion of the transverse-electric Matsubara sum.

For a Drude metal at low temperature the TE part of the free energy
reduces to

    F_TE = (C / beta) * sum'_m g(m),
    g(m) = m * Integral_{sqrt(zeta_m / D)}^inf x ln[1 - B(x) e^{-alpha(m) x}] dx,

with D = omega_p^2 / nu, C = omega_p^2 / (beta hbar nu c^2),
alpha(m) = 2 a sqrt(2 pi C m), and the universal reflection profile

    B(x) = (sqrt(1 + x^2) - x)^4 = exp(-4 asinh x).

Replacing the sum by an integral over continuous m recovers the T = 0
limit, so the low-temperature correction is the Euler-Maclaurin
difference sum' g - integral g. Its leading term gives

    dF_TE = C1 T^2 / (1 + C2 sqrt(T)),
    C1 = (2 ln 2 - 1) k^2 omega_p^2 / (48 hbar nu c^2),

where the Pade denominator resums the half-power correction whose
numeric strength 0.204 is taken as a given constant. Everything here
assumes zeta_m well below the relaxation rate nu; callers outside that
window get a RegimeError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import (C_LIGHT, HBAR, K_BOLTZMANN, TWO_LN2_MINUS_1,
                        matsubara_frequency)
from .dispersion import DrudeModel
from .errors import PrecisionError, RegimeError
from .quadrature import gl_panels, log1mexp

# g'(0) = integral_0^inf x ln(1 - B) dx in closed form
G_SLOPE_EXACT = -0.25 * TWO_LN2_MINUS_1


@dataclass(frozen=True)
class AsymptoticContext:
    """Drude parameters and geometry entering the TE expansion."""

    omega_p: float
    nu: float
    gap: float
    temperature: float

    def __post_init__(self):
        for name in ("omega_p", "nu", "gap", "temperature"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")

    @classmethod
    def from_material(cls, material: DrudeModel, gap: float,
                      temperature: float) -> "AsymptoticContext":
        return cls(material.omega_p, material.nu, gap, temperature)

    @property
    def d_ratio(self) -> float:
        """D = omega_p^2 / nu, rad/s."""
        return self.omega_p ** 2 / self.nu

    @property
    def c_scale(self) -> float:
        """C = omega_p^2 k T / (hbar nu c^2), 1/m^2; linear in T."""
        return (self.omega_p ** 2 * K_BOLTZMANN * self.temperature
                / (HBAR * self.nu * C_LIGHT ** 2))

    def alpha(self, m):
        """Dimensionless decay rate 2 a sqrt(2 pi C m)."""
        return 2.0 * self.gap * np.sqrt(2.0 * math.pi * self.c_scale
                                        * np.asarray(m, dtype=float))

    def zeta(self, m):
        """Matsubara frequency of continuous index m, rad/s."""
        return matsubara_frequency(m, self.temperature)

    @property
    def regime_limit(self) -> float:
        """Largest zeta for which the low-frequency reduction is trusted."""
        return self.nu / 10.0


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """c1 (J/m^2 K^2) and c2 (K^{-1/2}) of dF = c1 T^2 / (1 + c2 sqrt T)."""

    c1: float
    c2: float

    def __post_init__(self):
        if not (self.c1 > 0.0 and self.c2 > 0.0):
            raise ValueError(f"coefficients must be positive, got {self}")


def _g_many(ctx: AsymptoticContext, m):
    """Vectorized g(m) for continuous m > 0, without the regime guard.

    The x mesh is geometric from the lower limit out to the point where
    either the exponential or the x^{-4} decay of B has exhausted the
    integrand; every mesh quantity varies smoothly with m so that batch
    results can be differenced between sums and integrals.
    """
    m = np.atleast_1d(np.asarray(m, dtype=float))
    alpha = ctx.alpha(m)
    x_min = np.sqrt(ctx.zeta(m) / ctx.d_ratio)
    x_max = np.minimum(50.0 / alpha + 2.0 * x_min, 4e5)
    panels = 56
    ratio = (x_max / x_min) ** (1.0 / panels)
    breaks = x_min[:, None] * ratio[:, None] ** np.arange(panels + 1)[None, :]
    nodes, weights = gl_panels(breaks, n=16)
    w = alpha[:, None] * nodes + 4.0 * np.arcsinh(nodes)
    vals = nodes * log1mexp(w)
    return m * (vals * weights).sum(axis=1)


def g_of_m(ctx: AsymptoticContext, m) -> float:
    """g(m) of the TE expansion; g(0) = 0. Scalar m >= 0.

    Raises RegimeError once zeta_m exceeds nu/10, where the
    low-frequency reflection profile stops being valid.
    """
    m = float(m)
    if m < 0.0:
        raise ValueError(f"m must be >= 0, got {m}")
    if m == 0.0:
        return 0.0
    if ctx.zeta(m) > ctx.regime_limit:
        raise RegimeError(
            f"zeta_{m:g} = {ctx.zeta(m):.3e} rad/s exceeds the expansion "
            f"window nu/10 = {ctx.regime_limit:.3e} rad/s")
    return float(_g_many(ctx, m)[0])


def te_slope_integral(rel_tol: float = 1e-12) -> float:
    """Numerical g'(0) = integral_0^inf x ln(1 - B(x)) dx.

    Closed form -(2 ln 2 - 1)/4; kept numerical so the reduction of the
    integrand can be checked against the constant.
    """
    breaks = np.geomspace(1e-12, 4e5, 141)[None, :]
    nodes, weights = gl_panels(breaks, n=20)
    vals = nodes * log1mexp(4.0 * np.arcsinh(nodes))
    return float((vals * weights).sum())


def delta_f_te_leading(material: DrudeModel, temperature: float) -> float:
    """Gap-independent leading TE correction C1 T^2, J/m^2."""
    if temperature < 0.0:
        raise ValueError(f"temperature must be >= 0 K, got {temperature}")
    c1 = (TWO_LN2_MINUS_1 * K_BOLTZMANN ** 2 * material.omega_p ** 2
          / (48.0 * HBAR * material.nu * C_LIGHT ** 2))
    return c1 * temperature ** 2


def coefficients(material: DrudeModel, gap: float) -> AsymptoticCoefficients:
    """Pade coefficients (c1, c2) for a Drude metal at the given gap.

    c1 multiplies T^2 and does not depend on the gap; c2 scales
    linearly with the gap and carries the fixed strength 0.204 of the
    half-power correction.
    """
    if not gap > 0.0:
        raise ValueError(f"gap must be > 0 m, got {gap}")
    c1 = delta_f_te_leading(material, 1.0)
    c_per_kelvin = (material.omega_p ** 2 * K_BOLTZMANN
                    / (HBAR * material.nu * C_LIGHT ** 2))
    c2 = (0.204 * gap * math.sqrt(2.0 * math.pi * c_per_kelvin)
          / (4.0 * abs(G_SLOPE_EXACT)))
    return AsymptoticCoefficients(c1=c1, c2=c2)


def pade_delta_f(coeffs: AsymptoticCoefficients, temperature: float) -> float:
    """dF_TE = c1 T^2 / (1 + c2 sqrt T); positive for T > 0, J/m^2."""
    if temperature < 0.0:
        raise ValueError(f"temperature must be >= 0 K, got {temperature}")
    return (coeffs.c1 * temperature ** 2
            / (1.0 + coeffs.c2 * math.sqrt(temperature)))


# one-sided 5-point endpoint stencils (4th order for f', 2nd for f''')
_D1_STENCIL = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_D3_STENCIL = np.array([-5.0, 18.0, -24.0, 14.0, -3.0]) / 2.0


def _endpoint_derivative(g, stencil, power: int, h: float):
    vals = np.array([g(k * h) for k in range(5)], dtype=float)
    return float(stencil @ vals) / h ** power


def euler_maclaurin_sum(g, n_derivatives: int, h: float = 0.05) -> float:
    """Endpoint-correction estimate of sum'_{m>=0} g(m) - integral_0^inf g.

    Returns -(1/12) g'(0) for n_derivatives = 1 and adds
    +(1/720) g'''(0) for n_derivatives = 2, with the derivatives taken
    by one-sided finite differences at step h plus one Richardson
    level. A non-smooth g shows up as disagreement between the two
    Richardson levels and raises PrecisionError.
    """
    if n_derivatives not in (1, 2):
        raise ValueError(f"n_derivatives must be 1 or 2, got {n_derivatives}")
    if not h > 0.0:
        raise ValueError(f"h must be > 0, got {h}")

    def rich(stencil, power, weight):
        coarse = _endpoint_derivative(g, stencil, power, h)
        fine = _endpoint_derivative(g, stencil, power, h / 2.0)
        extrap = (weight * fine - coarse) / (weight - 1.0)
        scale = max(abs(extrap), abs(coarse), 1e-30)
        if abs(fine - coarse) > 0.05 * scale + 1e-12:
            raise PrecisionError(
                f"endpoint derivative (order {power}) unstable: "
                f"h -> {coarse:.6e}, h/2 -> {fine:.6e}; "
                "g appears non-smooth at 0")
        return extrap

    total = -rich(_D1_STENCIL, 1, 16.0) / 12.0
    if n_derivatives == 2:
        total += rich(_D3_STENCIL, 3, 8.0) / 720.0
    return total


def g_slope_at_zero(ctx: AsymptoticContext,
                    steps=(1e-3, 5e-4, 2.5e-4)) -> float:
    """g'(0) from secants of g_of_m extrapolated to step 0.

    g carries a half-power term at the origin, so the secants
    g(h)/h are fitted with the model s + b sqrt(h) + c h and the
    intercept s is returned. The half-power coefficient shrinks with
    sqrt(T), so small-temperature contexts extrapolate best.
    """
    hs = np.asarray(steps, dtype=float)
    if hs.size != 3 or np.any(hs <= 0.0):
        raise ValueError("steps must be three positive step sizes")
    secants = _g_many(ctx, hs) / hs
    basis = np.stack([np.ones_like(hs), np.sqrt(hs), hs], axis=1)
    coeff = np.linalg.solve(basis, secants)
    return float(coeff[0])
