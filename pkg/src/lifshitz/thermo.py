"""Thermodynamic analysis: thermal shifts, entropy, and limit checks.

The thermal part of the free energy is tiny against the T = 0 value at
low temperature, so it is never formed as a difference of two large
independent results. Writing the zero-temperature integral in the
summation variable u = zeta hbar / (2 pi k T) gives

    F(T) - F(0) = (k T / 8 pi a^2) [ sum'_m h(m) - Integral_0^inf h(u) du ]

with one shared evaluator h for both the sum and the integral, so the
smooth part of any quadrature bias cancels structurally. The difference
itself is computed by splitting at an index M: below M the sum and
integral are evaluated directly (the integral in the variable t =
sqrt(u), which absorbs the half-power behaviour of h at the origin);
above M both tails are identical up to endpoint derivative corrections,

    sum' h - int h = [sum''_0^M h - int_0^M h] - h'(M)/12 + h'''(M)/720 - ...,

with the double prime marking half weight at both ends. The same
machinery drives the low-frequency expansion form (g of the
asymptotics module) and the exact-permittivity form (reduced Matsubara
integrals of the core module).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .asymptotics import AsymptoticCoefficients, AsymptoticContext, _g_many, pade_delta_f
from .constants import C_LIGHT, HBAR, K_BOLTZMANN, ZETA3, matsubara_frequency
from .core import (IdealMetal, PlateSystem, ReflectionModel, TmOnlyIdealMetal,
                   mode_integrals, pressure, zero_mode_integrals)
from .dispersion import DrudeModel
from .errors import PrecisionError, RegimeError
from .quadrature import fsum, gl_panels

_EPS = np.finfo(float).eps


def _t_mesh(m_star: int):
    """Panel breaks in t = sqrt(u) on [0, sqrt(m_star)], graded at 0."""
    top = math.sqrt(m_star)
    geo = np.geomspace(1e-3, 0.4, 19)
    lin = np.arange(0.75, top, 0.35)
    breaks = np.concatenate([[0.0], geo, lin, [top]])
    return breaks[None, :]


def sum_minus_integral(h: Callable, m_star: int = 128):
    """sum'_{m>=0} h(m) - Integral_0^inf h(u) du for decaying smooth h.

    ``h`` must accept a 1-D float array of u >= 0 and evaluate
    elementwise; it is called exactly once. Returns (delta, noise)
    where noise estimates the cancellation roundoff floor.
    """
    if m_star < 16:
        raise ValueError(f"m_star must be >= 16, got {m_star}")
    breaks = _t_mesh(m_star)
    t_nodes, t_weights = gl_panels(breaks, n=20)
    u_int = np.arange(0.0, m_star + 3.0)
    u_all = np.concatenate([u_int, (t_nodes * t_nodes).ravel()])
    values = np.asarray(h(u_all), dtype=float)
    hv = values[:u_int.size]
    hq = values[u_int.size:]

    sum_terms = hv[:m_star + 1].copy()
    sum_terms[0] *= 0.5
    sum_terms[m_star] *= 0.5
    integrand = (t_weights * 2.0 * t_nodes).ravel() * hq
    delta = fsum(sum_terms) - fsum(integrand)

    # endpoint derivative corrections at M from 5-point central stencils
    hm2, hm1, hp1, hp2 = hv[m_star - 2], hv[m_star - 1], hv[m_star + 1], hv[m_star + 2]
    d1 = (hm2 - 8.0 * hm1 + 8.0 * hp1 - hp2) / 12.0
    d3 = (-hm2 + 2.0 * hm1 - 2.0 * hp1 + hp2) / 2.0
    delta += -d1 / 12.0 + d3 / 720.0

    noise = _EPS * (np.abs(sum_terms).sum() + np.abs(integrand).sum())
    return delta, noise


def delta_f_te_numeric(system: PlateSystem, tol: float = 1e-9,
                       m_star: int = 128) -> float:
    """TE thermal shift F_TE(T) - F_TE(0) in the low-frequency form, J/m^2.

    Evaluates (C/beta) [sum' g(m) - int g(u) du] with the expansion
    integrand; positive throughout its validity window. The index
    cutoff lies beyond the strict frequency window at the top of the
    temperature range, but those indices enter only through boundary
    terms that cancel between sum and integral.
    """
    if not isinstance(system.model, DrudeModel):
        raise TypeError("the low-frequency TE expansion needs a DrudeModel, "
                        f"got {type(system.model).__name__}")
    if not 0.0 < tol <= 1e-8:
        raise ValueError(f"tol must be in (0, 1e-8], got {tol}")
    if system.temperature > 0.2:
        raise RegimeError(
            f"T = {system.temperature} K is outside the low-temperature "
            "window (T <= 0.2 K) of the expansion")
    ctx = AsymptoticContext.from_material(system.model, system.gap,
                                          system.temperature)

    def h(u):
        out = np.zeros_like(u)
        pos = u > 0.0
        out[pos] = _g_many(ctx, u[pos])
        return out

    delta, noise = sum_minus_integral(h, m_star=m_star)
    if abs(delta) < 50.0 * noise:
        raise PrecisionError(
            f"thermal shift {delta:.3e} is below the cancellation noise "
            f"floor {noise:.3e}; temperature too low to resolve")
    c_over_beta = ctx.c_scale * K_BOLTZMANN * system.temperature
    result = c_over_beta * delta
    if result <= 0.0:
        raise PrecisionError(
            f"TE thermal shift came out non-positive ({result:.3e}); "
            "outside the trustable window")
    return result


def free_energy_shift(system: PlateSystem, polarization: str = "both",
                      m_star: int = 128) -> float:
    """F(T) - F(0) with the exact permittivity, J/m^2.

    Valid at any temperature where the model is; uses one evaluator for
    the Matsubara sum and its continuum limit so the shift survives in
    double precision down to millikelvin temperatures.
    ``polarization`` is "both", "tm", or "te".
    """
    if polarization not in ("both", "tm", "te"):
        raise ValueError(f"polarization must be both/tm/te, got {polarization!r}")
    model, gap, temp = system.model, system.gap, system.temperature
    zeta1 = matsubara_frequency(1, temp)
    s0_tm, s0_te, _ = zero_mode_integrals(model, gap, "energy")
    s0 = {"both": s0_tm + s0_te, "tm": s0_tm, "te": s0_te}[polarization]

    def h(u):
        out = np.empty_like(u)
        pos = u > 0.0
        s_tm, s_te, _, _ = mode_integrals(model, gap, zeta1 * u[pos], "energy")
        sel = {"both": s_tm + s_te, "tm": s_tm, "te": s_te}[polarization]
        out[pos] = sel
        out[~pos] = s0
        return out

    delta, noise = sum_minus_integral(h, m_star=m_star)
    if abs(delta) < 50.0 * noise:
        raise PrecisionError(
            f"thermal shift {delta:.3e} is below the cancellation noise "
            f"floor {noise:.3e}; temperature too low to resolve")
    pref = K_BOLTZMANN * temp / (8.0 * math.pi * gap ** 2)
    return pref * delta


def pressure_shift(system: PlateSystem, polarization: str = "both",
                   m_star: int = 128) -> float:
    """P(T) - P(0) with the exact permittivity, Pa.

    Same sum-minus-integral construction as free_energy_shift, with
    the pressure kernel. The gap-independent part of the thermal free
    energy carries no pressure, so this shift decays one power of T
    faster than the free-energy shift (T^4 against T^3 for the TM
    channel of a good metal).
    """
    if polarization not in ("both", "tm", "te"):
        raise ValueError(f"polarization must be both/tm/te, got {polarization!r}")
    model, gap, temp = system.model, system.gap, system.temperature
    zeta1 = matsubara_frequency(1, temp)
    s0_tm, s0_te, _ = zero_mode_integrals(model, gap, "pressure")
    s0 = {"both": s0_tm + s0_te, "tm": s0_tm, "te": s0_te}[polarization]

    def h(u):
        out = np.empty_like(u)
        pos = u > 0.0
        s_tm, s_te, _, _ = mode_integrals(model, gap, zeta1 * u[pos], "pressure")
        sel = {"both": s_tm + s_te, "tm": s_tm, "te": s_te}[polarization]
        out[pos] = sel
        out[~pos] = s0
        return out

    delta, noise = sum_minus_integral(h, m_star=m_star)
    if abs(delta) < 50.0 * noise:
        raise PrecisionError(
            f"thermal pressure shift {delta:.3e} is below the cancellation "
            f"noise floor {noise:.3e}; temperature too low to resolve")
    pref = -K_BOLTZMANN * temp / (8.0 * math.pi * gap ** 3)
    return pref * delta


@dataclass(frozen=True)
class LowTempFit:
    """Coefficients of dF = d1 (T^2 - d2 T^{5/2} + d3 T^3) + ..."""

    d1: float
    d2: float
    d3: float
    residual_norm: float
    grid: tuple


def fit_low_temp(samples: Sequence, residual_threshold: float = 0.05) -> LowTempFit:
    """Weighted least-squares fit of the low-temperature shift model.

    ``samples`` is a sequence of (T, dF) pairs, at least 8 of them,
    strictly increasing in T and spanning at least a decade. The fit
    runs in tau = sqrt(T / T_max), where the basis {tau^4, tau^5,
    tau^6} is mildly conditioned. Rows are weighted by 1/T^2 beyond
    the 1/T^2 that equalizes relative residuals: the extra emphasis on
    small T keeps terms outside the basis (T^{7/2} and up, strongest
    at the top of the window) from biasing the T^{5/2} coefficient.
    """
    pts = [(float(t), float(df)) for t, df in samples]
    if len(pts) < 8:
        raise ValueError(f"need at least 8 samples, got {len(pts)}")
    t = np.array([p[0] for p in pts])
    df = np.array([p[1] for p in pts])
    if not np.all(np.diff(t) > 0.0):
        raise ValueError("sample temperatures must be strictly increasing")
    if t[-1] / t[0] < 10.0:
        raise ValueError("samples must span at least one decade in T")
    if t[-1] > 0.2:
        raise ValueError("samples extend beyond the low-temperature window")

    t_max = t[-1]
    tau = np.sqrt(t / t_max)
    basis = np.stack([tau ** 4, tau ** 5, tau ** 6], axis=1)
    w = (1.0 / t ** 4)[:, None]
    a_mat = basis * w
    b_vec = df * w[:, 0]
    cond = np.linalg.cond(a_mat)
    if cond > 1e10:
        raise PrecisionError(f"fit design matrix ill-conditioned: cond = {cond:.3e}")
    coeff, *_ = np.linalg.lstsq(a_mat, b_vec, rcond=None)
    c4, c5, c6 = coeff
    d1 = c4 / t_max ** 2
    if d1 <= 0.0:
        raise PrecisionError(f"fit produced non-positive T^2 coefficient {d1:.3e}")
    d2 = -c5 / (d1 * t_max ** 2.5)
    d3 = c6 / (d1 * t_max ** 3)
    model = basis @ coeff
    residual_norm = float(np.sqrt(np.mean(((model - df) / df) ** 2)))
    if residual_norm > residual_threshold:
        raise PrecisionError(
            f"fit residual {residual_norm:.3e} exceeds threshold "
            f"{residual_threshold:.3e}")
    return LowTempFit(d1=float(d1), d2=float(d2), d3=float(d3),
                      residual_norm=residual_norm, grid=tuple(pts))


def default_fit_grid() -> np.ndarray:
    """12 log-spaced temperatures in [2e-3, 6e-2] K."""
    return np.geomspace(2e-3, 6e-2, 12)


def collect_lowtemp_samples(material: DrudeModel, gap: float,
                            t_grid=None, tol: float = 1e-9) -> list:
    """(T, dF_TE) pairs from the low-frequency evaluator."""
    if t_grid is None:
        t_grid = default_fit_grid()
    out = []
    for t in np.asarray(t_grid, dtype=float):
        system = PlateSystem(gap=gap, temperature=float(t), model=material)
        out.append((float(t), delta_f_te_numeric(system, tol=tol)))
    return out


@dataclass(frozen=True)
class RSeries:
    """Relative difference R(T) between the Pade form and numeric data."""

    samples: tuple
    slope_at_origin: float
    intercept: float
    intercept_uncertainty: float
    correlation: float


def r_series(coeffs: AsymptoticCoefficients, numeric: Callable,
             t_grid) -> RSeries:
    """R(T) = (dF_pade - dF_numeric) / dF_pade on a temperature grid.

    ``numeric`` maps T to the numeric shift. A straight line is fitted
    on the lowest decade of the grid; a vanishing intercept with linear
    growth is the signature that the T^2 coefficient is exact and the
    first neglected term is O(T).
    """
    t = np.sort(np.asarray(t_grid, dtype=float))
    if t.size < 4:
        raise ValueError(f"need at least 4 grid points, got {t.size}")
    if np.any(t <= 0.0):
        raise ValueError("grid temperatures must be positive")
    r_vals = np.empty_like(t)
    for i, ti in enumerate(t):
        th = pade_delta_f(coeffs, float(ti))
        r_vals[i] = (th - float(numeric(float(ti)))) / th
    window = t <= 10.0 * t[0]
    tw, rw = t[window], r_vals[window]
    if tw.size < 3:
        raise ValueError("lowest decade of the grid holds fewer than 3 points")
    design = np.stack([np.ones_like(tw), tw], axis=1)
    coeff, *_ = np.linalg.lstsq(design, rw, rcond=None)
    resid = rw - design @ coeff
    dof = max(tw.size - 2, 1)
    sigma2 = float(resid @ resid) / dof
    cov00 = sigma2 * np.linalg.inv(design.T @ design)[0, 0]
    if np.std(rw) == 0.0:
        corr = 1.0  # exactly linear (constant) data
    else:
        corr = float(np.corrcoef(tw, rw)[0, 1])
    return RSeries(samples=tuple((float(a), float(b)) for a, b in zip(t, r_vals)),
                   slope_at_origin=float(coeff[1]),
                   intercept=float(coeff[0]),
                   intercept_uncertainty=float(math.sqrt(max(cov00, 0.0))),
                   correlation=corr)


def entropy(system: PlateSystem, temperature: float | None = None,
            tol: float = 1e-9, m_star: int = 128) -> float:
    """Entropy per unit area S = -dF/dT, J/(m^2 K).

    Differentiates the thermal shift F(T) - F(0) (the T = 0 part drops
    out of the derivative), with a Richardson-extrapolated central
    difference at step h = max(T/10, 1e-4 K).
    """
    t0 = system.temperature if temperature is None else float(temperature)
    if not t0 > 0.0:
        raise ValueError(f"temperature must be > 0 K, got {t0}")
    h = max(t0 / 10.0, 1e-4)
    if t0 - h <= 0.0:
        raise ValueError(
            f"T = {t0} K too small for the finite-difference step {h} K")

    def shift_at(t):
        sys_t = PlateSystem(gap=system.gap, temperature=t, model=system.model)
        return free_energy_shift(sys_t, m_star=m_star)

    def central(step):
        return (shift_at(t0 + step) - shift_at(t0 - step)) / (2.0 * step)

    coarse = central(h)
    fine = central(h / 2.0)
    s_val = -(4.0 * fine - coarse) / 3.0
    fd_err = abs(fine - coarse) * 4.0 / 3.0
    if fd_err > 0.5 * abs(s_val) + 1e-30:
        raise PrecisionError(
            f"entropy finite difference unresolved: S = {s_val:.3e}, "
            f"step-halving change {fd_err:.3e}; raise T or tighten tol")
    return s_val


def classical_pressure(gap: float, temperature: float) -> float:
    """High-temperature Drude limit -zeta(3) k T / (8 pi a^3), Pa."""
    return -ZETA3 * K_BOLTZMANN * temperature / (8.0 * math.pi * gap ** 3)


def classical_limit_check(gap: float, temperature: float,
                          model: ReflectionModel | None = None,
                          tol: float = 1e-9) -> float:
    """Ratio of the computed pressure to the classical Drude limit.

    Requires the deep classical regime 2 pi k T a / (hbar c) >= 5. For
    a Drude metal only the half-weighted TM zero mode survives and the
    ratio approaches 1; an ideal metal keeps the TE zero mode too and
    doubles the reference.
    """
    margin = 2.0 * math.pi * K_BOLTZMANN * temperature * gap / (HBAR * C_LIGHT)
    if margin < 5.0:
        raise RegimeError(
            f"2 pi k T a / (hbar c) = {margin:.2f} < 5: not in the deep "
            "classical regime")
    from .dispersion import GOLD
    system = PlateSystem(gap=gap, temperature=temperature,
                         model=GOLD if model is None else model)
    p = pressure(system, tol=tol)
    return p.pressure / classical_pressure(gap, temperature)
