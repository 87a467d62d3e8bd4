"""Lifshitz free energy and pressure of two parallel half-spaces.

The free energy per unit area at temperature T and gap a is the
Matsubara sum

    F = (k_B T / 8 pi a^2) * sum'_m [ S_TM(zeta_m) + S_TE(zeta_m) ],
    S_pol(zeta) = Integral_{y0}^{inf} y ln(1 - R_pol e^{-y}) dy,

with y = 2 q a, y0 = 2 a zeta / c, and the prime giving the m = 0 term
half weight. The squared reflection coefficients at imaginary frequency
zeta are

    A = R_TM = ((s - eps p) / (s + eps p))^2,
    B = R_TE = ((s - p) / (s + p))^2,
    s = sqrt(eps - 1 + p^2),  p = q c / zeta,

evaluated with the cancellation-free rewrites s - p = (eps-1)/(s+p) and
s - eps p = (eps-1)(1 - p s - p^2)/(s + p). The pressure follows from
P = -dF/da:

    P = -(k_B T / 8 pi a^3) * sum'_m Integral y^2 / (e^{y - ln R} - 1) dy.

The m = 0 term never comes from a zeta -> 0 numerical limit; its
reflection coefficients are the analytic limits supplied by
``zero_mode_coefficients`` (Drude-like metals lose the TE zero mode,
the plasma model keeps a q-dependent one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .constants import C_LIGHT, K_BOLTZMANN, matsubara_frequency
from .dispersion import (ConstantPermittivity, DispersionModel, DrudeModel,
                         PlasmaModel, TabulatedPermittivity)
from .errors import ConvergenceError
from .quadrature import adaptive_gk, fsum, gk_panels, inv_expm1, log1mexp


@dataclass(frozen=True)
class IdealMetal:
    """Perfect reflector: A = B = 1 at every frequency including m = 0."""


@dataclass(frozen=True)
class TmOnlyIdealMetal:
    """Forced A = 1, B = 0 at every frequency; isolates the TM channel."""


ReflectionModel = Union[DispersionModel, IdealMetal, TmOnlyIdealMetal]


@dataclass(frozen=True)
class PlateSystem:
    """Two identical parallel half-spaces separated by vacuum."""

    gap: float
    temperature: float
    model: ReflectionModel

    def __post_init__(self):
        if not self.gap > 0.0:
            raise ValueError(f"gap must be > 0 m, got {self.gap}")
        if not self.temperature > 0.0:
            raise ValueError(
                f"temperature must be > 0 K, got {self.temperature}")


@dataclass(frozen=True)
class ReflectionPair:
    """Squared TM/TE reflection coefficients (A, B)."""

    a_tm: object
    b_te: object


@dataclass(frozen=True)
class MatsubaraTerm:
    """One term of the Matsubara sum, as it enters the sum.

    The m = 0 value already carries its half weight. Units J/m^2.
    """

    total: float
    te_part: float
    tm_part: float
    error: float


@dataclass(frozen=True)
class FreeEnergyResult:
    total: float
    te_part: float
    tm_part: float
    terms: list
    m_max: int
    tail_estimate: float


@dataclass(frozen=True)
class PressureResult:
    pressure: float
    te_part: float
    tm_part: float
    m_max: int
    tail_estimate: float


@dataclass(frozen=True)
class CoefficientSurface:
    zeta: np.ndarray
    kperp: np.ndarray
    a_tm: np.ndarray
    b_te: np.ndarray


# graded offsets from the lower integration limit y0; the deep geometric
# section resolves the ln(1 - e^{-y}) endpoint of near-unity reflectors,
# the linear section the exponential decay out to y0 + 54
_Y_OFFSETS = np.array([
    0.0, 1e-7, 3e-7, 1e-6, 3e-6, 1e-5, 3e-5, 1e-4, 3e-4,
    1e-3, 3e-3, 1e-2, 0.03, 0.1, 0.3, 0.6, 1.0, 1.6, 2.5,
    4.0, 6.0, 8.5, 11.5, 15.0, 19.0, 24.0, 30.0, 37.0, 45.0, 54.0,
])


def _gk_rows(breaks):
    """Kronrod nodes/weights for row meshes, plus the panel shape."""
    nodes, wk, wg = gk_panels(breaks)
    return nodes, wk, wg


def _gk_integrate(values, wk, wg, panels: int):
    """Row integrals with a per-panel Kronrod error model."""
    shape = values.shape[:-1] + (panels, 15)
    v = values.reshape(shape)
    k = v * wk.reshape(shape)
    g = v * wg.reshape(shape)
    k_panel = k.sum(axis=-1)
    g_panel = g.sum(axis=-1)
    scale = np.abs(k).sum(axis=-1)
    diff = np.abs(k_panel - g_panel)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0.0, 200.0 * diff / np.maximum(scale, 1e-300), 0.0)
    err_panel = scale * np.minimum(1.0, rel ** 1.5)
    return k_panel.sum(axis=-1), err_panel.sum(axis=-1)


def _log_reflection(model: ReflectionModel, zeta_col, p):
    """(ln A, ln B) on a grid; p = q c / zeta >= 1. None means R identically 0."""
    if isinstance(model, IdealMetal):
        z = np.zeros(np.broadcast_shapes(np.shape(zeta_col), np.shape(p)))
        return z, z.copy()
    if isinstance(model, TmOnlyIdealMetal):
        return np.zeros(np.broadcast_shapes(np.shape(zeta_col), np.shape(p))), None
    em1 = np.asarray(model.eps_minus_one(zeta_col), dtype=float)
    with np.errstate(divide="ignore"):
        ln_em1 = np.log(em1)
    s = np.sqrt(em1 + p * p)
    sp = s + p
    ln_sp = np.log(sp)
    ln_b = 2.0 * (ln_em1 - 2.0 * ln_sp)
    ln_a = 2.0 * (ln_em1 + np.log(p * sp - 1.0) - ln_sp
                  - np.log(s + (1.0 + em1) * p))
    return ln_a, ln_b


def reflection_coefficients(model: ReflectionModel, zeta, q) -> ReflectionPair:
    """Squared reflection coefficients A (TM) and B (TE) at (zeta, q).

    Requires q >= zeta/c, i.e. points inside the integration domain of
    the Matsubara sum. zeta and q broadcast together.
    """
    zeta = np.asarray(zeta, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(zeta <= 0.0):
        raise ValueError("zeta must be > 0; use zero_mode_coefficients for m = 0")
    if np.any(q * C_LIGHT < zeta * (1.0 - 1e-12)):
        raise ValueError("q must be >= zeta/c (evanescent-side domain)")
    p = np.maximum(q * C_LIGHT / zeta, 1.0)
    ln_a, ln_b = _log_reflection(model, zeta, p)
    a = np.exp(ln_a)
    b = np.exp(ln_b) if ln_b is not None else np.zeros_like(a)
    if a.ndim == 0:
        return ReflectionPair(float(a), float(b))
    return ReflectionPair(a, b)


def zero_mode_coefficients(model: ReflectionModel, q) -> ReflectionPair:
    """Analytic zeta -> 0 limits of (A, B) at transverse wavenumber q."""
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0.0):
        raise ValueError("q must be > 0")
    ones = np.ones_like(q)
    zeros = np.zeros_like(q)
    if isinstance(model, IdealMetal):
        return ReflectionPair(_maybe_scalar(ones), _maybe_scalar(ones.copy()))
    if isinstance(model, TmOnlyIdealMetal):
        return ReflectionPair(_maybe_scalar(ones), _maybe_scalar(zeros))
    if isinstance(model, PlasmaModel):
        kappa = model.omega_p / C_LIGHT
        root = np.sqrt(q * q + kappa * kappa)
        b = ((kappa * kappa) / (root + q) ** 2) ** 2
        return ReflectionPair(_maybe_scalar(ones), _maybe_scalar(b))
    if isinstance(model, ConstantPermittivity):
        eps = model.value
        a = ((eps - 1.0) / (eps + 1.0)) ** 2 * ones
        return ReflectionPair(_maybe_scalar(a), _maybe_scalar(zeros))
    if isinstance(model, (DrudeModel, TabulatedPermittivity)):
        # eps ~ 1/zeta: TM saturates at 1, the TE mode dies with
        # zeta^2 (eps - 1) -> 0
        return ReflectionPair(_maybe_scalar(ones), _maybe_scalar(zeros))
    raise TypeError(f"unsupported model {model!r}")


def _maybe_scalar(arr):
    return float(arr) if arr.ndim == 0 else arr


def _zero_mode_log_reflection(model: ReflectionModel, q):
    """(ln A0, ln B0) with None for an absent channel, stable near B0 -> 1."""
    if isinstance(model, IdealMetal):
        z = np.zeros_like(q)
        return z, z.copy()
    if isinstance(model, (TmOnlyIdealMetal, DrudeModel, TabulatedPermittivity)):
        return np.zeros_like(q), None
    if isinstance(model, PlasmaModel):
        kappa = model.omega_p / C_LIGHT
        root = np.sqrt(q * q + kappa * kappa)
        ln_b = 4.0 * (np.log(kappa) - np.log(root + q))
        return np.zeros_like(q), ln_b
    if isinstance(model, ConstantPermittivity):
        eps = model.value
        if eps == 1.0:
            return None, None
        ln_a = np.full_like(q, 2.0 * (math.log(eps - 1.0) - math.log(eps + 1.0)))
        return ln_a, None
    raise TypeError(f"unsupported model {model!r}")


def _energy_kernel(y, ln_r):
    if ln_r is None:
        return np.zeros_like(y)
    return y * log1mexp(y - ln_r)


def _pressure_kernel(y, ln_r):
    if ln_r is None:
        return np.zeros_like(y)
    return y * y * inv_expm1(y - ln_r)


_KERNELS: dict[str, Callable] = {
    "energy": _energy_kernel,
    "pressure": _pressure_kernel,
}


def mode_integrals(model: ReflectionModel, gap: float, zetas, kind: str = "energy"):
    """Reduced integrals S_TM, S_TE over a batch of Matsubara frequencies.

    Returns (s_tm, s_te, err_tm, err_te), each shaped like ``zetas``.
    The panel mesh is a smooth function of zeta, so these values can be
    differenced between a sum over integers and an integral over the
    continuous index without quadrature artefacts.
    """
    zetas = np.atleast_1d(np.asarray(zetas, dtype=float))
    if np.any(zetas <= 0.0):
        raise ValueError("zetas must be > 0; the m = 0 term is analytic")
    kernel = _KERNELS[kind]
    y0 = (2.0 * gap / C_LIGHT) * zetas
    breaks = y0[:, None] + _Y_OFFSETS[None, :]
    nodes, wk, wg = _gk_rows(breaks)
    p = nodes / y0[:, None]
    ln_a, ln_b = _log_reflection(model, zetas[:, None], p)
    panels = _Y_OFFSETS.size - 1
    s_tm, e_tm = _gk_integrate(kernel(nodes, ln_a), wk, wg, panels)
    if ln_b is None:
        s_te = np.zeros_like(s_tm)
        e_te = np.zeros_like(s_tm)
    else:
        s_te, e_te = _gk_integrate(kernel(nodes, ln_b), wk, wg, panels)
    return s_tm, s_te, e_tm, e_te


def zero_mode_integrals(model: ReflectionModel, gap: float, kind: str = "energy"):
    """Full-weight m = 0 reduced integrals (S0_TM, S0_TE, error)."""
    kernel = _KERNELS[kind]
    breaks = _Y_OFFSETS[None, :]
    nodes, wk, wg = _gk_rows(breaks)
    q = nodes / (2.0 * gap)
    ln_a, ln_b = _zero_mode_log_reflection(model, q)
    panels = _Y_OFFSETS.size - 1
    if ln_a is None:
        s_tm = np.zeros(1)
        e_tm = np.zeros(1)
    else:
        s_tm, e_tm = _gk_integrate(kernel(nodes, ln_a), wk, wg, panels)
    if ln_b is None:
        s_te = np.zeros(1)
        e_te = np.zeros(1)
    else:
        s_te, e_te = _gk_integrate(kernel(nodes, ln_b), wk, wg, panels)
    return float(s_tm[0]), float(s_te[0]), float(e_tm[0] + e_te[0])


def _refine_mode(model, gap, zeta, kind, rel_tol, budget=10_000):
    """Scalar fallback: adaptively re-integrate one Matsubara term."""
    kernel = _KERNELS[kind]
    y0 = 2.0 * gap * zeta / C_LIGHT
    breaks = y0 + _Y_OFFSETS

    def f_pol(pol):
        def f(y):
            p = np.maximum(y / y0, 1.0)
            ln_a, ln_b = _log_reflection(model, zeta, p)
            ln_r = ln_a if pol == "tm" else ln_b
            return kernel(y, ln_r)
        return f

    s_tm, e_tm, _ = adaptive_gk(f_pol("tm"), breaks, rel_tol, node_budget=budget)
    _, ln_b_probe = _log_reflection(model, zeta, np.array([2.0]))
    if ln_b_probe is None:
        return s_tm, 0.0, e_tm, 0.0
    s_te, e_te, _ = adaptive_gk(f_pol("te"), breaks, rel_tol, node_budget=budget)
    return s_tm, s_te, e_tm, e_te


def matsubara_term(system: PlateSystem, m: int, quad_tol: float = 1e-9) -> MatsubaraTerm:
    """Free-energy contribution of Matsubara index m, in J/m^2.

    The m = 0 value is returned with its half weight already applied.
    """
    if not (isinstance(m, (int, np.integer)) and m >= 0):
        raise ValueError(f"m must be an integer >= 0, got {m!r}")
    if not 0.0 < quad_tol <= 1e-3:
        raise ValueError(f"quad_tol must be in (0, 1e-3], got {quad_tol}")
    kT = K_BOLTZMANN * system.temperature
    pref = kT / (8.0 * math.pi * system.gap ** 2)
    if m == 0:
        s_tm, s_te, err = zero_mode_integrals(system.model, system.gap, "energy")
        w = 0.5
        return MatsubaraTerm(w * pref * (s_tm + s_te), w * pref * s_te,
                             w * pref * s_tm, w * pref * err)
    zeta = matsubara_frequency(m, system.temperature)
    s_tm, s_te, e_tm, e_te = mode_integrals(system.model, system.gap, zeta, "energy")
    total = s_tm[0] + s_te[0]
    if (e_tm[0] + e_te[0]) > quad_tol * max(abs(total), 1e-300):
        s_tm0, s_te0, e_tm0, e_te0 = _refine_mode(
            system.model, system.gap, zeta, "energy", quad_tol)
        s_tm, s_te = np.array([s_tm0]), np.array([s_te0])
        e_tm, e_te = np.array([e_tm0]), np.array([e_te0])
        total = s_tm[0] + s_te[0]
    return MatsubaraTerm(pref * total, pref * s_te[0], pref * s_tm[0],
                         pref * (e_tm[0] + e_te[0]))


def _matsubara_sum(system: PlateSystem, kind: str, tol: float, m_max: int):
    """Shared truncated-sum driver for free energy and pressure.

    Returns (terms_tm, terms_te, term_errors, last_m, tail) in reduced
    S units; prefactors are applied by the callers.
    """
    model, a, temp = system.model, system.gap, system.temperature
    quad_tol = tol / 10.0
    s0_tm, s0_te, e0 = zero_mode_integrals(model, a, kind)
    terms_tm = [0.5 * s0_tm]
    terms_te = [0.5 * s0_te]
    errors = [0.5 * e0]
    acc = 0.5 * (s0_tm + s0_te)
    prev_total = None
    m_next = 1
    block = 64
    zeta1 = matsubara_frequency(1, temp)

    while m_next <= m_max:
        ms = np.arange(m_next, min(m_next + block, m_max + 1))
        s_tm, s_te, e_tm, e_te = mode_integrals(model, a, zeta1 * ms, kind)
        for i, m in enumerate(ms):
            total = s_tm[i] + s_te[i]
            err = e_tm[i] + e_te[i]
            if err > quad_tol * max(abs(total), 1e-4 * abs(acc)):
                r_tm, r_te, r_etm, r_ete = _refine_mode(
                    model, a, float(zeta1 * m), kind, quad_tol)
                s_tm[i], s_te[i] = r_tm, r_te
                total = r_tm + r_te
                err = r_etm + r_ete
            terms_tm.append(s_tm[i])
            terms_te.append(s_te[i])
            errors.append(err)
            acc += total
            if m > 5 and abs(total) < tol * abs(acc) / 10.0:
                if prev_total is not None and abs(total) < abs(prev_total):
                    ratio = abs(total) / abs(prev_total)
                    tail = abs(total) * ratio / (1.0 - ratio)
                    return terms_tm, terms_te, errors, int(m), -tail
            prev_total = total
        m_next = int(ms[-1]) + 1
        block = min(2 * block, 1024)

    best = fsum(terms_tm) + fsum(terms_te)
    raise ConvergenceError(
        f"Matsubara sum not converged after m = {m_max}",
        best_estimate=best, error_estimate=abs(best) * tol)


def free_energy(system: PlateSystem, tol: float = 1e-6,
                m_max: int = 500_000) -> FreeEnergyResult:
    """Helmholtz free energy per unit area, J/m^2 (negative: attraction).

    ``tol`` controls both the summation truncation rule and the
    per-term quadrature target (tol/10).
    """
    if not 0.0 < tol <= 1e-4:
        raise ValueError(f"tol must be in (0, 1e-4], got {tol}")
    kT = K_BOLTZMANN * system.temperature
    pref = kT / (8.0 * math.pi * system.gap ** 2)
    try:
        terms_tm, terms_te, _, last_m, tail = _matsubara_sum(system, "energy", tol, m_max)
    except ConvergenceError as exc:
        raise ConvergenceError(str(exc), best_estimate=pref * exc.best_estimate,
                               error_estimate=pref * exc.error_estimate) from None
    tm = pref * fsum(terms_tm)
    te = pref * fsum(terms_te)
    terms = [pref * (t + e) for t, e in zip(terms_tm, terms_te)]
    return FreeEnergyResult(total=tm + te, te_part=te, tm_part=tm,
                            terms=terms, m_max=last_m,
                            tail_estimate=pref * tail)


def pressure(system: PlateSystem, tol: float = 1e-6,
             m_max: int = 500_000) -> PressureResult:
    """Casimir pressure between the plates, Pa (negative: attraction)."""
    if not 0.0 < tol <= 1e-4:
        raise ValueError(f"tol must be in (0, 1e-4], got {tol}")
    kT = K_BOLTZMANN * system.temperature
    pref = -kT / (8.0 * math.pi * system.gap ** 3)
    try:
        terms_tm, terms_te, _, last_m, tail = _matsubara_sum(system, "pressure", tol, m_max)
    except ConvergenceError as exc:
        raise ConvergenceError(str(exc), best_estimate=pref * exc.best_estimate,
                               error_estimate=abs(pref) * exc.error_estimate) from None
    tm = pref * fsum(terms_tm)
    te = pref * fsum(terms_te)
    return PressureResult(pressure=tm + te, te_part=te, tm_part=tm,
                          m_max=last_m, tail_estimate=pref * tail)


def coefficient_surface(model: ReflectionModel, zeta_grid, kperp_grid) -> CoefficientSurface:
    """Tabulate A and B on a (zeta, k_perp) grid.

    Grid points with k_perp < zeta/c lie outside the Matsubara
    integration domain and are marked NaN.
    """
    zeta_grid = np.atleast_1d(np.asarray(zeta_grid, dtype=float))
    kperp_grid = np.atleast_1d(np.asarray(kperp_grid, dtype=float))
    if np.any(zeta_grid <= 0.0) or np.any(kperp_grid <= 0.0):
        raise ValueError("grids must be positive")
    a_tm = np.full((zeta_grid.size, kperp_grid.size), np.nan)
    b_te = np.full_like(a_tm, np.nan)
    for i, zeta in enumerate(zeta_grid):
        valid = kperp_grid * C_LIGHT >= zeta
        if not np.any(valid):
            continue
        pair = reflection_coefficients(model, zeta, kperp_grid[valid])
        a_tm[i, valid] = pair.a_tm
        b_te[i, valid] = pair.b_te
    return CoefficientSurface(zeta=zeta_grid, kperp=kperp_grid,
                              a_tm=a_tm, b_te=b_te)
