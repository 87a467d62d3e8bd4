import math

import numpy as np
import pytest

from lifshitz.asymptotics import coefficients, pade_delta_f
from lifshitz.constants import (C_LIGHT, HBAR, K_BOLTZMANN, ZETA3)
from lifshitz.core import (IdealMetal, PlateSystem, TmOnlyIdealMetal,
                           free_energy, pressure)
from lifshitz.dispersion import GOLD, PlasmaModel
from lifshitz.errors import PrecisionError, RegimeError
from lifshitz.thermo import (classical_limit_check, classical_pressure,
                             collect_lowtemp_samples, default_fit_grid,
                             delta_f_te_numeric, entropy, fit_low_temp,
                             free_energy_shift, pressure_shift, r_series,
                             sum_minus_integral)
from lifshitz.zero_temp import free_energy_T0

GOLD_COEFFS = coefficients(GOLD, 1e-6)


def loglog_slope(f, temps):
    t = np.asarray(temps, dtype=float)
    vals = np.array([abs(f(ti)) for ti in t])
    slope, _ = np.polyfit(np.log(t), np.log(vals), 1)
    return slope


class TestSumMinusIntegral:
    def test_exponential_oracle(self):
        # h = u e^{-u} decays away well before the split index, so the
        # engine must reproduce e/(e-1)^2 - 1 to near machine precision
        delta, noise = sum_minus_integral(lambda u: u * np.exp(-u))
        exact = math.e / (math.e - 1.0) ** 2 - 1.0
        assert abs(delta - exact) < 1e-9
        assert 0.0 < noise < 1e-12

    def test_algebraic_tail_oracle(self):
        # h = 1/(1+u)^2 still carries weight at the split index; the
        # endpoint stencil corrections have to absorb it
        delta, _ = sum_minus_integral(lambda u: 1.0 / (1.0 + u) ** 2)
        exact = math.pi ** 2 / 6.0 - 0.5 - 1.0
        assert abs(delta - exact) < 1e-9

    def test_split_index_invariance(self):
        results = [sum_minus_integral(lambda u: 1.0 / (1.0 + u) ** 2, m_star=m)[0]
                   for m in (64, 128, 256)]
        assert max(results) - min(results) < 1e-9

    def test_rejects_tiny_split(self):
        with pytest.raises(ValueError):
            sum_minus_integral(lambda u: u, m_star=8)


class TestDeltaFTeNumeric:
    def test_positive_and_increasing(self):
        vals = [delta_f_te_numeric(PlateSystem(1e-6, t, GOLD))
                for t in (0.002, 0.01, 0.05)]
        assert all(v > 0.0 for v in vals)
        assert vals[0] < vals[1] < vals[2]

    def test_leading_coefficient_at_low_t(self):
        t = 0.002
        val = delta_f_te_numeric(PlateSystem(1e-6, t, GOLD))
        assert val / pade_delta_f(GOLD_COEFFS, t) == pytest.approx(1.0, abs=1e-2)

    def test_pade_suppression_at_50mk(self):
        t = 0.05
        val = delta_f_te_numeric(PlateSystem(1e-6, t, GOLD))
        ratio = val / (GOLD_COEFFS.c1 * t ** 2)
        assert 0.4 < ratio < 0.7

    def test_split_index_invariance(self):
        vals = [delta_f_te_numeric(PlateSystem(1e-6, 0.01, GOLD), m_star=m)
                for m in (96, 128, 192)]
        assert (max(vals) - min(vals)) / vals[1] < 1e-8

    def test_agrees_with_exact_permittivity_shift(self):
        """Independent cross-check: the reduced low-frequency kernel
        against the full Lifshitz evaluator, same temperatures."""
        for t, tol in ((0.005, 1e-4), (0.05, 3e-4)):
            reduced = delta_f_te_numeric(PlateSystem(1e-6, t, GOLD))
            exact = free_energy_shift(PlateSystem(1e-6, t, GOLD), polarization="te")
            assert reduced == pytest.approx(exact, rel=tol)

    def test_validation(self):
        with pytest.raises(TypeError):
            delta_f_te_numeric(PlateSystem(1e-6, 0.01, PlasmaModel(GOLD.omega_p)))
        with pytest.raises(ValueError):
            delta_f_te_numeric(PlateSystem(1e-6, 0.01, GOLD), tol=1e-6)
        with pytest.raises(RegimeError):
            delta_f_te_numeric(PlateSystem(1e-6, 0.5, GOLD))


class TestFreeEnergyShift:
    def test_brute_force_cross_check(self):
        # at 50 K the direct difference still has ~8 digits to spare
        t = 50.0
        engine = free_energy_shift(PlateSystem(1e-6, t, GOLD))
        brute = (free_energy(PlateSystem(1e-6, t, GOLD), tol=1e-10).total
                 - free_energy_T0(1e-6, GOLD, tol=1e-8).f0)
        assert engine == pytest.approx(brute, rel=1e-6)

    def test_polarizations_sum(self):
        system = PlateSystem(1e-6, 10.0, GOLD)
        both = free_energy_shift(system)
        te = free_energy_shift(system, polarization="te")
        tm = free_energy_shift(system, polarization="tm")
        assert both == pytest.approx(te + tm, rel=1e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            free_energy_shift(PlateSystem(1e-6, 10.0, GOLD), polarization="tem")


class TestPressureShift:
    def test_difference_cross_check(self):
        t1, t2 = 20.0, 50.0
        s1 = pressure_shift(PlateSystem(1e-6, t1, GOLD))
        s2 = pressure_shift(PlateSystem(1e-6, t2, GOLD))
        p1 = pressure(PlateSystem(1e-6, t1, GOLD), tol=1e-10).pressure
        p2 = pressure(PlateSystem(1e-6, t2, GOLD), tol=1e-10).pressure
        assert s2 - s1 == pytest.approx(p2 - p1, rel=1e-5)

    def test_ideal_metal_tm_quartic(self):
        """For full reflection the TM pressure correction grows as T^4;
        the free-energy correction is dominated by its gap-independent
        cubic term, which carries no pressure."""
        slope = loglog_slope(
            lambda t: pressure_shift(PlateSystem(1e-6, t, IdealMetal()),
                                     polarization="tm"),
            np.geomspace(5.0, 50.0, 7))
        assert slope == pytest.approx(4.0, abs=0.05)

    def test_drude_tm_slower_than_quartic(self):
        # finite dissipation feeds sub-quartic terms; document the
        # measured exponent so regressions surface
        slope = loglog_slope(
            lambda t: pressure_shift(PlateSystem(1e-6, t, GOLD),
                                     polarization="tm"),
            np.geomspace(5.0, 50.0, 7))
        assert 2.0 < slope < 3.0


class TestFitLowTemp:
    def test_recovers_pade_generator(self):
        grid = np.geomspace(2e-4, 6e-3, 12)
        samples = [(float(t), pade_delta_f(GOLD_COEFFS, float(t))) for t in grid]
        fit = fit_low_temp(samples)
        assert fit.d1 == pytest.approx(GOLD_COEFFS.c1, rel=1e-2)
        assert fit.d2 == pytest.approx(GOLD_COEFFS.c2, rel=5e-2)
        assert fit.residual_norm < 0.01

    def test_pure_quadratic_data(self):
        grid = np.geomspace(2e-3, 6e-2, 12)
        samples = [(float(t), GOLD_COEFFS.c1 * float(t) ** 2) for t in grid]
        fit = fit_low_temp(samples)
        assert fit.d1 == pytest.approx(GOLD_COEFFS.c1, rel=1e-10)
        assert abs(fit.d2) < 1e-6
        assert abs(fit.d3) < 1e-6

    def test_sample_validation(self):
        grid = np.geomspace(2e-3, 6e-2, 12)
        good = [(float(t), GOLD_COEFFS.c1 * float(t) ** 2) for t in grid]
        with pytest.raises(ValueError):
            fit_low_temp(good[:7])
        with pytest.raises(ValueError):
            fit_low_temp(good[::-1])
        with pytest.raises(ValueError):
            fit_low_temp([(t, v) for (t, v) in good if t > 2e-2])
        hot = [(10.0 * t, v) for (t, v) in good]
        with pytest.raises(ValueError):
            fit_low_temp(hot)

    def test_sign_flip_rejected(self):
        grid = np.geomspace(2e-3, 6e-2, 12)
        samples = [(float(t), -GOLD_COEFFS.c1 * float(t) ** 2) for t in grid]
        with pytest.raises(PrecisionError):
            fit_low_temp(samples)

    def test_unmodelled_data_rejected(self):
        grid = np.geomspace(2e-3, 6e-2, 12)
        samples = [(float(t), GOLD_COEFFS.c1 * float(t) ** 2
                    * (1.0 + 0.3 * math.sin(40.0 * math.log(t))))
                   for t in grid]
        with pytest.raises(PrecisionError):
            fit_low_temp(samples)

    def test_default_grid(self):
        grid = default_fit_grid()
        assert grid.size == 12
        assert grid[0] == pytest.approx(2e-3)
        assert grid[-1] == pytest.approx(6e-2)

    def test_collected_samples_structure(self):
        grid = np.geomspace(2e-3, 2e-2, 8)
        samples = collect_lowtemp_samples(GOLD, 1e-6, t_grid=grid)
        assert len(samples) == 8
        ts = [s[0] for s in samples]
        assert ts == sorted(ts)
        assert all(df > 0.0 for _, df in samples)


class TestRSeries:
    def test_exact_model_gives_zero(self):
        grid = default_fit_grid()
        series = r_series(GOLD_COEFFS, lambda t: pade_delta_f(GOLD_COEFFS, t), grid)
        assert all(abs(r) < 1e-12 for _, r in series.samples)
        assert abs(series.intercept) < 1e-12
        assert abs(series.slope_at_origin) < 1e-10
        assert series.correlation == 1.0

    def test_scaled_model_gives_constant_offset(self):
        """numeric with a 3% smaller T^2 coefficient: R == (c1-d1)/c1."""
        off = coefficients(GOLD, 1e-6)
        scaled = type(off)(c1=0.97 * off.c1, c2=off.c2)
        series = r_series(off, lambda t: pade_delta_f(scaled, t),
                          default_fit_grid())
        assert series.intercept == pytest.approx(0.03, abs=1e-10)
        assert abs(series.slope_at_origin) < 1e-8
        assert series.intercept_uncertainty < 1e-10

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            r_series(GOLD_COEFFS, lambda t: pade_delta_f(GOLD_COEFFS, t),
                     [0.01, 0.02, 0.03])
        with pytest.raises(ValueError):
            r_series(GOLD_COEFFS, lambda t: pade_delta_f(GOLD_COEFFS, t),
                     [-0.01, 0.01, 0.02, 0.04])


class TestEntropy:
    def test_low_temperature_linear_vanishing(self):
        temps = (0.02, 0.01, 0.005)
        vals = [entropy(PlateSystem(1e-6, t, GOLD)) for t in temps]
        for t, s in zip(temps, vals):
            assert s < 0.0
            assert 0.9 * GOLD_COEFFS.c1 * t < abs(s) < 6.0 * GOLD_COEFFS.c1 * t
        assert abs(vals[2]) < abs(vals[1]) < abs(vals[0])

    def test_temperature_override(self):
        base = PlateSystem(1e-6, 300.0, GOLD)
        direct = entropy(PlateSystem(1e-6, 0.01, GOLD))
        assert entropy(base, temperature=0.01) == pytest.approx(direct, rel=1e-10)

    def test_classical_limit(self):
        # deep classical regime: F -> -zeta(3) k T /(16 pi a^2), so the
        # entropy saturates at its a-dependent classical value
        s = entropy(PlateSystem(8e-6, 3000.0, GOLD))
        expected = ZETA3 * K_BOLTZMANN / (16.0 * math.pi * (8e-6) ** 2)
        assert s == pytest.approx(expected, rel=1e-3)

    def test_validation(self):
        with pytest.raises(ValueError):
            entropy(PlateSystem(1e-6, 300.0, GOLD), temperature=5e-5)


class TestClassicalLimit:
    def test_gold_deep_classical(self):
        ratio = classical_limit_check(8e-6, 1000.0)
        assert 0.95 <= ratio <= 1.0 + 1e-12
        assert ratio == pytest.approx(1.0, abs=1e-9)

    def test_forced_tm_only_exact(self):
        ratio = classical_limit_check(8e-6, 1000.0, model=TmOnlyIdealMetal())
        assert ratio == pytest.approx(1.0, abs=1e-9)

    def test_ideal_metal_doubles(self):
        ratio = classical_limit_check(8e-6, 1000.0, model=IdealMetal())
        assert ratio == pytest.approx(2.0, abs=1e-9)

    def test_drude_half_of_ideal(self):
        drude = classical_limit_check(8e-6, 1000.0)
        ideal = classical_limit_check(8e-6, 1000.0, model=IdealMetal())
        assert drude / ideal == pytest.approx(0.5, rel=1e-6)

    def test_approach_from_above(self):
        """m >= 1 terms only add attraction, so the ratio converges to 1
        from above as aT grows."""
        t = 300.0
        ratios = []
        for margin in (5.0, 10.0, 20.0):
            a = margin * HBAR * C_LIGHT / (2.0 * math.pi * K_BOLTZMANN * t)
            ratios.append(classical_limit_check(a, t))
        assert all(r >= 1.0 - 1e-12 for r in ratios)
        assert ratios[0] > ratios[1] > ratios[2] - 1e-12
        assert ratios[2] == pytest.approx(1.0, abs=1e-9)

    def test_regime_guard(self):
        with pytest.raises(RegimeError):
            classical_limit_check(1e-6, 300.0)

    def test_reference_formula(self):
        assert classical_pressure(1e-6, 300.0) == pytest.approx(
            -ZETA3 * K_BOLTZMANN * 300.0 / (8.0 * math.pi * 1e-18), rel=1e-15)
