import numpy as np
import pytest

from plantlink.core import TimeSeries, time_grid, trapezoid_integral
from plantlink.channel_air import AirChannelParams, ObservationPoint, impulse_response
from plantlink.channel_soil import (
    BreakthroughResult,
    SoilParams,
    breakthrough_curve,
    effective_impulse_response,
    solve_dual_phase_1d,
)


def make_soil(**kw):
    base = dict(theta_a=0.3, theta_w=0.0, D_eff=1e-7, v=0.0, k_d_soil=0.0,
                K_H=1.0, R=1.0)
    base.update(kw)
    return SoilParams(**base)


class TestEffectiveImpulseResponse:
    def test_reduces_to_air_kernel(self):
        p = make_soil()
        grid = time_grid(10.0, 10.0, 500)
        soil = effective_impulse_response(p, 0.02, 1.0, grid)
        air = impulse_response(
            AirChannelParams(M=1.0, D=1e-7), ObservationPoint((0.02, 0, 0)), grid
        )
        assert np.allclose(soil.signal.values, air.signal.values, rtol=1e-12)

    def test_retardation_doubles_peak_time(self):
        grid = time_grid(1.0, 1.0, 5000)
        t1 = np.argmax(
            effective_impulse_response(make_soil(R=1.0), 0.02, 1.0, grid).values
        )
        t2 = np.argmax(
            effective_impulse_response(make_soil(R=2.0), 0.02, 1.0, grid).values
        )
        assert abs((t2 + 1) - 2 * (t1 + 1)) <= 1  # within one grid step

    def test_loss_reduces_dose(self):
        grid = time_grid(1.0, 1.0, 5000)
        clean = effective_impulse_response(make_soil(), 0.02, 1.0, grid)
        lossy = effective_impulse_response(make_soil(k_d_soil=1e-4), 0.02, 1.0, grid)
        assert trapezoid_integral(lossy.signal) < trapezoid_integral(clean.signal)

    def test_persistence_at_two_centimeters(self):
        # semi-volatile defaults: still above 1% of peak hours later
        grid = time_grid(10.0, 10.0, 4000)
        resp = effective_impulse_response(make_soil(), 0.02, 1.0, grid)
        v = resp.signal.values
        above = np.nonzero(v >= 0.01 * v.max())[0]
        duration = (above[-1] - above[0]) * grid.dt
        assert duration > 3600.0


class TestDualPhaseFd:
    def _pulse_flux(self, dt, n, mass):
        vals = np.zeros(n)
        vals[0] = mass / dt
        return TimeSeries(0.0, dt, vals, "mol/(m^2*s)")

    def test_zero_input_stays_zero(self):
        p = make_soil()
        grid = time_grid(0.0, 1.0, 200)
        zero = TimeSeries(0.0, 1.0, np.zeros(200), "mol/(m^2*s)")
        cells = solve_dual_phase_1d(p, zero, 0.05, 10, grid)
        assert all(np.all(c.signal.values == 0.0) for c in cells)

    def test_mass_conserved_before_breakthrough(self):
        p = make_soil(theta_a=1.0)
        dt, n = 2.0, 501
        mass = 2e-6
        grid = time_grid(0.0, dt, n)
        cells = solve_dual_phase_1d(p, self._pulse_flux(dt, n, mass), 0.05, 50, grid)
        dx = 0.05 / 50
        stored = sum(p.theta_a * c.signal.values[-1] * dx for c in cells)
        assert stored == pytest.approx(mass, rel=0.01)

    def test_matches_analytic_gaussian(self):
        # half-line diffusion of a surface pulse: c = m/sqrt(pi*D*t)*exp(-x^2/4Dt)
        p = make_soil(theta_a=1.0)
        dt, n = 2.0, 1001
        mass = 2e-6
        grid = time_grid(0.0, dt, n)
        cells = solve_dual_phase_1d(p, self._pulse_flux(dt, n, mass), 0.05, 50, grid)
        mid = cells[10]
        t = mid.signal.times
        sel = t > 50.0
        analytic = (
            mass / np.sqrt(np.pi * p.D_eff * t[sel])
            * np.exp(-mid.distance**2 / (4.0 * p.D_eff * t[sel]))
        )
        rms = np.sqrt(np.mean((mid.signal.values[sel] - analytic) ** 2))
        assert rms / analytic.max() < 0.03

    def test_stability_bound_reports_max_dt(self):
        p = make_soil()
        grid = time_grid(0.0, 100.0, 10)
        flux = TimeSeries(0.0, 100.0, np.ones(10), "mol/(m^2*s)")
        with pytest.raises(ValueError, match="maximum admissible dt"):
            solve_dual_phase_1d(p, flux, 0.01, 16, grid)

    def test_cells_stay_nonnegative_with_advection(self):
        p = make_soil(v=1e-6)
        dt, n = 1.0, 400
        grid = time_grid(0.0, dt, n)
        cells = solve_dual_phase_1d(p, self._pulse_flux(dt, n, 1e-6), 0.05, 25, grid)
        assert all(np.all(c.signal.values >= 0.0) for c in cells)


class TestBreakthrough:
    def _resp(self):
        grid = time_grid(10.0, 10.0, 800)
        return effective_impulse_response(make_soil(), 0.02, 1.0, grid)

    def test_threshold_above_max_no_breakthrough(self):
        resp = self._resp()
        result = breakthrough_curve(resp, 10.0 * resp.signal.values.max())
        assert isinstance(result, BreakthroughResult)
        assert not result.crossed and result.t_arrival is None

    def test_tiny_threshold_first_nonzero(self):
        resp = self._resp()
        v = resp.signal.values
        result = breakthrough_curve(resp, v[v > 0].min() * 0.5)
        first_nonzero = resp.signal.times[np.nonzero(v)[0][0]]
        assert result.crossed
        assert result.t_arrival <= first_nonzero

    def test_arrival_monotone_in_threshold(self):
        resp = self._resp()
        peak = resp.signal.values.max()
        arrivals = [
            breakthrough_curve(resp, frac * peak).t_arrival
            for frac in (0.01, 0.1, 0.5, 0.9)
        ]
        assert arrivals == sorted(arrivals)

    def test_rejects_nonpositive_threshold(self):
        with pytest.raises(ValueError):
            breakthrough_curve(self._resp(), 0.0)


class TestSoilParams:
    def test_storage_coefficient(self):
        p = make_soil(theta_a=0.3, theta_w=0.2, K_H=0.5)
        assert p.storage_coefficient == pytest.approx(0.3 + 0.2 / 0.5)

    def test_invalid_porosities(self):
        with pytest.raises(ValueError):
            make_soil(theta_a=0.8, theta_w=0.3)

    def test_retardation_below_one_rejected(self):
        with pytest.raises(ValueError):
            make_soil(R=0.5)
