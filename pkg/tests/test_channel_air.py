import numpy as np
import pytest

from plantlink.core import RandomSource, TimeSeries, time_grid, trapezoid_integral
from plantlink.channel_air import (
    AirChannelParams,
    ObservationPoint,
    add_turbulence_noise,
    delay_spread_metrics,
    impulse_response,
    ou_noise,
    propagate_continuous,
    superpose_sources,
)


def kernel_at(p, r_vec, t):
    grid = TimeSeries(t, 1.0, [0.0])
    return impulse_response(p, ObservationPoint(r_vec), grid).signal.values[0]


class TestImpulseResponse:
    def test_normalizing_time(self):
        # (4*pi*D*t)^{3/2} = 1 at t = 1/(4*pi) with D = 1
        p = AirChannelParams(M=1.0, D=1.0)
        assert kernel_at(p, (0.0, 0.0, 0.0), 1.0 / (4.0 * np.pi)) == pytest.approx(1.0)

    def test_plume_center_value(self):
        p = AirChannelParams(M=1.0, D=0.25, u=(0.5, 0.0, 0.0))
        c = kernel_at(p, (1.0, 0.0, 0.0), 2.0)
        assert c == pytest.approx((2.0 * np.pi) ** -1.5, rel=1e-12)

    def test_loss_is_multiplicative(self):
        base = AirChannelParams(M=1.0, D=1e-5)
        lossy = AirChannelParams(M=1.0, D=1e-5, lam=0.01)
        t = 37.0
        ratio = kernel_at(lossy, (0.02, 0, 0), t) / kernel_at(base, (0.02, 0, 0), t)
        assert ratio == pytest.approx(np.exp(-0.01 * t), rel=1e-12)

    def test_rejects_nonpositive_time(self):
        p = AirChannelParams()
        with pytest.raises(ValueError):
            impulse_response(p, ObservationPoint((0.1, 0, 0)), time_grid(0.0, 1.0, 5))

    def test_peak_time_matches_analytic(self):
        # d/dt log c = 0 gives t_peak = r^2/(6D) for u=0, lambda=0
        p = AirChannelParams(M=1.0, D=1e-5)
        r = 0.03
        grid = time_grid(0.1, 0.1, 3000)
        resp = impulse_response(p, ObservationPoint((r, 0, 0)), grid)
        metrics = delay_spread_metrics(resp)
        assert metrics.t_peak == pytest.approx(r * r / (6e-5), abs=grid.dt)

    def test_reception_at_half_meter_is_finite(self):
        # smoke test at the observed aboveground signaling range
        p = AirChannelParams(M=1e-6, D=1e-5, lam=1e-4)
        grid = time_grid(10.0, 10.0, 2000)
        resp = impulse_response(p, ObservationPoint((0.5, 0, 0)), grid)
        peak = resp.signal.values.max()
        assert peak > 0.0 and np.isfinite(peak)


class TestPropagateContinuous:
    def test_impulse_flux_recovers_kernel(self):
        p = AirChannelParams(D=1e-5)
        obs = ObservationPoint((0.02, 0, 0))
        dt, n = 1.0, 800
        mass = 3.0
        flux = np.zeros(n)
        flux[0] = mass / dt
        out = propagate_continuous(TimeSeries(0.0, dt, flux, "mol/s"), p, obs)
        ref = impulse_response(
            AirChannelParams(M=mass, D=1e-5), obs, time_grid(dt, dt, n)
        )
        sl = slice(10, n)
        assert np.allclose(out.signal.values[sl], ref.signal.values[sl], rtol=0.01)

    def test_zero_flux_zero_response(self):
        p = AirChannelParams()
        flux = TimeSeries(0.0, 1.0, np.zeros(50), "mol/s")
        out = propagate_continuous(flux, p, ObservationPoint((0.1, 0, 0)))
        assert np.all(out.signal.values == 0.0)

    def test_plateau_matches_kernel_quadrature(self):
        p = AirChannelParams(D=1e-5, lam=0.01)
        obs = ObservationPoint((0.02, 0, 0))
        dt, n = 1.0, 2500
        flux = TimeSeries(0.0, dt, np.full(n, 2e-6), "mol/s")
        out = propagate_continuous(flux, p, obs)
        kernel = impulse_response(
            AirChannelParams(M=1.0, D=1e-5, lam=0.01), obs, time_grid(dt, dt, n)
        )
        c_ss = 2e-6 * trapezoid_integral(kernel.signal)
        assert out.signal.values[n - 1] == pytest.approx(c_ss, rel=0.02)

    def test_linearity_in_flux(self):
        p = AirChannelParams(D=1e-5)
        obs = ObservationPoint((0.02, 0, 0))
        rng = np.random.default_rng(1)
        f1 = TimeSeries(0.0, 1.0, rng.uniform(0, 1e-6, 200), "mol/s")
        f2 = TimeSeries(0.0, 1.0, rng.uniform(0, 1e-6, 200), "mol/s")
        combo = TimeSeries(0.0, 1.0, 2.0 * f1.values + 3.0 * f2.values, "mol/s")
        lhs = propagate_continuous(combo, p, obs).signal.values
        rhs = (
            2.0 * propagate_continuous(f1, p, obs).signal.values
            + 3.0 * propagate_continuous(f2, p, obs).signal.values
        )
        assert np.allclose(lhs, rhs, rtol=1e-9)


class TestSuperpose:
    def _resp(self, scale=1.0):
        p = AirChannelParams(D=1e-5)
        grid = time_grid(1.0, 1.0, 100)
        r = impulse_response(p, ObservationPoint((0.02, 0, 0)), grid)
        r.signal.values *= scale
        return r

    def test_single_source_identity(self):
        r = self._resp()
        out = superpose_sources([r])
        assert np.array_equal(out.signal.values, r.signal.values)

    def test_two_identical_sources_double(self):
        r = self._resp()
        out = superpose_sources([r, self._resp()])
        assert np.allclose(out.signal.values, 2.0 * r.signal.values)

    def test_zero_source_is_neutral(self):
        r = self._resp()
        out = superpose_sources([r, self._resp(scale=0.0)])
        assert np.allclose(out.signal.values, r.signal.values)


class TestTurbulenceNoise:
    def test_zero_sigma_bit_exact(self):
        r = impulse_response(
            AirChannelParams(D=1e-5), ObservationPoint((0.02, 0, 0)),
            time_grid(1.0, 1.0, 100),
        )
        out = add_turbulence_noise(r, 0.0, 5.0, RandomSource(0, 0))
        assert np.array_equal(out.signal.values, r.signal.values)

    def test_autocorrelation_time(self):
        dt, tau, sigma = 0.1, 2.0, 0.5
        n = ou_noise(10**6, dt, sigma, tau, RandomSource(4, 0).generator())
        lag = int(round(tau / dt))
        var = np.var(n)
        acov = np.mean(n[:-lag] * n[lag:])
        assert acov == pytest.approx(var * np.exp(-1.0), rel=0.1)
        assert var == pytest.approx(sigma**2, rel=0.05)

    def test_outputs_nonnegative(self):
        r = impulse_response(
            AirChannelParams(D=1e-5), ObservationPoint((0.02, 0, 0)),
            time_grid(1.0, 1.0, 500),
        )
        out = add_turbulence_noise(r, 2.0, 1.0, RandomSource(9, 0))
        assert np.all(out.signal.values >= 0.0)


class TestDelaySpread:
    def test_tail_exponent_heavy_tail(self):
        p = AirChannelParams(D=1e-5)
        resp = impulse_response(
            p, ObservationPoint((0.05, 0, 0)), time_grid(1.0, 1.0, 100_000)
        )
        m = delay_spread_metrics(resp)
        assert m.tail_exponent == pytest.approx(-1.5, abs=0.05)

    def test_tail_after_peak(self):
        p = AirChannelParams(D=1e-5)
        resp = impulse_response(
            p, ObservationPoint((0.02, 0, 0)), time_grid(1.0, 1.0, 5000)
        )
        m = delay_spread_metrics(resp, energy_fraction=0.99)
        assert m.t_tail >= m.t_peak

    def test_all_zero_rejected(self):
        from plantlink.core import ChannelResponse

        z = ChannelResponse(TimeSeries(1.0, 1.0, np.zeros(10)))
        with pytest.raises(ValueError):
            delay_spread_metrics(z)
