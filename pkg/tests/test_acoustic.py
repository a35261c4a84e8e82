import numpy as np
import pytest

from plantlink.core import RandomSource, TimeSeries, time_grid, trapezoid_integral
from plantlink.acoustic import (
    AcousticMedium,
    MSChannelParams,
    VesselParams,
    damping_time,
    detect_clicks,
    ms_channel_open_prob,
    propagate_air_acoustic,
    synth_click,
    vessel_resonance_freqs,
)

VESSEL = VesselParams()  # 150 kHz fundamental, 1e-4 s ring-down
DT = 5e-7


def demo_click(amplitude=1.0, n=2000):
    return synth_click(VESSEL, amplitude, time_grid(0.0, DT, n))


class TestResonance:
    def test_fundamental(self):
        assert vessel_resonance_freqs(VESSEL, 1)[0] == pytest.approx(150e3)

    def test_harmonic_ratios_exact(self):
        f = vessel_resonance_freqs(VESSEL, 6)
        assert np.array_equal(f / f[0], np.arange(1, 7))

    def test_halving_length_doubles(self):
        short = VesselParams(L_vessel=VESSEL.L_vessel / 2)
        assert np.allclose(
            vessel_resonance_freqs(short, 3),
            2 * vessel_resonance_freqs(VESSEL, 3),
        )


class TestDamping:
    def test_arithmetic(self):
        assert abs(damping_time(VESSEL) - 1e-4) < 1e-12

    def test_radius_quadratic(self):
        wide = VesselParams(R_vessel=2 * VESSEL.R_vessel)
        assert damping_time(wide) == pytest.approx(4 * damping_time(VESSEL))

    def test_viscosity_inverse(self):
        thick = VesselParams(eta_l=2 * VESSEL.eta_l)
        assert damping_time(thick) == pytest.approx(0.5 * damping_time(VESSEL))


class TestSynthClick:
    def test_starts_at_zero(self):
        assert demo_click().values[0] == 0.0

    def test_envelope_time_constant(self):
        click = demo_click(amplitude=1.0, n=4000)
        tau = damping_time(VESSEL)
        k = click.index_of(tau)
        window = np.abs(click.values[k - 10 : k + 10]).max()
        # the 20-sample window spans 1.5 carrier periods, so it contains a
        # carrier peak (sampled to within half a step); the envelope there
        # lies between exp(-(tau +/- 10*dt)/tau)
        lo = np.exp(-(tau + 10 * DT) / tau) * np.cos(np.pi * 150e3 * DT)
        hi = np.exp(-(tau - 10 * DT) / tau) * (1.0 + 1e-9)
        assert lo <= window <= hi

    def test_fft_peak_at_fundamental(self):
        click = demo_click(n=4096)
        spectrum = np.abs(np.fft.rfft(click.values))
        freqs = np.fft.rfftfreq(4096, DT)
        peak = freqs[np.argmax(spectrum)]
        assert abs(peak - 150e3) <= freqs[1]

    def test_undersampled_grid_rejected(self):
        with pytest.raises(ValueError, match="dt"):
            synth_click(VESSEL, 1.0, time_grid(0.0, 1e-5, 100))


class TestPropagation:
    def test_reference_distance_identity(self):
        click = demo_click()
        med = AcousticMedium()
        out = propagate_air_acoustic(click, med, med.r_ref)
        assert np.array_equal(out.values, click.values)
        assert out.t0 == pytest.approx(med.r_ref / med.c_air)

    def test_spherical_spreading_six_db(self):
        click = demo_click()
        med = AcousticMedium()
        near = propagate_air_acoustic(click, med, 0.02)
        far = propagate_air_acoustic(click, med, 0.04)
        assert far.values.max() == pytest.approx(0.5 * near.values.max(), rel=1e-12)

    def test_absorption_db_arithmetic(self):
        click = demo_click()
        med = AcousticMedium(alpha_db_per_m=6.0)
        ref = propagate_air_acoustic(click, AcousticMedium(), 1.0 + 0.01)
        out = propagate_air_acoustic(click, med, 1.0 + 0.01)
        assert out.values.max() == pytest.approx(
            10 ** (-0.3) * ref.values.max(), rel=1e-12
        )

    def test_energy_decreases_with_distance(self):
        click = demo_click()
        med = AcousticMedium(alpha_db_per_m=2.0)
        energies = []
        for d in (0.02, 0.05, 0.2, 1.0):
            out = propagate_air_acoustic(click, med, d)
            energies.append(trapezoid_integral(out.with_values(out.values**2)))
        assert all(a > b for a, b in zip(energies, energies[1:]))

    def test_below_reference_rejected(self):
        with pytest.raises(ValueError):
            propagate_air_acoustic(demo_click(), AcousticMedium(), 1e-3)


class TestMsChannel:
    def test_balanced_energy(self):
        assert ms_channel_open_prob(4.0, MSChannelParams(dG_over_kT=4.0)) == 0.5

    def test_one_quarter(self):
        p = MSChannelParams(dG_over_kT=np.log(3.0), coupling=1.0)
        assert ms_channel_open_prob(0.0, p) == pytest.approx(0.25)

    def test_high_pressure_asymptote(self):
        assert ms_channel_open_prob(1e3, MSChannelParams()) > 1.0 - 1e-9

    def test_monotone_proper_probability(self):
        p = MSChannelParams(dG_over_kT=2.0, coupling=0.5)
        probs = [ms_channel_open_prob(x, p) for x in np.linspace(-50, 50, 200)]
        assert all(0.0 < q < 1.0 for q in probs)
        assert all(b >= a for a, b in zip(probs, probs[1:]))


class TestDetectClicks:
    def test_silence(self):
        quiet = TimeSeries(0.0, DT, np.zeros(1000), "Pa")
        assert detect_clicks(quiet, 0.1) == []

    def test_single_click_onset(self):
        click = demo_click()
        events = detect_clicks(click, 0.3, dead_time=3 * damping_time(VESSEL))
        assert len(events) == 1
        assert events[0] == pytest.approx(0.0, abs=5e-6)  # onset within a few samples

    def test_dead_time_contract(self):
        click = demo_click(n=500)
        tau = damping_time(VESSEL)
        n = 4000
        for gap, expected in ((8 * tau, 2), (1.5 * tau, 1)):
            track = np.zeros(n)
            track[: click.values.size] = click.values
            k = int(round(gap / DT))
            track[k : k + click.values.size] += click.values
            events = detect_clicks(
                TimeSeries(0.0, DT, track, "Pa"), 0.3, dead_time=3 * tau
            )
            assert len(events) == expected

    def test_round_trip_with_noise(self):
        med = AcousticMedium()
        tau = damping_time(VESSEL)
        click = demo_click(n=int(round(5 * tau / DT)))
        n = 12000
        track = np.zeros(n)
        emitted = 3
        for j in range(emitted):
            k = int(round(j * 8 * tau / DT))
            track[k : k + click.values.size] += click.values
        rx = propagate_air_acoustic(TimeSeries(0.0, DT, track, "Pa"), med, 0.05)
        peak = np.abs(rx.values).max()
        support = np.abs(rx.values) > 1e-12 * peak
        sigma = np.sqrt(np.mean(rx.values[support] ** 2) / 10.0)  # 10 dB SNR
        failures = 0
        for i in range(100):
            noise = RandomSource(21, i).generator().standard_normal(n)
            noisy = rx.with_values(rx.values + sigma * noise)
            events = detect_clicks(
                noisy, 0.3 * peak, dead_time=3 * tau, smooth_window=1.0 / 150e3
            )
            if len(events) != emitted:
                failures += 1
        assert failures == 0
