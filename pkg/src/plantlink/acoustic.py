"""Acoustic emission and detection: cavitation click synthesis from vessel
resonance and viscous damping, free-field ultrasonic propagation, and a
Boltzmann mechanosensitive-channel detector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TimeSeries

__all__ = [
    "VesselParams",
    "AcousticMedium",
    "MSChannelParams",
    "vessel_resonance_freqs",
    "damping_time",
    "synth_click",
    "propagate_air_acoustic",
    "ms_channel_open_prob",
    "detect_clicks",
]


@dataclass
class VesselParams:
    """Xylem vessel geometry and sap properties setting click spectrum/decay."""

    v_l: float = 1500.0      # m/s sound speed in sap
    L_vessel: float = 0.005  # m
    R_vessel: float = 20e-6  # m
    rho_l: float = 1000.0    # kg/m^3
    eta_l: float = 1e-3      # Pa*s

    def __post_init__(self):
        if min(self.v_l, self.L_vessel, self.R_vessel, self.rho_l, self.eta_l) <= 0:
            raise ValueError("all vessel parameters must be positive")
        if self.R_vessel >= self.L_vessel:
            raise ValueError("vessel radius must be smaller than its length")


@dataclass
class AcousticMedium:
    """Free-field propagation medium (defaults are air)."""

    c_air: float = 343.0
    alpha_db_per_m: float = 0.0
    r_ref: float = 0.01

    def __post_init__(self):
        if self.c_air <= 0 or self.r_ref <= 0:
            raise ValueError("c_air and r_ref must be positive")
        if self.alpha_db_per_m < 0:
            raise ValueError("alpha must be non-negative")


@dataclass
class MSChannelParams:
    """Two-state Boltzmann gating: dG_over_kT is the closed-open free-energy
    difference in units of k_B*T; coupling converts pressure to energy."""

    dG_over_kT: float = 4.0
    coupling: float = 1.0

    def __post_init__(self):
        if self.coupling < 0:
            raise ValueError("coupling must be non-negative")


def vessel_resonance_freqs(p: VesselParams, m_max: int) -> np.ndarray:
    """Harmonic resonances f_m = (m/2) * v_l / L for m = 1..m_max."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    m = np.arange(1, m_max + 1)
    return m / 2.0 * p.v_l / p.L_vessel


def damping_time(p: VesselParams) -> float:
    """Viscous ring-down time tau_s = rho_l * R^2 / (4 * eta_l)."""
    return p.rho_l * p.R_vessel**2 / (4.0 * p.eta_l)


def synth_click(p: VesselParams, amplitude: float, t_grid: TimeSeries) -> TimeSeries:
    """Damped fundamental-mode sinusoid: A*sin(2*pi*f1*t)*exp(-t/tau_s)."""
    f1 = float(vessel_resonance_freqs(p, 1)[0])
    if t_grid.dt > 1.0 / (10.0 * f1):
        raise ValueError(
            f"grid undersamples the fundamental {f1:.6g} Hz; "
            f"need dt <= {1.0 / (10.0 * f1):.6g} s"
        )
    tau = damping_time(p)
    t = t_grid.times - t_grid.t0
    wave = amplitude * np.sin(2.0 * np.pi * f1 * t) * np.exp(-t / tau)
    return TimeSeries(t_grid.t0, t_grid.dt, wave, "Pa")


def propagate_air_acoustic(
    click: TimeSeries, medium: AcousticMedium, distance: float
) -> TimeSeries:
    """Spherical spreading plus dB/m absorption, delayed by distance/c_air."""
    if distance < medium.r_ref:
        raise ValueError(f"distance {distance} below reference {medium.r_ref}")
    gain = (medium.r_ref / distance) * 10.0 ** (
        -medium.alpha_db_per_m * (distance - medium.r_ref) / 20.0
    )
    delay = distance / medium.c_air
    return TimeSeries(click.t0 + delay, click.dt, click.values * gain, click.unit)


def ms_channel_open_prob(pressure: float, p: MSChannelParams) -> float:
    """P_open = 1/(1 + exp(dG/kT - coupling*pressure)), monotone in pressure."""
    dg_eff = p.dG_over_kT - p.coupling * pressure
    return float(1.0 / (1.0 + np.exp(dg_eff)))


def detect_clicks(
    signal: TimeSeries,
    threshold: float,
    dead_time: float = 0.0,
    smooth_window: float | None = None,
) -> list[float]:
    """Rectified-envelope threshold crossings with dead-time suppression.

    `smooth_window` optionally averages the rectified signal over the given
    time span (e.g. one carrier period) before thresholding.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if dead_time < 0:
        raise ValueError("dead_time must be non-negative")
    env = np.abs(signal.values)
    if smooth_window is not None and smooth_window > 0:
        n = max(1, int(round(smooth_window / signal.dt)))
        env = np.convolve(env, np.ones(n) / n, mode="same")
    above = env >= threshold
    crossings = np.nonzero(above & ~np.concatenate([[False], above[:-1]]))[0]
    t = signal.times
    events: list[float] = []
    for k in crossings:
        t_k = float(t[k])
        if events and t_k - events[-1] < dead_time:
            continue
        events.append(t_k)
    return events
