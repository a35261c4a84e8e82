"""Plant electrical signaling: passive cable equation, threshold-refractory
action-potential trains, graded variation potentials, and rule-based
AP/VP/SP classification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RandomSource, TimeSeries

__all__ = [
    "CableParams",
    "APParams",
    "VPParams",
    "ClassifierConfig",
    "APTrain",
    "CableSolution",
    "electrotonic_length",
    "cable_steady_state",
    "simulate_cable_transient",
    "generate_ap_train",
    "generate_vp",
    "classify_signal",
]


@dataclass
class CableParams:
    """Passive cable constants: r_i axial (Ohm/m), r_m membrane (Ohm*m),
    C_m capacitance (F/m)."""

    r_i: float
    r_m: float
    C_m: float
    length: float
    V_boundary: float = 0.0

    def __post_init__(self):
        if min(self.r_i, self.r_m, self.C_m, self.length) <= 0:
            raise ValueError("cable constants and length must be positive")


@dataclass
class APParams:
    """All-or-none spike parameters.

    Shipped defaults sit inside the published envelopes: amplitude 0.05 V
    (tens to over a hundred millivolts) and speed 0.01 m/s = 60 cm/min
    (20-400 cm/min).
    """

    threshold: float = 0.01
    amplitude: float = 0.05
    duration: float = 5.0
    refractory: float = 60.0
    speed: float = 0.01

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ValueError("amplitude must be positive")
        if not self.refractory >= self.duration > 0:
            raise ValueError("require refractory >= duration > 0")
        if self.speed <= 0:
            raise ValueError("speed must be positive")


@dataclass
class VPParams:
    """Graded variation-potential parameters.

    `speed` has no literature-backed default (the published speed entry for
    VPs is duration-like), so it is an explicit user setting.
    """

    gain: float
    rise: float
    decay: float
    speed_decay: float = 0.0
    speed: float = 1e-3

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("gain must be positive")
        if self.rise <= 0 or self.decay <= 0:
            raise ValueError("rise and decay must be positive")
        if self.speed <= 0:
            raise ValueError("speed must be positive")


def electrotonic_length(p: CableParams) -> float:
    """lambda = sqrt(r_m / r_i), the passive spatial decay scale."""
    return float(np.sqrt(p.r_m / p.r_i))


def cable_steady_state(p: CableParams, x_grid: np.ndarray) -> np.ndarray:
    """Semi-infinite steady state V(x) = V_boundary * exp(-x/lambda).

    Requires length >= 5*lambda for the semi-infinite approximation.
    """
    lam = electrotonic_length(p)
    if p.length < 5 * lam:
        raise ValueError(
            f"length {p.length} < 5*lambda = {5 * lam:.6g}; use the transient solver"
        )
    x = np.asarray(x_grid, dtype=float)
    return p.V_boundary * np.exp(-x / lam)


@dataclass
class CableSolution:
    x: np.ndarray          # cell centers, m
    t: np.ndarray          # sample times, s
    V: np.ndarray          # shape (len(t), len(x)), volts


def simulate_cable_transient(
    p: CableParams, V0_profile: np.ndarray, t_grid: TimeSeries, n_cells: int
) -> CableSolution:
    """Explicit finite differences for C_m dV/dt = V''/r_i - V/r_m.

    x = 0 is clamped at V_boundary; the far end is sealed (zero gradient).
    """
    dx = p.length / n_cells
    dt = t_grid.dt
    dt_max = 0.4 * p.C_m * p.r_i * dx * dx
    if dt > dt_max:
        raise ValueError(
            f"time step dt={dt:.6g} violates the stability bound; "
            f"maximum admissible dt is {dt_max:.6g}"
        )
    V = np.asarray(V0_profile, dtype=float).copy()
    if V.size != n_cells:
        raise ValueError("V0_profile must have one entry per cell")
    t = t_grid.times
    out = np.empty((t.size, n_cells))
    out[0] = V
    a = dt / (p.C_m * p.r_i * dx * dx)
    b = dt / (p.C_m * p.r_m)
    for k in range(1, t.size):
        lap = np.empty(n_cells)
        lap[1:-1] = V[2:] - 2 * V[1:-1] + V[:-2]
        # ghost chosen so the x=0 face value is exactly V_boundary
        lap[0] = V[1] - 3 * V[0] + 2 * p.V_boundary
        lap[-1] = V[-2] - V[-1]                   # sealed end
        V = V + a * lap - b * V
        out[k] = V
    x = (np.arange(n_cells) + 0.5) * dx
    return CableSolution(x=x, t=t, V=out)


@dataclass
class APTrain:
    spike_times: list[float]
    waveform: TimeSeries


def _spike_shape(p: APParams, dt: float) -> np.ndarray:
    # Stereotyped shape: flat top for the spike duration, then a short
    # exponential repolarization tail.
    n_top = max(1, int(round(p.duration / dt)))
    tau_tail = p.duration / 3.0
    n_tail = int(round(3.0 * tau_tail / dt))
    tail = np.exp(-dt * np.arange(1, n_tail + 1) / tau_tail)
    return p.amplitude * np.concatenate([np.ones(n_top), tail])


def generate_ap_train(
    stimulus: TimeSeries, p: APParams, rng: RandomSource | None = None
) -> APTrain:
    """Emit identical spikes at upward threshold crossings, honoring the
    refractory period. Optional rng jitters crossing times by up to one sample."""
    v = stimulus.values
    t = stimulus.times
    above = v > p.threshold
    crossings = np.nonzero(above & ~np.concatenate([[False], above[:-1]]))[0]
    jitter = None
    if rng is not None and crossings.size:
        jitter = rng.generator().uniform(0.0, stimulus.dt, size=crossings.size)
    spike_times: list[float] = []
    for idx, k in enumerate(crossings):
        t_k = float(t[k]) + (float(jitter[idx]) if jitter is not None else 0.0)
        if spike_times and t_k - spike_times[-1] < p.refractory:
            continue
        spike_times.append(t_k)
    shape = _spike_shape(p, stimulus.dt)
    waveform = np.zeros_like(v)
    for t_s in spike_times:
        k0 = int(round((t_s - stimulus.t0) / stimulus.dt))
        k1 = min(k0 + shape.size, waveform.size)
        if k0 < waveform.size:
            waveform[k0:k1] += shape[: k1 - k0]
    return APTrain(spike_times, stimulus.with_values(waveform, unit="V"))


def generate_vp(
    stimulus_strength: float, distance: float, p: VPParams, t_grid: TimeSeries
) -> TimeSeries:
    """Difference-of-exponentials waveform with distance-graded amplitude.

    Amplitude = gain*strength*exp(-speed_decay*distance); arrival is delayed
    by distance over the distance-attenuated speed.
    """
    if stimulus_strength < 0:
        raise ValueError("stimulus_strength must be non-negative")
    amp = p.gain * stimulus_strength * np.exp(-p.speed_decay * distance)
    speed_eff = p.speed * np.exp(-p.speed_decay * distance)
    delay = distance / speed_eff
    t = t_grid.times - t_grid.t0 - delay
    wave = np.zeros_like(t)
    active = t > 0
    raw = np.exp(-t[active] / p.decay) - np.exp(-t[active] / p.rise)
    if raw.size and amp > 0:
        # peak of the raw difference-of-exponentials, for exact amplitude scaling
        tp = np.log(p.decay / p.rise) * p.rise * p.decay / (p.decay - p.rise) \
            if p.decay != p.rise else p.rise
        peak = np.exp(-tp / p.decay) - np.exp(-tp / p.rise)
        if peak > 0:
            wave[active] = amp * raw / peak
    return TimeSeries(t_grid.t0, t_grid.dt, wave, "V")


@dataclass
class ClassifierConfig:
    """Duration/polarity boundaries for the rule-based classifier (seconds)."""

    ap_max_duration: float = 20.0
    vp_min_duration: float = 10.0
    vp_max_duration: float = 480.0
    sp_min_duration: float = 480.0
    sp_max_duration: float = 720.0
    level_fraction: float = 0.1
    min_amplitude: float = 1e-6


def classify_signal(
    waveform: TimeSeries, config: ClassifierConfig | None = None
) -> str:
    """Classify a deflection as 'AP', 'VP', 'SP', or 'unknown'.

    Depolarizing and short -> AP; depolarizing and moderate -> VP;
    hyperpolarizing with an 8-12 minute duration -> SP.
    """
    cfg = config or ClassifierConfig()
    v = waveform.values
    peak = float(np.max(np.abs(v)))
    if peak < cfg.min_amplitude:
        return "unknown"
    depolarizing = abs(float(np.max(v))) >= abs(float(np.min(v)))
    level = cfg.level_fraction * peak
    active = np.abs(v) >= level
    duration = float(np.count_nonzero(active)) * waveform.dt
    if depolarizing:
        if duration < cfg.ap_max_duration:
            return "AP"
        if cfg.vp_min_duration <= duration <= cfg.vp_max_duration:
            return "VP"
        return "unknown"
    if cfg.sp_min_duration <= duration <= cfg.sp_max_duration:
        return "SP"
    return "unknown"
