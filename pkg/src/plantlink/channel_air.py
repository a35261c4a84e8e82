"""Aboveground VOC channel: ADR Green's function, continuous-source convolution,
correlated turbulence noise, multi-source superposition, delay-spread metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

from .core import (
    ChannelResponse,
    GridMismatchError,
    RandomSource,
    TimeSeries,
    convolve_causal,
    cumulative_trapezoid,
)

__all__ = [
    "AirChannelParams",
    "ObservationPoint",
    "DelaySpread",
    "impulse_response",
    "propagate_continuous",
    "superpose_sources",
    "add_turbulence_noise",
    "delay_spread_metrics",
]


@dataclass
class AirChannelParams:
    """Free-space advection-diffusion-reaction parameters."""

    M: float = 1.0
    D: float = 1e-5
    u: tuple[float, float, float] = (0.0, 0.0, 0.0)
    lam: float = 0.0

    def __post_init__(self):
        if self.D <= 0:
            raise ValueError("diffusivity D must be positive")
        if self.lam < 0:
            raise ValueError("loss rate lambda must be non-negative")
        if self.M < 0:
            raise ValueError("released mass M must be non-negative")
        self.u = tuple(float(c) for c in self.u)


@dataclass
class ObservationPoint:
    """Receiver position relative to the source."""

    r: tuple[float, float, float]

    def __post_init__(self):
        self.r = tuple(float(c) for c in self.r)
        if not all(np.isfinite(self.r)):
            raise ValueError("observation coordinates must be finite")


def _greens_function(p: AirChannelParams, r: np.ndarray, t: np.ndarray) -> np.ndarray:
    u = np.asarray(p.u)
    drift = r[None, :] - u[None, :] * t[:, None]
    dist2 = np.sum(drift * drift, axis=1)
    return (
        p.M
        / (4.0 * np.pi * p.D * t) ** 1.5
        * np.exp(-dist2 / (4.0 * p.D * t))
        * np.exp(-p.lam * t)
    )


def impulse_response(
    p: AirChannelParams, obs: ObservationPoint, t_grid: TimeSeries
) -> ChannelResponse:
    """Concentration at `obs` for an impulsive release of mass M at the origin."""
    t = t_grid.times
    if t[0] <= 0:
        raise ValueError("t_grid must be strictly positive (Green's function is singular at t=0)")
    r = np.asarray(obs.r)
    c = _greens_function(p, r, t)
    sig = TimeSeries(t_grid.t0, t_grid.dt, c, "mol/m^3")
    return ChannelResponse(
        sig,
        distance=float(np.linalg.norm(r)),
        medium={"D": p.D, "u": p.u, "lambda": p.lam},
    )


def propagate_continuous(
    flux: TimeSeries, p: AirChannelParams, obs: ObservationPoint
) -> ChannelResponse:
    """Convolve a causal emission flux with the per-unit-mass impulse response.

    The discrete kernel starts at t = dt (the Green's function is singular at
    t = 0), so the output grid is shifted by one step relative to the input.
    """
    n_kernel = flux.values.size
    kernel_grid = TimeSeries(flux.dt, flux.dt, np.zeros(n_kernel))
    unit_mass = AirChannelParams(M=1.0, D=p.D, u=p.u, lam=p.lam)
    kernel = impulse_response(unit_mass, obs, kernel_grid).signal
    out = convolve_causal(flux, kernel)
    out.unit = "mol/m^3"
    return ChannelResponse(
        out,
        distance=float(np.linalg.norm(obs.r)),
        medium={"D": p.D, "u": p.u, "lambda": p.lam},
    )


def superpose_sources(responses: Sequence[ChannelResponse]) -> ChannelResponse:
    """Sample-wise sum of aligned responses (the ADR equation is linear)."""
    if not responses:
        raise ValueError("need at least one response")
    base = responses[0]
    total = base.signal.values.copy()
    for resp in responses[1:]:
        if not base.signal.same_grid(resp.signal) or base.signal.unit != resp.signal.unit:
            raise GridMismatchError("responses must share grid and unit")
        total += resp.signal.values
    return ChannelResponse(base.signal.with_values(total), base.distance, dict(base.medium))


def ou_noise(
    n: int, dt: float, sigma: float, tau_corr: float, rng: np.random.Generator
) -> np.ndarray:
    """Zero-mean exponentially correlated (OU-type) process with stationary std sigma."""
    a = np.exp(-dt / tau_corr)
    innovations = rng.standard_normal(n) * sigma * np.sqrt(1.0 - a * a)
    innovations[0] = rng.standard_normal() * sigma  # stationary start
    # x[k] = a*x[k-1] + e[k]
    return lfilter([1.0], [1.0, -a], innovations)


def add_turbulence_noise(
    resp: ChannelResponse, sigma_rel: float, tau_corr: float, rng: RandomSource
) -> ChannelResponse:
    """Multiplicative correlated turbulence: c * (1 + n(t)), clamped at zero."""
    if sigma_rel < 0:
        raise ValueError("sigma_rel must be non-negative")
    if tau_corr <= 0:
        raise ValueError("tau_corr must be positive")
    if sigma_rel == 0:
        return ChannelResponse(
            resp.signal.with_values(resp.signal.values.copy()),
            resp.distance,
            dict(resp.medium),
        )
    n = ou_noise(
        resp.signal.values.size, resp.signal.dt, sigma_rel, tau_corr, rng.generator()
    )
    noisy = np.clip(resp.signal.values * (1.0 + n), 0.0, None)
    return ChannelResponse(resp.signal.with_values(noisy), resp.distance, dict(resp.medium))


@dataclass
class DelaySpread:
    t_peak: float
    t_tail: float
    tail_exponent: float


def delay_spread_metrics(resp: ChannelResponse, energy_fraction: float = 0.95) -> DelaySpread:
    """Peak time, energy-capture time, and log-log tail slope of a response.

    The tail exponent is the least-squares slope of log c vs log t over the
    last decade of post-peak samples.
    """
    if not 0 < energy_fraction < 1:
        raise ValueError("energy_fraction must lie in (0, 1)")
    sig = resp.signal
    v = sig.values
    if np.any(v < 0):
        raise ValueError("response must be non-negative")
    total = cumulative_trapezoid(sig)
    if total[-1] <= 0:
        raise ValueError("response is identically zero")
    t = sig.times
    k_peak = int(np.argmax(v))
    t_peak = float(t[k_peak])
    k_tail = int(np.searchsorted(total, energy_fraction * total[-1]))
    t_tail = float(t[min(k_tail, t.size - 1)])
    # last decade of samples after the peak
    mask = (t > max(t_peak, t[-1] / 10.0)) & (v > 0) & (t > 0)
    if np.count_nonzero(mask) < 2:
        mask = (t > t_peak) & (v > 0) & (t > 0)
    slope = float(np.polyfit(np.log(t[mask]), np.log(v[mask]), 1)[0])
    return DelaySpread(t_peak=t_peak, t_tail=t_tail, tail_exponent=slope)
