"""Emission models for leaf and root transmitters plus CSK/RSK modulation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import (
    GridMismatchError,
    TimeSeries,
    cumulative_trapezoid,
    integrate_ode,
    trapezoid_integral,
)

__all__ = [
    "TranscriptionParams",
    "CompartmentParams",
    "RootEmitterParams",
    "SymbolFrame",
    "transcription_rate",
    "emit_message",
    "step_compartments",
    "root_flux_mm",
    "root_flux_pulse",
    "step_surface_pool",
    "modulate_csk",
    "modulate_rsk",
]


@dataclass
class TranscriptionParams:
    """Logistic stress-to-transcription map with a gated emission window.

    `g` is a user-supplied degradation-dynamics series (defaults to zero on
    the stress grid); `c_delay` is the transcriptional delay offset, distinct
    from any concentration symbol elsewhere in the package.
    """

    nu_max: float
    w: float
    c_delay: float = 0.0
    k_d: float = 0.0
    g: TimeSeries | None = None
    tau_b: float = 0.0
    tau_e: float = float("inf")

    def __post_init__(self):
        if self.nu_max <= 0:
            raise ValueError("nu_max must be positive")
        if self.k_d < 0:
            raise ValueError("k_d must be non-negative")
        if not self.tau_e > self.tau_b >= 0:
            raise ValueError("require tau_e > tau_b >= 0")


@dataclass
class CompartmentParams:
    """Aqueous/lipid/gas pool transfer constants (leaf storage transmitter)."""

    eta: float
    k_a: float
    k_l: float
    k_g: float
    S0: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if min(self.k_a, self.k_l, self.k_g) <= 0:
            raise ValueError("transfer constants must be positive")
        if min(self.S0) < 0:
            raise ValueError("initial pools must be non-negative")


def _default_production(q_max: float, K_s: float) -> Callable[[float], float]:
    def production(s):
        return q_max * s / (K_s + s)

    return production


@dataclass
class RootEmitterParams:
    """Root secretion parameters: saturating flux, decaying pulse, surface pool."""

    q0: float = 0.0
    q_max: float = 1.0
    K_s: float = 1.0
    A: float = 1.0
    tau_b: float = 0.0
    tau_rel: float = 1.0
    k_rel: float = 0.0
    k_met: float = 0.0
    E0: float = 0.0
    P_of_s: Callable[[float], float] | None = None

    def __post_init__(self):
        if self.q0 < 0 or self.q_max <= 0 or self.K_s <= 0 or self.tau_rel <= 0:
            raise ValueError("require q0 >= 0, q_max > 0, K_s > 0, tau_rel > 0")
        if self.k_rel < 0 or self.k_met < 0:
            raise ValueError("k_rel and k_met must be non-negative")
        if self.E0 < 0:
            raise ValueError("E0 must be non-negative")
        if self.P_of_s is None:
            # Default production reuses the saturating law with the basal rate removed.
            self.P_of_s = _default_production(self.q_max, self.K_s)


@dataclass
class SymbolFrame:
    """Discrete symbol sequence with its modulation timing."""

    symbols: Sequence[int]
    symbol_period: float
    alphabet_size: int

    def __post_init__(self):
        self.symbols = list(int(s) for s in self.symbols)
        if self.alphabet_size < 2:
            raise ValueError("alphabet_size must be >= 2")
        if self.symbol_period <= 0:
            raise ValueError("symbol_period must be positive")
        if any(s < 0 or s >= self.alphabet_size for s in self.symbols):
            raise ValueError("every symbol must lie in [0, alphabet_size)")


def _degradation_series(s: TimeSeries, p: TranscriptionParams) -> np.ndarray:
    if p.g is None:
        return np.zeros_like(s.values)
    if not s.same_grid(p.g):
        raise GridMismatchError("stress and degradation series must share the grid")
    return p.g.values


def transcription_rate(s: TimeSeries, p: TranscriptionParams) -> TimeSeries:
    """I(t) = nu_max / (1 + exp(-w*s + c_delay)) - k_d*g(t), sample-wise."""
    g = _degradation_series(s, p)
    rate = p.nu_max / (1.0 + np.exp(-p.w * s.values + p.c_delay)) - p.k_d * g
    return s.with_values(rate, unit="mol/s")


def emit_message(s: TimeSeries, p: TranscriptionParams) -> TimeSeries:
    """Running integral of the transcription rate gated to [tau_b, tau_e).

    The window is half-open: the value at exactly t = tau_e is zero.
    """
    if p.tau_b < s.t0 - 1e-9 * s.dt:
        raise ValueError(f"tau_b={p.tau_b} precedes the grid start t0={s.t0}")
    rate = transcription_rate(s, p)
    t = s.times
    k_b = int(np.searchsorted(t, p.tau_b - 1e-9 * s.dt))
    m = np.zeros_like(rate.values)
    if k_b < len(t):
        tail = TimeSeries(t[k_b], s.dt, rate.values[k_b:], rate.unit)
        m[k_b:] = cumulative_trapezoid(tail)
    m[(t < p.tau_b) | (t >= p.tau_e)] = 0.0
    return s.with_values(m, unit="mol")


def _interpolator(s: TimeSeries) -> Callable[[float], float]:
    t = s.times

    def at(tau: float) -> float:
        return float(np.interp(tau, t, s.values))

    return at


def step_compartments(
    s: TimeSeries, p: CompartmentParams
) -> tuple[list[TimeSeries], TimeSeries]:
    """Integrate the three-pool storage model; returns (pools, emitted flux).

    dS_a/dt = eta*s - k_a*S_a, dS_l/dt = (1-eta)*s - k_l*S_l,
    dS_g/dt = k_a*S_a + k_l*S_l - k_g*S_g, q = k_g*S_g.
    """
    if np.any(s.values < 0):
        raise ValueError("production input must be non-negative")
    src = _interpolator(s)

    def rhs(t, y):
        sa, sl, sg = y
        prod = src(t)
        return np.array(
            [
                p.eta * prod - p.k_a * sa,
                (1.0 - p.eta) * prod - p.k_l * sl,
                p.k_a * sa + p.k_l * sl - p.k_g * sg,
            ]
        )

    pools = integrate_ode(rhs, p.S0, (s.t0, s.t_end), s.dt)
    for pool in pools:
        np.clip(pool.values, 0.0, None, out=pool.values)
        pool.unit = "mol"
    q = pools[2].with_values(p.k_g * pools[2].values, unit="mol/s")
    return pools, q


def root_flux_mm(s: TimeSeries, p: RootEmitterParams) -> TimeSeries:
    """Saturating secretion q0 + q_max*s/(K_s + s); bounded in [q0, q0+q_max)."""
    if np.any(s.values < 0):
        raise ValueError("stress input must be non-negative")
    q = p.q0 + p.q_max * s.values / (p.K_s + s.values)
    return s.with_values(q, unit="mol/(m^2*s)")


def root_flux_pulse(p: RootEmitterParams, t_grid: TimeSeries) -> TimeSeries:
    """Exponentially decaying release q0 + A*H(t - tau_b)*exp(-(t - tau_b)/tau_rel)."""
    t = t_grid.times
    active = t >= p.tau_b
    q = np.full_like(t, p.q0)
    q[active] += p.A * np.exp(-(t[active] - p.tau_b) / p.tau_rel)
    return TimeSeries(t_grid.t0, t_grid.dt, q, "mol/(m^2*s)")


def step_surface_pool(
    s: TimeSeries, p: RootEmitterParams
) -> tuple[TimeSeries, TimeSeries]:
    """Finite surface pool dE/dt = P(s) - (k_rel + k_met)*E; q = k_rel*E."""
    production = np.array([p.P_of_s(v) for v in s.values], dtype=float)
    if np.any(production < 0):
        raise ValueError("P(s) must be non-negative")
    if p.k_rel + p.k_met == 0 and np.any(production > 0):
        warnings.warn(
            "k_rel + k_met = 0 with positive production: surface pool is unbounded",
            RuntimeWarning,
            stacklevel=2,
        )
    prod_series = s.with_values(production)
    src = _interpolator(prod_series)

    def rhs(t, y):
        return np.array([src(t) - (p.k_rel + p.k_met) * y[0]])

    (E,) = integrate_ode(rhs, [p.E0], (s.t0, s.t_end), s.dt)
    np.clip(E.values, 0.0, None, out=E.values)
    E.unit = "mol/m^2"
    q = E.with_values(p.k_rel * E.values, unit="mol/(m^2*s)")
    return E, q


def _frame_grid(frame: SymbolFrame, dt: float) -> tuple[np.ndarray, int]:
    per_symbol = int(round(frame.symbol_period / dt))
    if per_symbol < 1 or abs(per_symbol * dt - frame.symbol_period) > 1e-9 * dt:
        raise ValueError("symbol_period must be an integer multiple of dt")
    n = per_symbol * len(frame.symbols)
    return np.zeros(n), per_symbol


def modulate_csk(
    frame: SymbolFrame,
    levels: Sequence[float],
    dt: float,
    pulse: str = "rect",
    tau_rel: float | None = None,
) -> TimeSeries:
    """Map symbols to flux levels; rect holds the level over the symbol period,
    exp shapes it as a decaying pulse with the given time constant."""
    levels = np.asarray(levels, dtype=float)
    if levels.size != frame.alphabet_size:
        raise ValueError(
            f"levels length {levels.size} != alphabet size {frame.alphabet_size}"
        )
    if np.any(np.diff(levels) <= 0) or levels[0] < 0:
        raise ValueError("levels must be strictly increasing and non-negative")
    flux, per_symbol = _frame_grid(frame, dt)
    if pulse == "rect":
        shape = np.ones(per_symbol)
    elif pulse == "exp":
        if tau_rel is None or tau_rel <= 0:
            raise ValueError("exp pulse shaping requires tau_rel > 0")
        shape = np.exp(-dt * np.arange(per_symbol) / tau_rel)
    else:
        raise ValueError(f"unknown pulse shape {pulse!r}")
    for k, sym in enumerate(frame.symbols):
        flux[k * per_symbol : (k + 1) * per_symbol] = levels[sym] * shape
    return TimeSeries(0.0, dt, flux, "mol/s")


def modulate_rsk(
    frame: SymbolFrame,
    ratio_table: Sequence[Sequence[float]],
    total_flux: float,
    dt: float,
) -> list[TimeSeries]:
    """Blend-ratio modulation: species i emits total_flux * ratio[symbol][i]."""
    table = np.asarray(ratio_table, dtype=float)
    if table.ndim != 2 or table.shape[0] != frame.alphabet_size:
        raise ValueError("ratio_table needs one row per alphabet symbol")
    if np.any(table < 0):
        raise ValueError("ratios must be non-negative")
    sums = table.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-9):
        bad = int(np.argmax(np.abs(sums - 1.0)))
        raise ValueError(f"ratio row {bad} sums to {sums[bad]:.12g}, expected 1")
    flux, per_symbol = _frame_grid(frame, dt)
    profiles = []
    for i in range(table.shape[1]):
        species = flux.copy()
        for k, sym in enumerate(frame.symbols):
            species[k * per_symbol : (k + 1) * per_symbol] = total_flux * table[sym, i]
        profiles.append(TimeSeries(0.0, dt, species, "mol/s"))
    return profiles
