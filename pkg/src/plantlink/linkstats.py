"""Link-layer analysis shared by all modalities: ISI metrics, CSK/RSK/event
detection, SNR estimation, and seeded Monte Carlo symbol-error rates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import (
    ChannelResponse,
    GridMismatchError,
    RandomSource,
    TimeSeries,
    cumulative_trapezoid,
)
from .transmitter import SymbolFrame

__all__ = [
    "DetectionResult",
    "ISIMetrics",
    "MonteCarloResult",
    "ERASURE",
    "isi_metrics",
    "detect_csk",
    "detect_rsk",
    "detect_events",
    "snr_estimate",
    "monte_carlo_ser",
]

ERASURE = -1


@dataclass
class DetectionResult:
    decided_symbols: list[int]
    errors: int
    ser: float
    erasures: int = 0


@dataclass
class ISIMetrics:
    delay_spread_s: float
    isi_ratio: float


def isi_metrics(
    h: ChannelResponse, symbol_period: float, energy_fraction: float = 0.95
) -> ISIMetrics:
    """Energy-capture delay spread plus the tail-energy fraction leaking past
    one symbol period: isi_ratio = integral_{T}^{inf} h / integral_0^{inf} h."""
    sig = h.signal
    if np.any(sig.values < 0):
        raise ValueError("impulse response must be non-negative")
    cum = cumulative_trapezoid(sig)
    total = cum[-1]
    if total <= 0:
        raise ValueError("impulse response is identically zero")
    rel_t = sig.times - sig.t0
    k = int(np.searchsorted(cum, energy_fraction * total))
    delay_spread = float(rel_t[min(k, rel_t.size - 1)])
    captured = float(np.interp(symbol_period, rel_t, cum))
    isi_ratio = float(np.clip(1.0 - captured / total, 0.0, 1.0))
    return ISIMetrics(delay_spread_s=delay_spread, isi_ratio=isi_ratio)


def _window_slices(sig: TimeSeries, frame: SymbolFrame, t_start: float):
    per = frame.symbol_period
    for k in range(len(frame.symbols)):
        lo = t_start + k * per
        hi = lo + per
        i0 = int(np.ceil((lo - sig.t0) / sig.dt - 1e-9))
        i1 = int(np.ceil((hi - sig.t0) / sig.dt - 1e-9))
        if i0 < 0 or i1 > sig.values.size or i1 <= i0:
            raise ValueError(f"symbol window {k} falls outside the signal")
        yield k, slice(i0, i1)


def _result(decided: list[int], truth: Sequence[int]) -> DetectionResult:
    errors = sum(1 for d, g in zip(decided, truth) if d != g)
    erasures = sum(1 for d in decided if d == ERASURE)
    return DetectionResult(decided, errors, errors / len(truth), erasures)


def detect_csk(
    received: ChannelResponse,
    frame_template: SymbolFrame,
    thresholds: Sequence[float],
    t_start: float | None = None,
    baseline: float = 0.0,
) -> DetectionResult:
    """Window-mean threshold detection. `thresholds` are the alphabet_size - 1
    sorted decision boundaries; an optional baseline is subtracted first."""
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.size != frame_template.alphabet_size - 1:
        raise ValueError("need alphabet_size - 1 thresholds")
    if np.any(np.diff(thresholds) <= 0) and thresholds.size > 1:
        raise ValueError("thresholds must be strictly increasing")
    sig = received.signal
    start = sig.t0 if t_start is None else t_start
    decided = []
    for _, sl in _window_slices(sig, frame_template, start):
        stat = float(np.mean(sig.values[sl])) - baseline
        decided.append(int(np.searchsorted(thresholds, stat, side="right")))
    return _result(decided, frame_template.symbols)


def detect_rsk(
    received_per_species: Sequence[ChannelResponse],
    frame_template: SymbolFrame,
    ratio_table: Sequence[Sequence[float]],
    t_start: float | None = None,
) -> DetectionResult:
    """Nearest-ratio decisions on normalized per-window species means.

    Decisions are invariant to any common positive scaling of the species
    signals; all-zero windows become erasures (counted as errors)."""
    if len(received_per_species) < 2:
        raise ValueError("RSK detection needs at least two species")
    table = np.asarray(ratio_table, dtype=float)
    sigs = [r.signal for r in received_per_species]
    for s in sigs[1:]:
        if not sigs[0].same_grid(s):
            raise GridMismatchError("species responses must share the grid")
    start = sigs[0].t0 if t_start is None else t_start
    decided = []
    for _, sl in _window_slices(sigs[0], frame_template, start):
        means = np.array([float(np.mean(s.values[sl])) for s in sigs])
        total = means.sum()
        if total <= 0:
            decided.append(ERASURE)
            continue
        ratios = means / total
        dist = np.linalg.norm(table - ratios[None, :], axis=1)
        decided.append(int(np.argmin(dist)))
    return _result(decided, frame_template.symbols)


def detect_events(
    event_times: Sequence[float],
    frame_template: SymbolFrame,
    count_map: Mapping[int, int],
    t_start: float = 0.0,
) -> DetectionResult:
    """Count events per half-open symbol window and decide by nearest count.

    `count_map` maps each symbol to its emitted event count per period."""
    events = np.asarray(sorted(event_times), dtype=float)
    per = frame_template.symbol_period
    symbols_by_count = sorted(count_map.items(), key=lambda kv: kv[1])
    counts = np.array([c for _, c in symbols_by_count])
    syms = [s for s, _ in symbols_by_count]
    decided = []
    for k in range(len(frame_template.symbols)):
        lo, hi = t_start + k * per, t_start + (k + 1) * per
        n = int(np.count_nonzero((events >= lo) & (events < hi)))
        decided.append(syms[int(np.argmin(np.abs(counts - n)))])
    return _result(decided, frame_template.symbols)


def snr_estimate(clean: ChannelResponse, noisy: ChannelResponse) -> float:
    """10*log10(signal power / error power); math.inf for identical signals."""
    if not clean.signal.same_grid(noisy.signal):
        raise GridMismatchError("signals must share the grid")
    err = noisy.signal.values - clean.signal.values
    p_err = float(np.sum(err * err))
    p_sig = float(np.sum(clean.signal.values**2))
    if p_err == 0.0:
        return math.inf
    return 10.0 * math.log10(p_sig / p_err)


@dataclass
class MonteCarloResult:
    ser: float
    ci95: float
    n_trials: int
    per_trial: list[float] = field(repr=False, default_factory=list)


def monte_carlo_ser(
    scenario: Callable[[RandomSource], float],
    n_trials: int,
    rng: RandomSource,
) -> MonteCarloResult:
    """Run seeded independent trials; trial i uses stream id i.

    The result is bit-reproducible for a fixed seed: each trial owns its RNG
    stream so the outcome cannot depend on execution order."""
    if n_trials < 100:
        raise ValueError("n_trials must be >= 100")
    per_trial = []
    for i in range(n_trials):
        try:
            per_trial.append(float(scenario(RandomSource(rng.seed, i))))
        except Exception as exc:
            raise RuntimeError(f"pipeline failed in trial {i}: {exc}") from exc
    arr = np.asarray(per_trial)
    ser = float(arr.mean())
    ci95 = float(1.96 * arr.std(ddof=0) / math.sqrt(n_trials))
    return MonteCarloResult(ser=ser, ci95=ci95, n_trials=n_trials, per_trial=per_trial)
