"""Shared numerics: time series, causal convolution, RK4 integration, quadrature, seeded RNG.

Everything here is pure and deterministic; all stochastic behaviour in the
package is funneled through :class:`RandomSource`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "TimeSeries",
    "ChannelResponse",
    "RandomSource",
    "GridMismatchError",
    "time_grid",
    "convolve_causal",
    "integrate_ode",
    "trapezoid_integral",
]


class GridMismatchError(ValueError):
    """Two series with incompatible (t0, dt) or units were combined."""


DIMENSIONLESS = "1"


def _combine_units(a: str, b: str) -> str:
    if a == DIMENSIONLESS:
        return b
    if b == DIMENSIONLESS:
        return a
    return f"({a})*({b})"


@dataclass
class TimeSeries:
    """Uniformly sampled scalar signal.

    t0, dt in seconds; `unit` is a tag checked at combination points, not a
    dimensional algebra.
    """

    t0: float
    dt: float
    values: np.ndarray
    unit: str = DIMENSIONLESS

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("values must be a non-empty 1-D array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.values.size - 1)

    def same_grid(self, other: "TimeSeries") -> bool:
        return (
            self.values.size == other.values.size
            and np.isclose(self.dt, other.dt, rtol=0, atol=1e-12 * self.dt)
            and np.isclose(self.t0, other.t0, rtol=0, atol=1e-9 * self.dt)
        )

    def _check_combinable(self, other: "TimeSeries"):
        if not np.isclose(self.dt, other.dt, rtol=0, atol=1e-12 * self.dt):
            raise GridMismatchError(f"dt mismatch: {self.dt} vs {other.dt}")
        if not np.isclose(self.t0, other.t0, rtol=0, atol=1e-9 * self.dt):
            raise GridMismatchError(f"t0 mismatch: {self.t0} vs {other.t0}")
        if self.values.size != other.values.size:
            raise GridMismatchError(
                f"length mismatch: {self.values.size} vs {other.values.size}"
            )

    def __add__(self, other: "TimeSeries") -> "TimeSeries":
        self._check_combinable(other)
        if self.unit != other.unit:
            raise GridMismatchError(f"unit mismatch: {self.unit!r} vs {other.unit!r}")
        return TimeSeries(self.t0, self.dt, self.values + other.values, self.unit)

    def __sub__(self, other: "TimeSeries") -> "TimeSeries":
        self._check_combinable(other)
        if self.unit != other.unit:
            raise GridMismatchError(f"unit mismatch: {self.unit!r} vs {other.unit!r}")
        return TimeSeries(self.t0, self.dt, self.values - other.values, self.unit)

    def __mul__(self, other):
        if isinstance(other, TimeSeries):
            self._check_combinable(other)
            return TimeSeries(
                self.t0,
                self.dt,
                self.values * other.values,
                _combine_units(self.unit, other.unit),
            )
        return TimeSeries(self.t0, self.dt, self.values * float(other), self.unit)

    __rmul__ = __mul__

    def with_values(self, values: np.ndarray, unit: str | None = None) -> "TimeSeries":
        return TimeSeries(self.t0, self.dt, values, self.unit if unit is None else unit)

    def index_of(self, t: float) -> int:
        """Nearest sample index for time t (clipped to the grid)."""
        k = int(round((t - self.t0) / self.dt))
        return min(max(k, 0), self.values.size - 1)


def time_grid(t0: float, dt: float, n: int, unit: str = DIMENSIONLESS) -> TimeSeries:
    """All-zero series used as a sampling-grid template."""
    return TimeSeries(t0, dt, np.zeros(int(n)), unit)


@dataclass
class ChannelResponse:
    """Signal observed at a receiver location plus channel metadata."""

    signal: TimeSeries
    distance: float = 0.0
    medium: dict = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        return self.signal.values

    @property
    def times(self) -> np.ndarray:
        return self.signal.times


@dataclass(frozen=True)
class RandomSource:
    """Reproducible RNG keyed by (seed, stream).

    Identical (seed, stream) pairs yield bit-identical sample sequences
    regardless of thread scheduling: each call to :meth:`generator` returns a
    fresh, independently seeded generator.
    """

    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 2**64) or not (0 <= self.stream < 2**64):
            raise ValueError("seed and stream must be 64-bit unsigned integers")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, self.stream]))

    def substream(self, stream: int) -> "RandomSource":
        return RandomSource(self.seed, stream)


def convolve_causal(signal: TimeSeries, kernel: TimeSeries) -> TimeSeries:
    """Discrete causal convolution: out[k] = dt * sum_{j<=k} signal[j]*kernel[k-j].

    Output length is len(signal) + len(kernel) - 1 and the output grid starts
    at signal.t0 + kernel.t0 (kernel sample times are offsets).
    """
    if not np.isclose(signal.dt, kernel.dt, rtol=0, atol=1e-12 * signal.dt):
        raise GridMismatchError(f"dt mismatch: {signal.dt} vs {kernel.dt}")
    out = np.convolve(signal.values, kernel.values) * signal.dt
    unit = _combine_units(_combine_units(signal.unit, kernel.unit), "s")
    return TimeSeries(signal.t0 + kernel.t0, signal.dt, out, unit)


def integrate_ode(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    state0: Sequence[float],
    t_span: tuple[float, float],
    dt: float,
) -> list[TimeSeries]:
    """Classical fixed-step RK4. Returns one TimeSeries per state component.

    Sample count is floor((t1 - t0)/dt) + 1. Raises on a non-finite derivative,
    identifying the failing time.
    """
    t0, t1 = t_span
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t1 <= t0:
        raise ValueError("t_span must be increasing")
    n_steps = int(np.floor((t1 - t0) / dt + 1e-12))
    y = np.asarray(state0, dtype=float).copy()
    out = np.empty((n_steps + 1, y.size))
    out[0] = y
    t = t0
    for i in range(n_steps):
        k1 = np.asarray(rhs(t, y), dtype=float)
        k2 = np.asarray(rhs(t + dt / 2, y + dt / 2 * k1), dtype=float)
        k3 = np.asarray(rhs(t + dt / 2, y + dt / 2 * k2), dtype=float)
        k4 = np.asarray(rhs(t + dt, y + dt * k3), dtype=float)
        if not (
            np.all(np.isfinite(k1))
            and np.all(np.isfinite(k2))
            and np.all(np.isfinite(k3))
            and np.all(np.isfinite(k4))
        ):
            raise FloatingPointError(f"non-finite derivative at t={t:.6g}")
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (i + 1) * dt
        out[i + 1] = y
    return [TimeSeries(t0, dt, out[:, j]) for j in range(y.size)]


def trapezoid_integral(ts: TimeSeries) -> float:
    """Trapezoidal rule over all samples. A single sample integrates to 0."""
    if ts.values.size < 2:
        return 0.0
    return float(np.trapezoid(ts.values, dx=ts.dt))


def cumulative_trapezoid(ts: TimeSeries) -> np.ndarray:
    """Running trapezoid integral with the same sample count as the input."""
    v = ts.values
    if v.size < 2:
        return np.zeros_like(v)
    seg = 0.5 * ts.dt * (v[1:] + v[:-1])
    return np.concatenate([[0.0], np.cumsum(seg)])
