"""Belowground VOC channel: retarded effective Green's function, explicit
dual-phase 1-D finite differences, and breakthrough-curve metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel_air import AirChannelParams, ObservationPoint, impulse_response
from .core import ChannelResponse, TimeSeries

__all__ = [
    "SoilParams",
    "BreakthroughResult",
    "effective_impulse_response",
    "solve_dual_phase_1d",
    "breakthrough_curve",
]


@dataclass
class SoilParams:
    """Dual-phase porous-media parameters.

    The composite storage coefficient used by the reduced single-phase balance
    is theta_a + theta_w/K_H (instantaneous air-water partitioning c_a = K_H*c_w).
    """

    theta_a: float = 0.3
    theta_w: float = 0.0
    D_eff: float = 1e-7
    v: float = 0.0
    k_d_soil: float = 0.0
    K_H: float = 1.0
    R: float = 1.0

    def __post_init__(self):
        if self.theta_a < 0 or self.theta_w < 0 or self.theta_a + self.theta_w > 1:
            raise ValueError("require theta_a, theta_w >= 0 and theta_a + theta_w <= 1")
        if self.D_eff <= 0:
            raise ValueError("D_eff must be positive")
        if self.k_d_soil < 0:
            raise ValueError("k_d_soil must be non-negative")
        if self.K_H <= 0:
            raise ValueError("K_H must be positive")
        if self.R < 1:
            raise ValueError("retardation factor R must be >= 1")

    @property
    def storage_coefficient(self) -> float:
        return self.theta_a + self.theta_w / self.K_H


def effective_impulse_response(
    p: SoilParams, distance: float, M: float, t_grid: TimeSeries
) -> ChannelResponse:
    """Retarded free-space Green's function: D -> D_eff/R, u -> v/R, loss k_d_soil.

    Retardation shifts the peak later by the factor R (t_peak = R*r^2/(6*D_eff)
    for v = 0, k_d = 0).
    """
    if distance <= 0:
        raise ValueError("distance must be positive")
    eff = AirChannelParams(
        M=M, D=p.D_eff / p.R, u=(p.v / p.R, 0.0, 0.0), lam=p.k_d_soil
    )
    resp = impulse_response(eff, ObservationPoint((distance, 0.0, 0.0)), t_grid)
    resp.medium.update({"R": p.R, "D_eff": p.D_eff, "v": p.v})
    return resp


def solve_dual_phase_1d(
    p: SoilParams,
    flux_left_boundary: TimeSeries,
    length: float,
    n_cells: int,
    t_grid: TimeSeries,
) -> list[ChannelResponse]:
    """Explicit finite-difference solution of the reduced dual-phase balance.

    (theta_a + theta_w/K_H) dc_a/dt = D_eff c_a'' - v c_a' - k_d c_a, with the
    emission flux entering the first cell and a zero-gradient far boundary.
    Returns one response per cell (cell centers).
    """
    if n_cells < 8:
        raise ValueError("n_cells must be >= 8")
    if length <= 0:
        raise ValueError("length must be positive")
    beta = p.storage_coefficient
    dx = length / n_cells
    dt = t_grid.dt
    dt_max = 0.4 * dx * dx * beta / p.D_eff
    if p.v > 0:
        dt_max = min(dt_max, 0.9 * beta * dx / p.v)
    if dt > dt_max:
        raise ValueError(
            f"time step dt={dt:.6g} violates the stability bound; "
            f"maximum admissible dt is {dt_max:.6g}"
        )
    t = t_grid.times
    n_t = t.size
    flux = np.interp(t, flux_left_boundary.times, flux_left_boundary.values,
                     left=0.0, right=0.0)
    c = np.zeros(n_cells)
    history = np.zeros((n_t, n_cells))
    r_diff = p.D_eff / (beta * dx * dx)
    r_adv = p.v / (beta * dx)
    for k in range(1, n_t):
        step = t[k] - t[k - 1]
        lap = np.empty(n_cells)
        lap[1:-1] = c[2:] - 2 * c[1:-1] + c[:-2]
        lap[0] = c[1] - c[0]          # no diffusive flux through x=0 beyond injection
        lap[-1] = c[-2] - c[-1]       # zero-gradient far boundary
        dc = r_diff * lap
        if p.v > 0:  # upwind advection
            adv = np.empty(n_cells)
            adv[1:] = c[1:] - c[:-1]
            adv[0] = c[0]
            dc -= r_adv * adv
        dc -= (p.k_d_soil / beta) * c
        dc[0] += flux[k - 1] / (beta * dx)
        c = np.clip(c + step * dc, 0.0, None)
        history[k] = c
    x = (np.arange(n_cells) + 0.5) * dx
    return [
        ChannelResponse(
            TimeSeries(t_grid.t0, dt, history[:, i], "mol/m^3"),
            distance=float(x[i]),
            medium={"D_eff": p.D_eff, "beta": beta, "v": p.v},
        )
        for i in range(n_cells)
    ]


@dataclass
class BreakthroughResult:
    crossed: bool
    t_arrival: float | None
    t_peak: float
    peak: float


def breakthrough_curve(resp: ChannelResponse, threshold: float) -> BreakthroughResult:
    """First-crossing time (linear interpolation), peak time, and peak value.

    A response that never crosses the threshold yields crossed=False rather
    than an error.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    v = resp.signal.values
    t = resp.signal.times
    k_peak = int(np.argmax(v))
    peak = float(v[k_peak])
    above = np.nonzero(v >= threshold)[0]
    if above.size == 0:
        return BreakthroughResult(False, None, float(t[k_peak]), peak)
    k = int(above[0])
    if k == 0 or v[k] == v[k - 1]:
        t_arrival = float(t[k])
    else:
        frac = (threshold - v[k - 1]) / (v[k] - v[k - 1])
        t_arrival = float(t[k - 1] + frac * resp.signal.dt)
    return BreakthroughResult(True, t_arrival, float(t[k_peak]), peak)
