"""plantlink: desk-scale simulator of plant-to-plant communication links.

Five physical modalities (airborne volatiles, soil volatiles, mycorrhizal
networks, electrical signals, acoustic emissions) share one link-analysis
layer and a scenario-driven CLI.
"""

__version__ = "0.1.0"

from .core import (
    ChannelResponse,
    GridMismatchError,
    RandomSource,
    TimeSeries,
    convolve_causal,
    integrate_ode,
    time_grid,
    trapezoid_integral,
)

__all__ = [
    "__version__",
    "TimeSeries",
    "ChannelResponse",
    "RandomSource",
    "GridMismatchError",
    "time_grid",
    "convolve_causal",
    "integrate_ode",
    "trapezoid_integral",
]
