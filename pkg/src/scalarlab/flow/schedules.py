"""Stage schedules driving the time-rescaled mixing cascades.

Two geometric clocks appear.  The pentadic clock compresses the stages of
the building-block mixer into ``[0, 1/2]``:

    tau_j = (1/2) (5^{(alpha-1) j} - 5^{(alpha-1)(j+1)}),   t_n = sum_{j<n} tau_j,

so ``t_n = (1/2)(1 - 5^{(alpha-1) n})`` increases to 1/2.  The dyadic clock
runs the universal cascade backwards from 1 down to 1/2:

    sigma_j = (1/2) (2^{(alpha-1) j/2} - 2^{(alpha-1)(j+1)/2}),
    s_n = 1/2 + sum_{j>=n} sigma_j = (1/2)(1 + 2^{(alpha-1) n/2}),

with ``s_0 = 1`` decreasing to 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VALID_MIXERS = ("carousel",)


@dataclass(frozen=True)
class FlowParams:
    """Spatial-regularity exponent and building-block selection."""

    alpha: float = 0.5
    base: int = 5
    mixer: str = "carousel"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.base != 5:
            raise ValueError("only the factor-5 family is supported")
        if self.mixer not in VALID_MIXERS:
            raise ValueError(f"unknown building block {self.mixer!r}")


def tau_j(alpha: float, j) -> np.ndarray:
    j = np.asarray(j, dtype=np.float64)
    return 0.5 * (5.0 ** ((alpha - 1.0) * j) - 5.0 ** ((alpha - 1.0) * (j + 1.0)))


def t_n(alpha: float, n) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    return 0.5 * (1.0 - 5.0 ** ((alpha - 1.0) * n))


def sigma_j(alpha: float, j) -> np.ndarray:
    j = np.asarray(j, dtype=np.float64)
    return 0.5 * (2.0 ** ((alpha - 1.0) * j / 2.0) - 2.0 ** ((alpha - 1.0) * (j + 1.0) / 2.0))


def s_n(alpha: float, n) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    return 0.5 * (1.0 + 2.0 ** ((alpha - 1.0) * n / 2.0))


@dataclass(frozen=True)
class ScheduleTable:
    """Finite tables of both clocks, truncated at ``depth`` stages."""

    alpha: float
    depth: int
    tau: np.ndarray = field(repr=False)    # (depth,) pentadic stage durations
    t: np.ndarray = field(repr=False)      # (depth+1,) pentadic stage starts
    sigma: np.ndarray = field(repr=False)  # (depth,) dyadic stage durations
    s: np.ndarray = field(repr=False)      # (depth+1,) dyadic stage starts, decreasing

    def pentadic_stage(self, time: float) -> int:
        """Index n with t_n <= time < t_{n+1}, or -1 outside the active window."""
        if time < self.t[0] or time >= self.t[-1]:
            return -1
        return int(np.searchsorted(self.t, time, side="right") - 1)

    def dyadic_stage(self, time: float) -> int:
        """Index n with s_{n+1} <= time < s_n, or -1 outside (1/2, 1)."""
        if time >= self.s[0] or time <= self.s[-1]:
            return -1
        # self.s is decreasing; search on the reversed array
        rev = self.s[::-1]
        k = int(np.searchsorted(rev, time, side="left"))
        return self.depth - k

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("schedule depth must be at least 1")


def build_schedule(params: FlowParams, depth: int = 24) -> ScheduleTable:
    """Tabulate both clocks to the requested truncation depth."""
    if depth < 1:
        raise ValueError("schedule depth must be at least 1")
    a = params.alpha
    j = np.arange(depth)
    n = np.arange(depth + 1)
    return ScheduleTable(
        alpha=a,
        depth=depth,
        tau=tau_j(a, j),
        t=t_n(a, n),
        sigma=sigma_j(a, j),
        s=s_n(a, n),
    )
