"""Dirichlet traces on the four edges of the box.

Traces are sampled at the edge cell centers and indexed by a time grid;
evaluation is piecewise linear in time and in arclength (clamped at the
ends of the time grid).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scalarlab.domain import BOX_HEIGHT, BOX_WIDTH, cell_centers

EDGE_LEFT, EDGE_RIGHT, EDGE_BOTTOM, EDGE_TOP = 0, 1, 2, 3


@dataclass
class BoundaryData:
    """Time-indexed Dirichlet traces; arrays are (ntimes, edge samples)."""

    times: np.ndarray
    left: np.ndarray
    right: np.ndarray
    bottom: np.ndarray
    top: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        if self.times.ndim != 1 or len(self.times) < 1:
            raise ValueError("boundary data needs at least one time sample")
        for name in ("left", "right", "bottom", "top"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 2 or arr.shape[0] != len(self.times):
                raise ValueError(f"trace {name} must be (ntimes, m)")
            setattr(self, name, arr)
        if self.left.shape[1] != self.right.shape[1]:
            raise ValueError("left/right traces disagree in length")
        if self.bottom.shape[1] != self.top.shape[1]:
            raise ValueError("bottom/top traces disagree in length")

    @property
    def ny(self) -> int:
        return self.left.shape[1]

    @property
    def nx(self) -> int:
        return self.bottom.shape[1]

    @classmethod
    def constant(cls, value: float, nx: int, ny: int) -> "BoundaryData":
        t = np.array([0.0])
        return cls(t, np.full((1, ny), float(value)), np.full((1, ny), float(value)),
                   np.full((1, nx), float(value)), np.full((1, nx), float(value)))

    @classmethod
    def zero(cls, nx: int, ny: int) -> "BoundaryData":
        return cls.constant(0.0, nx, ny)

    @classmethod
    def from_snapshots(cls, times, fields) -> "BoundaryData":
        """Traces read off a sequence of scalar fields (e.g. a torus run).

        Edge values are taken half a cell inside, matching the cell-centered
        sampling of the field: the nested experiments feed an outer solution
        to an inner box problem this way.
        """
        times = np.asarray(times, dtype=np.float64)
        if len(times) != len(fields):
            raise ValueError("one field per time sample required")
        lefts, rights, bottoms, tops = [], [], [], []
        for f in fields:
            lefts.append(f.data[:, 0])
            rights.append(f.data[:, -1])
            bottoms.append(f.data[0, :])
            tops.append(f.data[-1, :])
        return cls(times, np.array(lefts), np.array(rights),
                   np.array(bottoms), np.array(tops))

    def sup_norm(self) -> float:
        return max(float(np.abs(a).max())
                   for a in (self.left, self.right, self.bottom, self.top))

    def _time_weights(self, t: float) -> tuple[int, int, float]:
        ts = self.times
        if len(ts) == 1 or t <= ts[0]:
            return 0, 0, 0.0
        if t >= ts[-1]:
            return len(ts) - 1, len(ts) - 1, 0.0
        k = int(np.searchsorted(ts, t, side="right") - 1)
        w = (t - ts[k]) / (ts[k + 1] - ts[k])
        return k, k + 1, float(w)

    def at(self, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """The four traces (left, right, bottom, top) at one time."""
        k0, k1, w = self._time_weights(t)
        out = []
        for arr in (self.left, self.right, self.bottom, self.top):
            out.append((1.0 - w) * arr[k0] + w * arr[k1])
        return tuple(out)

    def eval_exits(self, t_exit: np.ndarray, x_exit: np.ndarray,
                   y_exit: np.ndarray, edge: np.ndarray) -> np.ndarray:
        """Trace values at exit events (vectorized, linear in time and arc)."""
        t_exit = np.asarray(t_exit, dtype=np.float64)
        out = np.empty(t_exit.shape)
        ys = cell_centers(self.ny, BOX_HEIGHT)
        xs = cell_centers(self.nx, BOX_WIDTH)
        for e, trace, coords, pos in (
            (EDGE_LEFT, self.left, ys, y_exit),
            (EDGE_RIGHT, self.right, ys, y_exit),
            (EDGE_BOTTOM, self.bottom, xs, x_exit),
            (EDGE_TOP, self.top, xs, x_exit),
        ):
            mask = edge == e
            if not np.any(mask):
                continue
            vals = np.empty(int(mask.sum()))
            tm, pm = t_exit[mask], np.asarray(pos)[mask]
            for i, (tt, pp) in enumerate(zip(tm, pm)):
                k0, k1, w = self._time_weights(float(tt))
                row = (1.0 - w) * trace[k0] + w * trace[k1]
                vals[i] = np.interp(pp, coords, row)
            out[mask] = vals
        return out
