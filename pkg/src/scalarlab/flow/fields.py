"""The explicit incompressible velocity fields.

* ``BuildingBlockField`` -- the stage mixer U on [0, inf): stage n acts on
  the factor-5^n tiling with amplitude 5^{-n} and stops to all orders at
  integer times.
* ``TwoCellField`` -- v: the stages of U compressed into [0, 1/2] by the
  pentadic clock; identically zero from 1/2 on.
* ``UniversalField`` -- V: rotated-rescaled copies of v run backwards down
  the dyadic clock on [1/2, 1]; zero before 1/2.
* ``ForwardBackwardField`` -- W: V forward on [1/4, 1/2], time-reflected
  on [1/2, 3/4], zero elsewhere.

Fields evaluate anywhere in the plane through their periodic extension and
are divergence-free by construction (perpendicular gradients of stream
functions).

``segments`` exposes the natural time partition: within one segment the
field is a single smooth pulse ``u(t, x) = g(t) * steady(x)``.  Segments
carry the autonomous part and the cumulative pulse mass, which lets the
solver and the characteristics integrate trajectories in the effective
time ``ds = g(t) dt`` instead of resolving the temporal bump.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from scalarlab.domain import BOX_HEIGHT, BOX_WIDTH
from scalarlab.flow import carousel
from scalarlab.flow.schedules import FlowParams, build_schedule
from scalarlab.geometry import rotation_matrix

SteadyFn = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class Segment:
    """A time interval on which the field is one smooth pulse.

    ``weight_integral(a, b)`` returns the effective time carried by the
    pulse between two times inside the segment; ``substeps_per_effective``
    converts effective time into a trajectory-resolution substep count
    (orbit curvature scale), independent of how sharply the pulse peaks.
    """

    t0: float
    t1: float
    active: bool
    max_speed: float
    label: str = ""
    steady: SteadyFn | None = None
    weight_integral: Callable[[float, float], float] | None = None
    substeps_per_effective: float = 0.0

    @property
    def duration(self) -> float:
        return self.t1 - self.t0


def _clip_segments(segs: list[Segment], t0: float, t1: float) -> list[Segment]:
    out = []
    for s in segs:
        a, b = max(s.t0, t0), min(s.t1, t1)
        if b - a > 1e-14:
            out.append(Segment(a, b, s.active, s.max_speed, s.label,
                               s.steady, s.weight_integral, s.substeps_per_effective))
    return out


class VelocityField:
    """Base interface; concrete fields override eval/segments/stream."""

    domain = "box"
    active_interval: tuple[float, float] = (0.0, 1.0)

    def eval(self, t: float, X: np.ndarray, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def segments(self, t0: float, t1: float) -> list[Segment]:
        return [Segment(t0, t1, True, self.max_speed(), "field")]

    def max_speed(self) -> float:
        return 1.0

    def stream(self, t: float, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no stream accessor")


def _zeros_like_pair(X):
    z = np.zeros_like(np.asarray(X, dtype=np.float64))
    return z, z.copy()


class ZeroField(VelocityField):
    active_interval = (0.0, 0.0)

    def eval(self, t, X, Y):
        return _zeros_like_pair(X)

    def segments(self, t0, t1):
        return [Segment(t0, t1, False, 0.0, "zero")]

    def max_speed(self):
        return 0.0

    def stream(self, t, X, Y):
        return np.zeros_like(np.asarray(X, dtype=np.float64))


class ConstantField(VelocityField):
    """Uniform drift; used by translation oracles and synthetic drift runs."""

    def __init__(self, ux: float, uy: float):
        self.ux = float(ux)
        self.uy = float(uy)

    def eval(self, t, X, Y):
        X = np.asarray(X, dtype=np.float64)
        return np.full_like(X, self.ux), np.full_like(X, self.uy)

    def segments(self, t0, t1):
        ev = self.eval
        return [Segment(t0, t1, True, self.max_speed(), "constant",
                        steady=lambda X, Y: ev(0.0, X, Y),
                        weight_integral=lambda a, b: b - a,
                        substeps_per_effective=0.0)]

    def max_speed(self):
        return math.hypot(self.ux, self.uy)

    def stream(self, t, X, Y):
        return self.ux * np.asarray(Y, dtype=np.float64) - self.uy * np.asarray(X, dtype=np.float64)


class ShearField(VelocityField):
    """u = (y, 0); the unit Lipschitz reference for the norm probes."""

    def eval(self, t, X, Y):
        Y = np.asarray(Y, dtype=np.float64)
        return Y.copy(), np.zeros_like(Y)

    def segments(self, t0, t1):
        ev = self.eval
        return [Segment(t0, t1, True, BOX_HEIGHT, "shear",
                        steady=lambda X, Y: ev(0.0, X, Y),
                        weight_integral=lambda a, b: b - a,
                        substeps_per_effective=0.0)]

    def max_speed(self):
        return BOX_HEIGHT

    def stream(self, t, X, Y):
        return 0.5 * np.asarray(Y, dtype=np.float64) ** 2


def _carousel_phase_segments(
    t_start: float,
    duration: float,
    level: int,
    tables: carousel.RotorTables,
    amplitude: float,
    label: str,
) -> list[Segment]:
    """Phase segments of one mixing stage mapped onto [t_start, t_start+duration].

    ``amplitude`` multiplies the steady rotor field (1 for U itself,
    1/tau_n for the two-cell compression).  The weight integral absorbs the
    time mapping so steady * integral reproduces the half-turn per phase.
    """
    segs = []
    speed = carousel.stage_speed_bound(level, tables) * amplitude
    for p in range(carousel.NPHASES):
        a = t_start + duration * p / carousel.NPHASES
        b = t_start + duration * (p + 1) / carousel.NPHASES

        def steady(X, Y, _p=p):
            ux, uy = carousel.phase_steady(_p, X, Y, level, tables)
            return amplitude * ux, amplitude * uy

        def weight(ta, tb, _p=p):
            return duration * carousel.phase_weight_integral(
                _p, (ta - t_start) / duration, (tb - t_start) / duration)

        # the steady rotor laps in effective time 1/amplitude
        segs.append(Segment(a, b, True, speed, f"{label} phase {p}",
                            steady=steady, weight_integral=weight,
                            substeps_per_effective=32.0 * amplitude))
    return segs


class BuildingBlockField(VelocityField):
    """The mixer U on [0, inf); stage n lives on [n, n+1]."""

    domain = "box"

    def __init__(self, params: FlowParams | None = None, ring: float = carousel.DEFAULT_RING):
        self.params = params or FlowParams()
        self.tables = carousel.rotor_tables(ring)
        self.active_interval = (0.0, math.inf)

    def eval(self, t, X, Y):
        if t < 0.0:
            raise ValueError("U is defined for t >= 0")
        n = int(math.floor(t))
        return carousel.stage_velocity(t - n, X, Y, n, self.tables)

    def stream(self, t, X, Y):
        n = int(math.floor(t))
        return carousel.stage_stream(t - n, X, Y, n, self.tables)

    def stage_speed(self, n: int) -> float:
        return carousel.stage_speed_bound(n, self.tables)

    def segments(self, t0, t1):
        segs = []
        for n in range(int(math.floor(t0)), int(math.ceil(t1))):
            segs.extend(_carousel_phase_segments(float(n), 1.0, n, self.tables,
                                                 1.0, f"U stage {n}"))
        return _clip_segments(segs, t0, t1)


class TwoCellField(VelocityField):
    """The two-cell dissipator v on [0, 1]; zero from t = 1/2 on.

    ``depth`` truncates the cascade: stages ``0 .. depth-1`` run and the
    remaining sliver of [0, 1/2] carries the zero field.  The field stops
    to all orders at stage boundaries, so truncation keeps it smooth.
    """

    domain = "box"

    def __init__(
        self,
        alpha: float = 0.5,
        depth: int = 3,
        ring: float = carousel.DEFAULT_RING,
        params: FlowParams | None = None,
    ):
        if depth < 1:
            raise ValueError("two-cell field needs depth >= 1")
        self.params = params or FlowParams(alpha=alpha)
        self.alpha = self.params.alpha
        self.depth = depth
        self.schedule = build_schedule(self.params, depth=depth)
        self.tables = carousel.rotor_tables(ring)
        self.active_interval = (0.0, float(self.schedule.t[depth]))

    def _locate(self, t: float) -> tuple[int, float]:
        sched = self.schedule
        if t < -1e-12 or t > 1.0 + 1e-12:
            raise ValueError("v is defined on [0, 1]")
        if t >= sched.t[self.depth] or t >= 0.5:
            return -1, 0.0
        n = sched.pentadic_stage(t)
        if n < 0 or n >= self.depth:
            return -1, 0.0
        return n, (t - sched.t[n]) / sched.tau[n]

    def eval(self, t, X, Y):
        n, s = self._locate(t)
        if n < 0:
            return _zeros_like_pair(X)
        ux, uy = carousel.stage_velocity(s, X, Y, n, self.tables)
        inv = 1.0 / self.schedule.tau[n]
        return ux * inv, uy * inv

    def stream(self, t, X, Y):
        n, s = self._locate(t)
        if n < 0:
            return np.zeros_like(np.asarray(X, dtype=np.float64))
        return carousel.stage_stream(s, X, Y, n, self.tables) / self.schedule.tau[n]

    def stage_speed(self, n: int) -> float:
        return carousel.stage_speed_bound(n, self.tables) / self.schedule.tau[n]

    def max_speed(self) -> float:
        return self.stage_speed(0)

    def segments(self, t0, t1):
        sched = self.schedule
        segs = []
        for n in range(self.depth):
            segs.extend(_carousel_phase_segments(float(sched.t[n]), float(sched.tau[n]),
                                                 n, self.tables, 1.0 / float(sched.tau[n]),
                                                 f"v stage {n}"))
        segs.append(Segment(float(sched.t[self.depth]), 1.0, False, 0.0, "v rest"))
        return _clip_segments(segs, t0, t1)


def _rotated_steady(steady: SteadyFn, n: int, scale: float) -> SteadyFn:
    M = rotation_matrix(n)
    Minv = rotation_matrix(-n)

    def fn(X, Y):
        Xp = Minv[0, 0] * X + Minv[0, 1] * Y
        Yp = Minv[1, 0] * X + Minv[1, 1] * Y
        ux, uy = steady(Xp, Yp)
        return (scale * (M[0, 0] * ux + M[0, 1] * uy),
                scale * (M[1, 0] * ux + M[1, 1] * uy))

    return fn


class UniversalField(VelocityField):
    """The universal dissipator V on the torus.

    Zero on [0, 1/2]; on each dyadic window [s_{n+1}, s_n] it is the
    rotated-rescaled two-cell flow acting inside the 2^n tiles.  The inner
    pentadic truncation may vary per stage (deep tiles carry shallower
    cascades; :func:`universal_depths` derives the list from a grid).
    """

    domain = "torus"

    def __init__(
        self,
        alpha: float = 0.5,
        dyadic_depth: int = 8,
        inner_depth: list[int] | int = 2,
        ring: float = carousel.DEFAULT_RING,
        params: FlowParams | None = None,
    ):
        if dyadic_depth < 1:
            raise ValueError("universal field needs dyadic_depth >= 1")
        self.params = params or FlowParams(alpha=alpha)
        self.alpha = self.params.alpha
        self.dyadic_depth = dyadic_depth
        if isinstance(inner_depth, int):
            inner_depth = [inner_depth] * dyadic_depth
        if len(inner_depth) != dyadic_depth:
            raise ValueError("need one inner depth per dyadic stage")
        self.inner_depth = list(inner_depth)
        self.schedule = build_schedule(self.params, depth=dyadic_depth)
        self._inner = {
            d: TwoCellField(alpha=self.alpha, depth=d, ring=ring, params=self.params)
            for d in sorted({d for d in self.inner_depth if d >= 1})
        }
        self.active_interval = (0.5, 1.0)

    def _locate(self, t: float) -> int:
        if t < -1e-12 or t > 1.0 + 1e-12:
            raise ValueError("V is defined on [0, 1]")
        if t <= 0.5 or t >= 1.0:
            return -1
        n = self.schedule.dyadic_stage(t)
        if n < 0 or n >= self.dyadic_depth or self.inner_depth[n] < 1:
            return -1
        return n

    def eval(self, t, X, Y):
        n = self._locate(t)
        if n < 0:
            return _zeros_like_pair(X)
        sched = self.schedule
        tv = (t - sched.s[n + 1]) / sched.sigma[n]
        v = self._inner[self.inner_depth[n]]
        steady_like = _rotated_steady(lambda Xp, Yp: v.eval(min(max(tv, 0.0), 1.0), Xp, Yp),
                                      n, 1.0 / float(sched.sigma[n]))
        return steady_like(np.asarray(X, dtype=np.float64), np.asarray(Y, dtype=np.float64))

    def max_speed(self) -> float:
        speeds = [0.0]
        for n in range(self.dyadic_depth):
            d = self.inner_depth[n]
            if d >= 1:
                speeds.append(self._inner[d].max_speed()
                              * 2.0 ** (-n / 2.0) / float(self.schedule.sigma[n]))
        return max(speeds)

    def segments(self, t0, t1):
        sched = self.schedule
        segs = [Segment(0.0, 0.5, False, 0.0, "V rest"),
                Segment(0.5, float(sched.s[self.dyadic_depth]), False, 0.0, "V tail")]
        for n in range(self.dyadic_depth - 1, -1, -1):
            a = float(sched.s[n + 1])
            sig = float(sched.sigma[n])
            d = self.inner_depth[n]
            if d < 1:
                segs.append(Segment(a, float(sched.s[n]), False, 0.0, f"V stage {n} skipped"))
                continue
            v = self._inner[d]
            scale = 2.0 ** (-n / 2.0) / sig
            for seg in v.segments(0.0, 1.0):
                steady = (None if seg.steady is None
                          else _rotated_steady(seg.steady, n, 1.0 / sig))
                weight = (None if seg.weight_integral is None
                          else (lambda ta, tb, _w=seg.weight_integral, _a=a, _s=sig:
                                _s * _w((ta - _a) / _s, (tb - _a) / _s)))
                segs.append(Segment(a + sig * seg.t0, a + sig * seg.t1,
                                    seg.active, seg.max_speed * scale,
                                    f"V stage {n} | {seg.label}", steady, weight,
                                    seg.substeps_per_effective / sig))
        return _clip_segments(sorted(segs, key=lambda s: s.t0), t0, t1)


class ForwardBackwardField(VelocityField):
    """W: V(4t-1) on [1/4, 1/2], V(3-4t) on [1/2, 3/4], zero elsewhere."""

    domain = "torus"

    def __init__(self, universal: UniversalField):
        self.universal = universal
        self.active_interval = (0.25, 0.75)

    def eval(self, t, X, Y):
        if 0.25 <= t <= 0.5:
            return self.universal.eval(4.0 * t - 1.0, X, Y)
        if 0.5 < t <= 0.75:
            return self.universal.eval(3.0 - 4.0 * t, X, Y)
        return _zeros_like_pair(X)

    def max_speed(self) -> float:
        return self.universal.max_speed()

    def segments(self, t0, t1):
        inner = self.universal.segments(0.0, 1.0)
        segs = [Segment(0.0, 0.25, False, 0.0, "W rest"),
                Segment(0.75, 1.0, False, 0.0, "W rest")]
        for seg in inner:
            weight = (None if seg.weight_integral is None
                      else (lambda ta, tb, _w=seg.weight_integral:
                            0.25 * _w(4.0 * ta - 1.0, 4.0 * tb - 1.0)))
            segs.append(Segment((seg.t0 + 1.0) / 4.0, (seg.t1 + 1.0) / 4.0,
                                seg.active, seg.max_speed, f"W fwd | {seg.label}",
                                seg.steady, weight, seg.substeps_per_effective))
        for seg in inner:
            weight = (None if seg.weight_integral is None
                      else (lambda ta, tb, _w=seg.weight_integral:
                            0.25 * _w(3.0 - 4.0 * tb, 3.0 - 4.0 * ta)))
            segs.append(Segment((3.0 - seg.t1) / 4.0, (3.0 - seg.t0) / 4.0,
                                seg.active, seg.max_speed, f"W bwd | {seg.label}",
                                seg.steady, weight, seg.substeps_per_effective))
        return _clip_segments(sorted(segs, key=lambda s: s.t0), t0, t1)


class ReversedField(VelocityField):
    """Time reversal t -> 1 - t of another field (the adjoint flow)."""

    def __init__(self, base: VelocityField):
        self.base = base
        self.domain = base.domain
        a, b = base.active_interval
        self.active_interval = (1.0 - b, 1.0 - a)

    def eval(self, t, X, Y):
        return self.base.eval(1.0 - t, X, Y)

    def max_speed(self) -> float:
        return self.base.max_speed()

    def segments(self, t0, t1):
        inner = self.base.segments(max(0.0, 1.0 - t1), min(1.0, 1.0 - t0))
        segs = []
        for s in inner:
            weight = (None if s.weight_integral is None
                      else (lambda ta, tb, _w=s.weight_integral:
                            _w(1.0 - tb, 1.0 - ta)))
            segs.append(Segment(1.0 - s.t1, 1.0 - s.t0, s.active, s.max_speed,
                                f"rev | {s.label}", s.steady, weight,
                                s.substeps_per_effective))
        return _clip_segments(sorted(segs, key=lambda s: s.t0), t0, t1)


def depth_policy(nx: int, *, min_cell_px: int = 4, max_depth: int = 6) -> int:
    """Deepest pentadic stage still resolved: cell width >= min_cell_px * h."""
    depth = 0
    while nx / 5.0 ** (depth + 1) >= min_cell_px and depth < max_depth:
        depth += 1
    return depth


def universal_depths(nx: int, dyadic_depth: int, *, min_cell_px: int = 4) -> list[int]:
    """Inner pentadic depth per dyadic stage, from the tile's own pixel size."""
    out = []
    for n in range(dyadic_depth):
        tile_px = nx * 2.0 ** (-math.ceil(n / 2.0))
        d = 0
        while tile_px / 5.0 ** (d + 1) >= min_cell_px and d < 4:
            d += 1
        out.append(d)
    return out
