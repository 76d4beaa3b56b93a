"""Strang-split semi-Lagrangian / spectral advection-diffusion stepping.

One resample step over [a, b] is D(dt/2) A(dt) D(dt/2):

* advection -- backward departure points through the velocity field
  (midpoint rule; within one smooth pulse the integration runs in the
  pulse's effective time, so sharply peaked temporal bumps cost nothing),
  then spline interpolation at the departure points (boundary-trace lookup
  where a backward trajectory exits the box);
* diffusion -- exact spectral multiplier on the torus, Peaceman-Rachford
  ADI Crank-Nicolson with the Dirichlet lift on the box.

The torus advection step enforces exact mean conservation (the continuous
operator conserves the mean; interpolation is re-centered by a constant).
Diffusion substeps record their exact energy drop, which is the
time-integrated dissipation of the discrete solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_banded

from scalarlab.domain import BOX_HEIGHT, BOX_WIDTH, ScalarField
from scalarlab.errors import NumericalBlowupError
from scalarlab.flow.fields import Segment, VelocityField, ZeroField
from scalarlab.solver import interp
from scalarlab.solver.boundary import (
    EDGE_BOTTOM,
    EDGE_LEFT,
    EDGE_RIGHT,
    EDGE_TOP,
    BoundaryData,
)


@dataclass
class SolverConfig:
    """Grid, diffusivity and scheme knobs for one run."""

    kappa: float
    nx: int = 512
    ny: int = 362
    courant: float = 0.5          # sizes fallback departure substeps
    interp: str = "cubic"         # departure-point interpolation order
    limiter: bool = True          # quasi-monotone clip (discrete max principle)
    resample_per_segment: int = 1
    min_substeps: int = 2
    max_substeps: int = 512
    cn_cap: float = 8.0           # box diffusion: kappa dt / h^2 per CN substep

    def __post_init__(self):
        if self.kappa < 0.0:
            raise ValueError("kappa must be nonnegative")
        if abs(self.nx / self.ny / math.sqrt(2.0) - 1.0) > 0.02:
            raise ValueError(f"grid {self.nx}x{self.ny} too far from sqrt(2) aspect")
        interp.spline_order(self.interp)
        if self.resample_per_segment < 1:
            raise ValueError("resample_per_segment must be >= 1")


@dataclass
class RunRecord:
    """Time series captured during advance()."""

    times: list = dc_field(default_factory=list)
    l1: list = dc_field(default_factory=list)
    l2_sq: list = dc_field(default_factory=list)
    snapshots: dict = dc_field(default_factory=dict)
    #: (t0, t1, exact energy drop) per diffusion substep
    dissipation_steps: list = dc_field(default_factory=list)

    def observe(self, t: float, theta: ScalarField, keep: bool):
        self.times.append(t)
        self.l1.append(norms(theta, "l1"))
        self.l2_sq.append(l2_sq(theta))
        if keep:
            self.snapshots[round(t, 12)] = theta.copy(time=t)

    def dissipated(self, a: float = -math.inf, b: float = math.inf) -> float:
        """Integrated kappa ||grad theta||^2 over diffusion substeps in [a, b]."""
        return sum(d for (t0, t1, d) in self.dissipation_steps
                   if t0 >= a - 1e-12 and t1 <= b + 1e-12)


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _ksq(nx: int, ny: int) -> np.ndarray:
    kx = 2.0 * np.pi * np.fft.rfftfreq(nx, d=BOX_WIDTH / nx)
    ky = 2.0 * np.pi * np.fft.fftfreq(ny, d=BOX_HEIGHT / ny)
    return (ky ** 2)[:, None] + (kx ** 2)[None, :]


@lru_cache(maxsize=16)
def _rfft_weights(nx: int, ny: int) -> np.ndarray:
    w = np.full(nx // 2 + 1, 2.0)
    w[0] = 1.0
    if nx % 2 == 0:
        w[-1] = 1.0
    return w


def _spectral_sum(theta_hat: np.ndarray, nx: int, ny: int, mult=None) -> float:
    w = _rfft_weights(nx, ny)
    val = np.abs(theta_hat) ** 2
    if mult is not None:
        val = val * mult
    cell = (BOX_WIDTH / nx) * (BOX_HEIGHT / ny)
    return float((val * w[None, :]).sum()) * cell / (nx * ny)


def l2_sq(theta: ScalarField) -> float:
    return float((theta.data ** 2).sum()) * theta.cell_area


def grad_energy(theta: ScalarField) -> float:
    """||grad theta||_{L2}^2 by the spectral gradient (torus)."""
    th = np.fft.rfft2(theta.data)
    return _spectral_sum(th, theta.nx, theta.ny, mult=_ksq(theta.nx, theta.ny))


def heat_convolve(theta: ScalarField, duration: float) -> ScalarField:
    """Exact heat-kernel convolution at unit diffusivity (torus only)."""
    if theta.mode != "torus":
        raise ValueError("heat_convolve requires torus mode; use advance on the box")
    if duration < 0.0:
        raise ValueError("duration must be nonnegative")
    if duration == 0.0:
        return theta.copy()
    th = np.fft.rfft2(theta.data)
    th *= np.exp(-duration * _ksq(theta.nx, theta.ny))
    return theta.copy(data=np.fft.irfft2(th, s=theta.data.shape))


def norms(theta: ScalarField, kind: str, sigma: float | None = None) -> float:
    """Quadrature / spectral norms: l1, l2, linf, hs (H^sigma), h-s (H^-sigma)."""
    kind = kind.lower()
    if kind == "l1":
        return float(np.abs(theta.data).sum()) * theta.cell_area
    if kind == "l2":
        return math.sqrt(l2_sq(theta))
    if kind == "linf":
        return float(np.abs(theta.data).max())
    if kind in ("hs", "h-s"):
        if theta.mode != "torus":
            raise ValueError("Sobolev norms are spectral and need torus mode")
        if sigma is None or not 0.0 <= sigma <= 1.0:
            raise ValueError("sigma must lie in [0, 1]")
        s = sigma if kind == "hs" else -sigma
        th = np.fft.rfft2(theta.data)
        mult = (1.0 + _ksq(theta.nx, theta.ny)) ** s
        return math.sqrt(_spectral_sum(th, theta.nx, theta.ny, mult=mult))
    raise ValueError(f"unknown norm kind {kind!r}")


# ---------------------------------------------------------------------------
# diffusion substeps
# ---------------------------------------------------------------------------

def _diffuse_torus(theta: ScalarField, kappa: float, dt: float,
                   record: RunRecord | None, t0: float) -> ScalarField:
    if kappa * dt == 0.0:
        return theta
    before = l2_sq(theta)
    out = heat_convolve(theta, kappa * dt)
    if record is not None:
        record.dissipation_steps.append((t0, t0 + dt, 0.5 * (before - l2_sq(out))))
    return out


def _tridiag(n: int, r: float) -> np.ndarray:
    ab = np.zeros((3, n))
    ab[0, 1:] = -r
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :-1] = -r
    # Dirichlet ghost g = 2 f - u_0 folds into the diagonal
    ab[1, 0] += r
    ab[1, -1] += r
    return ab


def _explicit_1d(u: np.ndarray, r: float, f_lo: np.ndarray, f_hi: np.ndarray,
                 axis: int) -> np.ndarray:
    """(I + r d^2) u with Dirichlet ghosts along one axis."""
    u = np.moveaxis(u, axis, 0)
    out = np.empty_like(u)
    ghost_lo = 2.0 * f_lo - u[0]
    ghost_hi = 2.0 * f_hi - u[-1]
    out[1:-1] = u[1:-1] + r * (u[2:] - 2.0 * u[1:-1] + u[:-2])
    out[0] = u[0] + r * (u[1] - 2.0 * u[0] + ghost_lo)
    out[-1] = u[-1] + r * (ghost_hi - 2.0 * u[-1] + u[-2])
    return np.moveaxis(out, 0, axis)


def _diffuse_box(theta: ScalarField, kappa: float, dt: float, bc: BoundaryData,
                 t0: float, cfg: SolverConfig) -> ScalarField:
    """Peaceman-Rachford ADI Crank-Nicolson with Dirichlet lift."""
    if kappa * dt == 0.0:
        return theta
    nx, ny = theta.nx, theta.ny
    hx, hy = theta.hx, theta.hy
    nsub = max(1, int(math.ceil(kappa * dt / (cfg.cn_cap * min(hx, hy) ** 2))))
    dts = dt / nsub
    rx = kappa * dts / (2.0 * hx * hx)
    ry = kappa * dts / (2.0 * hy * hy)
    ab_x = _tridiag(nx, rx)
    ab_y = _tridiag(ny, ry)
    data = theta.data.copy()
    for k in range(nsub):
        tm = t0 + (k + 0.5) * dts
        left, right, bottom, top = bc.at(tm)
        # implicit x, explicit y
        rhs = _explicit_1d(data, ry, bottom, top, axis=0)
        rhs[:, 0] += 2.0 * rx * left
        rhs[:, -1] += 2.0 * rx * right
        data = solve_banded((1, 1), ab_x, rhs.T).T
        # implicit y, explicit x
        rhs = _explicit_1d(data, rx, left, right, axis=1)
        rhs[0, :] += 2.0 * ry * bottom
        rhs[-1, :] += 2.0 * ry * top
        data = solve_banded((1, 1), ab_y, rhs)
    return theta.copy(data=data, time=t0 + dt)


# ---------------------------------------------------------------------------
# advection substep
# ---------------------------------------------------------------------------

def _first_exit(x0, y0, x1, y1):
    """First crossing fraction of segments leaving the box, with edge ids."""
    big = np.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        aL = np.where(x1 < 0.0, x0 / (x0 - x1), big)
        aR = np.where(x1 > BOX_WIDTH, (BOX_WIDTH - x0) / (x1 - x0), big)
        aB = np.where(y1 < 0.0, y0 / (y0 - y1), big)
        aT = np.where(y1 > BOX_HEIGHT, (BOX_HEIGHT - y0) / (y1 - y0), big)
    alphas = np.stack([aL, aR, aB, aT])
    edge = np.argmin(alphas, axis=0)
    alpha = np.take_along_axis(alphas, edge[None], axis=0)[0]
    return alpha, edge


_EDGE_IDS = np.array([EDGE_LEFT, EDGE_RIGHT, EDGE_BOTTOM, EDGE_TOP])


class _DepartureState:
    """Backward characteristics of all grid points over one resample step."""

    def __init__(self, X, Y, box_mode: bool):
        self.px = X.ravel().copy()
        self.py = Y.ravel().copy()
        self.box_mode = box_mode
        n = self.px.size
        self.alive = np.ones(n, dtype=bool)
        self.exit_time = np.zeros(n)
        self.exit_x = np.zeros(n)
        self.exit_y = np.zeros(n)
        self.exit_edge = np.zeros(n, dtype=np.int64)

    def step(self, uv, ds: float, t_equiv: float):
        """One backward midpoint substep; uv evaluates the field at points."""
        all_alive = bool(self.alive.all())
        idx = None if all_alive else np.flatnonzero(self.alive)
        if idx is not None and idx.size == 0:
            return
        px = self.px if all_alive else self.px[idx]
        py = self.py if all_alive else self.py[idx]
        k1x, k1y = uv(px, py)
        k2x, k2y = uv(px - 0.5 * ds * k1x, py - 0.5 * ds * k1y)
        qx, qy = px - ds * k2x, py - ds * k2y
        if self.box_mode:
            out = (qx < 0.0) | (qx > BOX_WIDTH) | (qy < 0.0) | (qy > BOX_HEIGHT)
            if np.any(out):
                ids_out = np.flatnonzero(out) if all_alive else idx[out]
                alpha, edge = _first_exit(px[out], py[out], qx[out], qy[out])
                self.exit_time[ids_out] = t_equiv
                self.exit_x[ids_out] = np.clip(px[out] + alpha * (qx[out] - px[out]),
                                               0.0, BOX_WIDTH)
                self.exit_y[ids_out] = np.clip(py[out] + alpha * (qy[out] - py[out]),
                                               0.0, BOX_HEIGHT)
                self.exit_edge[ids_out] = _EDGE_IDS[edge]
                self.alive[ids_out] = False
                keep = ~out
                ids_keep = np.flatnonzero(keep) if all_alive else idx[keep]
                self.px[ids_keep] = qx[keep]
                self.py[ids_keep] = qy[keep]
                return
        if all_alive:
            self.px, self.py = qx, qy
        else:
            self.px[idx] = qx
            self.py[idx] = qy


def _advect(theta: ScalarField, seg: Segment, a: float, b: float,
            cfg: SolverConfig, bc: BoundaryData | None,
            field: VelocityField) -> ScalarField:
    """Semi-Lagrangian transport of theta from time a to time b within seg."""
    X, Y = theta.meshgrid()
    box_mode = theta.mode == "box"
    state = _DepartureState(X, Y, box_mode)

    if seg.steady is not None and seg.weight_integral is not None:
        ds_total = seg.weight_integral(a, b)
        if ds_total > 0.0:
            n = int(math.ceil(ds_total * max(seg.substeps_per_effective, 1e-12)))
            n = min(max(n, cfg.min_substeps), cfg.max_substeps)
            ds = ds_total / n
            for k in range(n):
                t_equiv = a + (1.0 - (k + 1) / n) * (b - a)
                state.step(seg.steady, ds, t_equiv)
    else:
        speed = max(seg.max_speed, 1e-12)
        h = min(theta.hx, theta.hy)
        n = int(math.ceil((b - a) * speed / (cfg.courant * h)))
        n = min(max(n, cfg.min_substeps), cfg.max_substeps)
        dt = (b - a) / n
        for k in range(n):
            t_mid = b - (k + 0.5) * dt
            state.step(lambda px, py: field.eval(t_mid, px, py), dt, b - (k + 1) * dt)

    values = np.empty(state.px.shape)
    if box_mode:
        if bc is None:
            raise ValueError("box mode requires boundary data")
        traces = bc.at(a)
        inside = state.alive
        if np.any(inside):
            values[inside] = interp.sample_box(
                theta.data, state.px[inside], state.py[inside], traces,
                cfg.interp, cfg.limiter)
        exited = ~inside
        if np.any(exited):
            values[exited] = bc.eval_exits(
                state.exit_time[exited], state.exit_x[exited],
                state.exit_y[exited], state.exit_edge[exited])
    else:
        values = interp.sample_torus(theta.data, state.px, state.py,
                                     cfg.interp, cfg.limiter)
        values += theta.data.mean() - values.mean()  # exact mean conservation

    return theta.copy(data=values.reshape(theta.data.shape), time=b)


# ---------------------------------------------------------------------------
# the solution operator
# ---------------------------------------------------------------------------

def _event_times(segs: list[Segment], t0: float, t1: float,
                 record_times, per_segment: int) -> list[tuple[float, float, Segment]]:
    """Resample steps [(a, b, segment)] covering [t0, t1]."""
    marks = set()
    for t in (record_times if record_times is not None else ()):
        if t0 < t < t1:
            marks.add(float(t))
    steps = []
    for seg in segs:
        n = per_segment if seg.active else 1
        inner = [seg.t0 + (seg.t1 - seg.t0) * k / n for k in range(n + 1)]
        inner += [m for m in marks if seg.t0 < m < seg.t1]
        inner = sorted(set(inner))
        for a, b in zip(inner[:-1], inner[1:]):
            if b - a > 1e-14:
                steps.append((a, b, seg))
    return steps


def advance(
    theta: ScalarField,
    field: VelocityField | None,
    cfg: SolverConfig,
    t0: float,
    t1: float,
    boundary: BoundaryData | None = None,
    record_times=None,
    record: RunRecord | None = None,
) -> ScalarField:
    """Apply the drift-diffusion solution operator over [t0, t1].

    ``field=None`` means pure diffusion.  Torus runs ignore ``boundary``;
    box runs require it.  If ``record`` is given, norms are logged at every
    step boundary and full snapshots at ``record_times``.
    """
    if t1 < t0:
        raise ValueError("need t0 <= t1")
    if theta.mode == "box" and boundary is None:
        raise ValueError("box mode requires boundary data (or use torus mode)")
    if theta.mode == "torus" and boundary is not None:
        raise ValueError("torus mode takes no boundary data")
    theta.check_finite()
    fld = field if field is not None else ZeroField()
    segs = fld.segments(t0, t1)
    if not segs:
        segs = [Segment(t0, t1, False, 0.0, "idle")]
    record_set = {round(float(t), 12) for t in (record_times if record_times is not None else ())}
    cur = theta.copy(time=t0)
    if record is not None:
        record.observe(t0, cur, round(t0, 12) in record_set)

    step_index = 0
    for a, b, seg in _event_times(segs, t0, t1, record_times, cfg.resample_per_segment):
        dt = b - a
        try:
            if seg.active:
                cur = _diffuse_half(cur, cfg, a, 0.5 * dt, boundary, record)
                cur = _advect(cur, seg, a, b, cfg, boundary, fld)
                cur = _diffuse_half(cur, cfg, a + 0.5 * dt, 0.5 * dt, boundary, record)
            else:
                cur = _diffuse_half(cur, cfg, a, dt, boundary, record)
                cur = cur.copy(time=b)
        except FloatingPointError as exc:  # pragma: no cover - defensive
            raise NumericalBlowupError(str(exc), time=b, step=step_index) from exc
        if not np.isfinite(cur.data).all():
            raise NumericalBlowupError(
                f"non-finite samples after step {step_index} ending at t={b:.6g} "
                f"(segment {seg.label!r})", time=b, step=step_index)
        cur.time = b
        if record is not None:
            record.observe(b, cur, round(b, 12) in record_set)
        step_index += 1
    return cur


def _diffuse_half(theta: ScalarField, cfg: SolverConfig, t0: float, dt: float,
                  bc: BoundaryData | None, record: RunRecord | None) -> ScalarField:
    if dt <= 0.0 or cfg.kappa == 0.0:
        return theta
    if theta.mode == "torus":
        return _diffuse_torus(theta, cfg.kappa, dt, record, t0)
    return _diffuse_box(theta, cfg.kappa, dt, bc, t0, cfg)


def energy_dissipation_series(record: RunRecord, kappa: float):
    """Series kappa ||grad theta(t)||^2 from snapshots plus trapezoid total.

    Torus runs only (the spectral gradient assumes periodicity).
    """
    if not record.snapshots:
        raise ValueError("run record holds no snapshots")
    times = sorted(record.snapshots)
    series = np.array([kappa * grad_energy(record.snapshots[t]) for t in times])
    total = float(np.trapezoid(series, np.array(times)))
    return np.array(times), series, total
