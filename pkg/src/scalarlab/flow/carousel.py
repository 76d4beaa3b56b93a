"""The carousel mixing block: strip transpositions by isochronous rotors.

One stage of the building-block field refines the half-split pattern of a
cell into the half-split pattern of its 25 subcells.  The stage is the
riffle interleave of the cell's ten half-subcell-wide vertical strips
(black strips 0-4 end at even positions, white strips 5-9 at odd
positions), realized as four rounds of adjacent strip transpositions.

Each transposition is a smooth incompressible half-turn: on the 2-strip
rectangle take ``Q(xi, eta) = q(xi) q(eta)`` with ``q(s) = s (1 - s)`` and
drive the *isochronous* vortex whose stream function is the enclosed-area
function of ``Q``.  All closed orbits of that field share one period, and
``Q`` is symmetric under the point reflection about the rectangle center,
so advancing every orbit by half a period is exactly the 180-degree
rotation of the rectangle.  A solid strip pair is exactly swapped; only a
thin tapered ring at the rectangle boundary (where the profile is rolled
off to keep the field smooth and bounded) lags behind.

The same rounds acted out as pixel-block rotations give the exact
grid-permutation oracle in :mod:`scalarlab.flow.oracle`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scalarlab.domain import BOX_HEIGHT, BOX_WIDTH

#: number of strips per cell and the interleaved target order
NSTRIPS = 10
RIFFLE = (0, 5, 1, 6, 2, 7, 3, 8, 4, 9)

#: fraction of the Q-range sacrificed to the boundary roll-off
DEFAULT_RING = 0.01


def _q(s):
    return s * (1.0 - s)


def _qp(s):
    return 1.0 - 2.0 * s


def riffle_rounds() -> list[list[int]]:
    """Rounds of disjoint adjacent transpositions taking identity to RIFFLE.

    Each round is a list of left strip positions; the pair (p, p+1) is
    swapped.  Odd-even transposition scheduling gives four rounds with
    1 + 2 + 3 + 4 swaps.
    """
    final_pos = {strip: RIFFLE.index(strip) for strip in range(NSTRIPS)}
    arr = list(range(NSTRIPS))
    rounds: list[list[int]] = []
    parity = 0
    while [final_pos[s] for s in arr] != sorted(final_pos.values()):
        swaps = []
        for p in range(parity, NSTRIPS - 1, 2):
            if final_pos[arr[p]] > final_pos[arr[p + 1]]:
                arr[p], arr[p + 1] = arr[p + 1], arr[p]
                swaps.append(p)
        if swaps:
            rounds.append(swaps)
        parity ^= 1
        if len(rounds) > NSTRIPS:
            raise AssertionError("transposition schedule failed to converge")
    # applying the recorded rounds to the identity arrangement must riffle it
    check = list(range(NSTRIPS))
    for swaps in rounds:
        for p in swaps:
            check[p], check[p + 1] = check[p + 1], check[p]
    if tuple(check) != RIFFLE:
        raise AssertionError(f"round schedule produces {check}, not the riffle")
    return rounds


ROUNDS: list[list[int]] = riffle_rounds()
NPHASES = len(ROUNDS)

#: per phase, strip position -> left edge of its 2-strip rectangle, or -1
_ROUND_RECT = np.full((NPHASES, NSTRIPS), -1, dtype=np.int64)
for _r, _swaps in enumerate(ROUNDS):
    for _p in _swaps:
        _ROUND_RECT[_r, _p] = _p
        _ROUND_RECT[_r, _p + 1] = _p


# ---------------------------------------------------------------------------
# temporal bump: C-infinity, vanishing to all orders at phase endpoints
# ---------------------------------------------------------------------------

def _raw_bump(tau):
    out = np.zeros_like(tau, dtype=np.float64)
    inside = (tau > 0.0) & (tau < 1.0)
    ti = tau[inside]
    out[inside] = np.exp(-1.0 / (ti * (1.0 - ti)))
    return out


_BUMP_GRID = np.linspace(0.0, 1.0, 8193)
_BUMP_NORM = float(np.trapezoid(_raw_bump(_BUMP_GRID), _BUMP_GRID))


def bump(tau) -> np.ndarray:
    """Unit-mass C-infinity bump on [0, 1]."""
    tau = np.asarray(tau, dtype=np.float64)
    return _raw_bump(tau) / _BUMP_NORM


BUMP_MAX = float(bump(np.array(0.5)))

_BUMP_CDF = np.concatenate([[0.0], np.cumsum(
    0.5 * (bump(_BUMP_GRID)[1:] + bump(_BUMP_GRID)[:-1]) * np.diff(_BUMP_GRID))])
_BUMP_CDF /= _BUMP_CDF[-1]


def bump_cdf(tau) -> np.ndarray:
    """Cumulative mass of the unit bump; 0 at tau <= 0, 1 at tau >= 1."""
    return np.interp(np.asarray(tau, dtype=np.float64), _BUMP_GRID, _BUMP_CDF)


def smoothstep(v) -> np.ndarray:
    """C-infinity ramp: 0 for v <= 0, 1 for v >= 1, flat at both ends."""
    v = np.asarray(v, dtype=np.float64)
    a = np.zeros_like(v)
    pos = v > 0.0
    a[pos] = np.exp(-1.0 / v[pos])
    b = np.zeros_like(v)
    neg = v < 1.0
    b[neg] = np.exp(-1.0 / (1.0 - v[neg]))
    return a / (a + b)


# ---------------------------------------------------------------------------
# isochronous vortex tables on the unit square
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RotorTables:
    """Tabulated profile of the tapered isochronous vortex.

    ``gain(z)`` is ``d(enclosed area)/dz`` times the taper, where
    ``z = 16 Q in [0, 1]``; the unit-square velocity is
    ``(gain(z) dz/deta, -gain(z) dz/dxi)`` and all untapered orbits have
    period exactly one.
    """

    ring: float
    z_grid: np.ndarray
    gain: np.ndarray
    psi: np.ndarray
    u_xi_max: float
    u_eta_max: float

    def gain_at(self, z: np.ndarray) -> np.ndarray:
        return np.interp(z, self.z_grid, self.gain)


def _area_fraction(z: np.ndarray, nphi: int = 384) -> np.ndarray:
    """m(z) = area of {16 q(xi) q(eta) >= z} in the unit square."""
    z = np.atleast_1d(z)
    m = np.empty_like(z)
    phi = np.linspace(0.0, np.pi / 2.0, nphi)
    for k, zk in enumerate(z):
        if zk <= 0.0:
            m[k] = 1.0
            continue
        if zk >= 1.0:
            m[k] = 0.0
            continue
        s_min = 0.5 * (1.0 - np.sqrt(1.0 - zk))
        # s = 1/2 - (1/2 - s_min) cos(phi) absorbs the sqrt edge at s_min
        s = 0.5 - (0.5 - s_min) * np.cos(phi)
        width = 0.25 - zk / (16.0 * _q(s))
        integrand = 2.0 * np.sqrt(np.maximum(width, 0.0))
        integrand *= (0.5 - s_min) * np.sin(phi)
        m[k] = 2.0 * np.trapezoid(integrand, phi)
    return m


def _build_tables(ring: float) -> RotorTables:
    # dense in z near the taper onset; m' is mildly singular at z -> 0
    z_nodes = np.unique(np.concatenate([
        np.array([0.0]),
        np.geomspace(1e-6, 1.0, 2048),
    ]))
    m = _area_fraction(z_nodes)
    from scipy.interpolate import CubicSpline

    spline = CubicSpline(z_nodes, m)
    z_grid = np.linspace(0.0, 1.0, 32769)
    mprime = spline(z_grid, 1)
    taper = smoothstep(z_grid / ring)
    gain = mprime * taper
    psi = np.concatenate([[0.0], np.cumsum(
        0.5 * (gain[1:] + gain[:-1]) * np.diff(z_grid))])
    tables = RotorTables(ring, z_grid, gain, psi, 0.0, 0.0)

    # probe the unit-square speed extremes for substep sizing
    s = np.linspace(0.0, 1.0, 801)
    XI, ETA = np.meshgrid(s, s)
    z = 16.0 * _q(XI) * _q(ETA)
    g = tables.gain_at(z)
    u_xi = g * 16.0 * _q(XI) * _qp(ETA)
    u_eta = -g * 16.0 * _qp(XI) * _q(ETA)
    object.__setattr__(tables, "u_xi_max", float(np.abs(u_xi).max()))
    object.__setattr__(tables, "u_eta_max", float(np.abs(u_eta).max()))
    return tables


_TABLE_CACHE: dict[float, RotorTables] = {}


def rotor_tables(ring: float = DEFAULT_RING) -> RotorTables:
    key = round(float(ring), 12)
    if key not in _TABLE_CACHE:
        _TABLE_CACHE[key] = _build_tables(key)
    return _TABLE_CACHE[key]


# ---------------------------------------------------------------------------
# stage field on the physical box
# ---------------------------------------------------------------------------

def cell_dims(level: int) -> tuple[float, float]:
    scale = 5.0 ** (-level)
    return BOX_WIDTH * scale, BOX_HEIGHT * scale


def phase_steady(
    phase: int,
    X: np.ndarray,
    Y: np.ndarray,
    level: int,
    tables: RotorTables,
) -> tuple[np.ndarray, np.ndarray]:
    """Autonomous rotor field of one round (temporal bump stripped off).

    Every orbit has period one in the time variable of this field; the
    5^{-level} periodization carries the matching amplitude factor through
    the rectangle dimensions.
    """
    cw, ch = cell_dims(level)
    fx = np.asarray(X, dtype=np.float64) / cw
    fy = np.asarray(Y, dtype=np.float64) / ch
    lx = fx - np.floor(fx)
    ly = fy - np.floor(fy)

    strip = np.clip((lx * NSTRIPS).astype(np.int64), 0, NSTRIPS - 1)
    left = _ROUND_RECT[phase][strip]
    active = left >= 0

    ux = np.zeros_like(lx)
    uy = np.zeros_like(ly)
    if not np.any(active):
        return ux, uy

    xi = (lx[active] * NSTRIPS - left[active]) / 2.0
    eta = ly[active]
    qx = _q(xi)
    qy = _q(eta)
    g = tables.gain_at(16.0 * qx * qy)
    ux[active] = (cw / 5.0) * g * 16.0 * qx * _qp(eta)
    uy[active] = -ch * g * 16.0 * _qp(xi) * qy
    return ux, uy


def phase_weight(s: float) -> tuple[int, float]:
    """Phase index and bump weight at stage-local time ``s`` in [0, 1]."""
    phase = min(int(s * NPHASES), NPHASES - 1)
    return phase, 2.0 * float(bump(np.array(s * NPHASES - phase)))


def phase_weight_integral(phase: int, s0: float, s1: float) -> float:
    """Integral of the bump weight over stage-local times [s0, s1] in one phase."""
    a = np.clip(s0 * NPHASES - phase, 0.0, 1.0)
    b = np.clip(s1 * NPHASES - phase, 0.0, 1.0)
    return (2.0 / NPHASES) * float(bump_cdf(b) - bump_cdf(a))


def stage_velocity(
    s: float,
    X: np.ndarray,
    Y: np.ndarray,
    level: int,
    tables: RotorTables,
) -> tuple[np.ndarray, np.ndarray]:
    """Velocity of one mixing stage at stage-local time ``s`` in [0, 1]."""
    phase, w = phase_weight(s)
    if w == 0.0:
        z = np.zeros_like(np.asarray(X, dtype=np.float64))
        return z, z.copy()
    ux, uy = phase_steady(phase, X, Y, level, tables)
    return w * ux, w * uy


def stage_stream(
    s: float,
    X: np.ndarray,
    Y: np.ndarray,
    level: int,
    tables: RotorTables,
) -> np.ndarray:
    """Stream function of the stage field (zero outside active rectangles)."""
    phase, w = phase_weight(s)
    cw, ch = cell_dims(level)
    fx = np.asarray(X, dtype=np.float64) / cw
    fy = np.asarray(Y, dtype=np.float64) / ch
    lx = fx - np.floor(fx)
    ly = fy - np.floor(fy)
    strip = np.clip((lx * NSTRIPS).astype(np.int64), 0, NSTRIPS - 1)
    left = _ROUND_RECT[phase][strip]
    active = left >= 0
    psi = np.zeros_like(lx)
    if not np.any(active) or w == 0.0:
        return psi
    xi = (lx[active] * NSTRIPS - left[active]) / 2.0
    eta = ly[active]
    z = 16.0 * _q(xi) * _q(eta)
    psi[active] = w * (cw / 5.0) * ch * np.interp(z, tables.z_grid, tables.psi)
    return psi


def stage_speed_bound(level: int, tables: RotorTables) -> float:
    """Upper bound on |velocity| of a stage (stage-local time units)."""
    cw, ch = cell_dims(level)
    return 2.0 * BUMP_MAX * max((cw / 5.0) * tables.u_xi_max, ch * tables.u_eta_max)
