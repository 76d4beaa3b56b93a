"""Numerical regularity probes for velocity fields.

Discrete Hoelder seminorms over dyadically separated sample pairs, a
central-difference divergence probe, and the time-regularity quotient.
All probes are deterministic given their seed.
"""

from __future__ import annotations

import numpy as np

from scalarlab.domain import BOX_HEIGHT, BOX_WIDTH
from scalarlab.flow.fields import VelocityField


def _interior_points(rng, count, margin=0.02):
    x = rng.uniform(margin * BOX_WIDTH, (1 - margin) * BOX_WIDTH, count)
    y = rng.uniform(margin * BOX_HEIGHT, (1 - margin) * BOX_HEIGHT, count)
    return x, y


def estimate_holder_norm(
    field: VelocityField,
    t: float,
    exponent: float,
    *,
    scales: int = 12,
    pairs_per_scale: int = 800,
    feature_scale: float = 1.0,
    seed: int = 0,
) -> float:
    """sup|u| plus the max Hoelder quotient over dyadic pair separations.

    Pair separations run from feature_scale down through ``scales`` dyadic
    halvings; first endpoints are anchored where |u| is largest so that
    sharply localized fields are not undersampled.
    """
    if not 0.0 < exponent <= 1.0:
        raise ValueError("exponent must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    x, y = _interior_points(rng, 6000)
    ux, uy = field.eval(t, x, y)
    mag = np.hypot(ux, uy)
    sup = float(mag.max())
    top = np.argsort(mag)[-pairs_per_scale:]
    ax, ay = x[top], y[top]
    semi = 0.0
    for k in range(1, scales + 1):
        r = feature_scale * 2.0 ** -k
        # half the pairs anchored at strong-field points, half fresh
        x0, y0 = _interior_points(rng, pairs_per_scale)
        x0 = np.concatenate([x0, ax])
        y0 = np.concatenate([y0, ay])
        phi = rng.uniform(0.0, 2.0 * np.pi, x0.size)
        x1 = np.clip(x0 + r * np.cos(phi), 0.0, BOX_WIDTH)
        y1 = np.clip(y0 + r * np.sin(phi), 0.0, BOX_HEIGHT)
        dist = np.hypot(x1 - x0, y1 - y0)
        ok = dist > 1e-12
        u0 = field.eval(t, x0, y0)
        u1 = field.eval(t, x1, y1)
        diff = np.hypot(u1[0] - u0[0], u1[1] - u0[1])
        semi = max(semi, float((diff[ok] / dist[ok] ** exponent).max()))
    return sup + semi


def _div_central(field, t, x, y, h):
    uxp = field.eval(t, x + h, y)[0]
    uxm = field.eval(t, x - h, y)[0]
    uyp = field.eval(t, x, y + h)[1]
    uym = field.eval(t, x, y - h)[1]
    return (uxp - uxm + uyp - uym) / (2.0 * h)


def divergence_probe(
    field: VelocityField,
    *,
    times,
    samples: int = 2000,
    h: float = 1e-5,
    seed: int = 1,
) -> tuple[float, float]:
    """Central-difference divergence residuals at spacings h and h/2.

    The field is analytically divergence-free, so the residual is pure
    truncation error: it must shrink like h^2 when h halves (same sample
    points for both spacings).
    """
    rng = np.random.default_rng(seed)
    worst_h = 0.0
    worst_h2 = 0.0
    for t in times:
        x, y = _interior_points(rng, samples, margin=0.03)
        worst_h = max(worst_h, float(np.abs(_div_central(field, t, x, y, h)).max()))
        worst_h2 = max(worst_h2, float(np.abs(_div_central(field, t, x, y, 0.5 * h)).max()))
    return worst_h, worst_h2


def boundary_normal_residual(field: VelocityField, *, times, samples: int = 500) -> float:
    """Max |normal component| over sampled boundary points."""
    s = np.linspace(0.0, 1.0, samples)
    worst = 0.0
    for t in times:
        ux, _ = field.eval(t, np.zeros_like(s), s * BOX_HEIGHT)
        worst = max(worst, float(np.abs(ux).max()))
        ux, _ = field.eval(t, np.full_like(s, BOX_WIDTH), s * BOX_HEIGHT)
        worst = max(worst, float(np.abs(ux).max()))
        _, uy = field.eval(t, s * BOX_WIDTH, np.zeros_like(s))
        worst = max(worst, float(np.abs(uy).max()))
        _, uy = field.eval(t, s * BOX_WIDTH, np.full_like(s, BOX_HEIGHT))
        worst = max(worst, float(np.abs(uy).max()))
    return worst


def time_holder_quotient(
    field: VelocityField,
    exponent: float,
    *,
    pairs: int = 300,
    samples: int = 1500,
    seed: int = 2,
    t_lo: float = 0.0,
    t_hi: float = 0.5,
) -> float:
    """max over sampled time pairs of ||u(t)-u(s)||_sup / |t-s|^exponent."""
    rng = np.random.default_rng(seed)
    x, y = _interior_points(rng, samples)
    worst = 0.0
    for _ in range(pairs):
        t0, t1 = sorted(rng.uniform(t_lo, t_hi, 2))
        if t1 - t0 < 1e-9:
            continue
        u0 = field.eval(t0, x, y)
        u1 = field.eval(t1, x, y)
        diff = float(np.hypot(u1[0] - u0[0], u1[1] - u0[1]).max())
        worst = max(worst, diff / (t1 - t0) ** exponent)
    return worst
