import math

import numpy as np
import pytest

from scalarlab.domain import BOX_HEIGHT, BOX_WIDTH, ScalarField, constant_field, field_from_function
from scalarlab.errors import NumericalBlowupError
from scalarlab.flow.fields import ConstantField, TwoCellField
from scalarlab import geometry as geo
from scalarlab.solver import (
    BoundaryData,
    RunRecord,
    SolverConfig,
    advance,
    energy_dissipation_series,
    heat_convolve,
    norms,
)
from scalarlab.solver.core import grad_energy, l2_sq


def sin_mode(nx=256, ny=182, mode="torus"):
    return field_from_function(lambda X, Y: np.sin(2 * np.pi * Y), nx, ny, mode=mode)


def test_constant_invariant_under_diffusion():
    cfg = SolverConfig(kappa=0.37, nx=128, ny=90)
    theta = constant_field(2.5, 128, 90)
    out = advance(theta, None, cfg, 0.0, 1.0)
    assert np.abs(out.data - 2.5).max() < 1e-12


def test_pure_diffusion_mode_decay():
    cfg = SolverConfig(kappa=0.01, nx=256, ny=182)
    out = advance(sin_mode(), None, cfg, 0.0, 1.0)
    expected = math.exp(-4 * math.pi ** 2 * 0.01)
    ratio = out.data / sin_mode().data
    mask = np.abs(sin_mode().data) > 0.2
    assert np.allclose(ratio[mask], expected, rtol=1e-3)


def test_heat_convolve_examples():
    theta = sin_mode()
    assert np.allclose(heat_convolve(theta, 0.0).data, theta.data)
    d = 0.013
    out = heat_convolve(theta, d)
    assert np.allclose(out.data, math.exp(-4 * math.pi ** 2 * d) * theta.data, atol=1e-12)
    # all nonzero modes die for long durations
    rng = np.random.default_rng(0)
    noisy = ScalarField(rng.normal(size=(182, 256)), mode="torus")
    noisy.data -= noisy.data.mean()
    assert norms(heat_convolve(noisy, 10.0), "l1") < 1e-8
    with pytest.raises(ValueError):
        heat_convolve(ScalarField(noisy.data, mode="box"), 0.1)


def test_heat_convolve_commutes_with_advance():
    theta = sin_mode()
    cfg = SolverConfig(kappa=0.02, nx=256, ny=182)
    a = advance(theta, None, cfg, 0.0, 0.5)
    b = heat_convolve(theta, 0.02 * 0.5)
    assert np.abs(a.data - b.data).max() < 1e-10


def test_box_diffusion_eigenmode():
    # Dirichlet eigenmode sin(pi x / W) sin(pi y) decays at rate pi^2(1/2+1)
    nx, ny = 192, 136
    theta = field_from_function(
        lambda X, Y: np.sin(np.pi * X / BOX_WIDTH) * np.sin(np.pi * Y), nx, ny, mode="box")
    kappa = 0.02
    cfg = SolverConfig(kappa=kappa, nx=nx, ny=ny)
    bc = BoundaryData.zero(nx, ny)
    out = advance(theta, None, cfg, 0.0, 1.0, boundary=bc)
    lam = np.pi ** 2 * (1.0 / BOX_WIDTH ** 2 + 1.0 / BOX_HEIGHT ** 2)
    expected = math.exp(-kappa * lam)
    mask = theta.data > 0.3
    ratio = out.data[mask] / theta.data[mask]
    assert np.abs(ratio - expected).max() < 5e-3


def test_translation_oracle_and_grid_convergence():
    # unit horizontal drift for time 1 translates by 1 (mod sqrt 2)
    errors = {}
    for nx, ny in ((128, 90), (256, 180)):
        theta = field_from_function(
            lambda X, Y: np.sin(2 * np.pi * X / BOX_WIDTH) * np.cos(2 * np.pi * Y)
            + 0.3 * np.sin(4 * np.pi * X / BOX_WIDTH), nx, ny)
        cfg = SolverConfig(kappa=0.0, nx=nx, ny=ny, resample_per_segment=4)
        out = advance(theta, ConstantField(1.0, 0.0), cfg, 0.0, 1.0)
        exact = field_from_function(
            lambda X, Y: np.sin(2 * np.pi * (X - 1.0) / BOX_WIDTH) * np.cos(2 * np.pi * Y)
            + 0.3 * np.sin(4 * np.pi * (X - 1.0) / BOX_WIDTH), nx, ny)
        errors[nx] = norms(ScalarField(out.data - exact.data), "l1")
    assert errors[256] < errors[128] / 3.0
    assert errors[128] < 5e-3


def test_torus_mean_conservation():
    rng = np.random.default_rng(1)
    theta = ScalarField(rng.normal(size=(182, 256)), mode="torus")
    v = TwoCellField(alpha=0.5, depth=2)
    cfg = SolverConfig(kappa=1e-3, nx=256, ny=182)
    rec = RunRecord()
    out = advance(theta, v, cfg, 0.0, 0.5, record=rec)
    assert abs(out.mean() - theta.mean()) < 1e-12


def test_max_principle_smooth_data():
    theta = field_from_function(
        lambda X, Y: np.sin(2 * np.pi * X / BOX_WIDTH) * np.sin(4 * np.pi * Y), 256, 182)
    v = TwoCellField(alpha=0.5, depth=2)
    cfg = SolverConfig(kappa=1e-4, nx=256, ny=182)
    out = advance(theta, v, cfg, 0.0, 0.5)
    osc = theta.data.max() - theta.data.min()
    assert out.data.max() <= theta.data.max() + 1e-3 * osc
    assert out.data.min() >= theta.data.min() - 1e-3 * osc


def test_l1_contraction_random_pairs():
    rng = np.random.default_rng(2)
    v = TwoCellField(alpha=0.5, depth=2)
    cfg = SolverConfig(kappa=1e-3, nx=128, ny=90)
    worst = 0.0
    for _ in range(10):
        a = ScalarField(rng.normal(size=(90, 128)), mode="torus")
        b = ScalarField(rng.normal(size=(90, 128)), mode="torus")
        in_dist = norms(ScalarField(a.data - b.data), "l1")
        oa = advance(a, v, cfg, 0.0, 0.35)
        ob = advance(b, v, cfg, 0.0, 0.35)
        out_dist = norms(ScalarField(oa.data - ob.data), "l1")
        worst = max(worst, out_dist / in_dist)
    assert worst <= 1.0 + 1e-3


def test_norm_examples():
    theta = geo.two_cell_data(256, 182, mode="torus")
    assert norms(theta, "l1") == pytest.approx(math.sqrt(2) / 2, rel=1e-12)
    assert norms(theta, "l2") == pytest.approx(math.sqrt(math.sqrt(2) / 2), rel=1e-12)
    assert norms(constant_field(1.0, 64, 45), "linf") == 1.0
    mode = sin_mode()
    ratio = norms(mode, "hs", sigma=0.5) / norms(mode, "l2")
    assert ratio == pytest.approx((1 + 4 * np.pi ** 2) ** 0.25, rel=1e-6)
    ratio_m = norms(mode, "h-s", sigma=0.5) / norms(mode, "l2")
    assert ratio_m == pytest.approx((1 + 4 * np.pi ** 2) ** -0.25, rel=1e-6)
    with pytest.raises(ValueError):
        norms(mode, "hs", sigma=1.5)
    with pytest.raises(ValueError):
        norms(geo.two_cell_data(256, 182, mode="box"), "hs", sigma=0.5)


def test_energy_series_pure_diffusion():
    kappa = 0.05
    cfg = SolverConfig(kappa=kappa, nx=256, ny=182)
    rec = RunRecord()
    times = np.linspace(0.0, 1.0, 41)
    out = advance(sin_mode(), None, cfg, 0.0, 1.0, record_times=times, record=rec)
    ts, series, total = energy_dissipation_series(rec, kappa)
    # series value: kappa (2 pi)^2 (sqrt2/2) e^{-8 pi^2 kappa t}
    for tk, sk in zip(ts, series):
        expected = kappa * (2 * np.pi) ** 2 * (math.sqrt(2) / 2) * math.exp(
            -8 * np.pi ** 2 * kappa * tk)
        assert sk == pytest.approx(expected, rel=1e-6)
    drop = 0.5 * (l2_sq(sin_mode()) - l2_sq(out))
    assert total == pytest.approx(drop, rel=0.02)
    # the per-substep accumulator is exact
    assert rec.dissipated() == pytest.approx(drop, rel=1e-10)


def test_energy_series_constant_zero():
    cfg = SolverConfig(kappa=0.1, nx=128, ny=90)
    rec = RunRecord()
    advance(constant_field(1.0, 128, 90), None, cfg, 0.0, 1.0,
            record_times=[0.0, 0.5, 1.0], record=rec)
    _, series, total = energy_dissipation_series(rec, 0.1)
    assert np.abs(series).max() < 1e-20
    assert total == 0.0


def test_blowup_detection():
    theta = sin_mode(128, 90)
    theta.data[0, 0] = np.inf
    cfg = SolverConfig(kappa=0.01, nx=128, ny=90)
    with pytest.raises(ValueError):
        advance(theta, None, cfg, 0.0, 1.0)


def test_mode_mismatch_rejected():
    theta = sin_mode(128, 90, mode="box")
    cfg = SolverConfig(kappa=0.01, nx=128, ny=90)
    with pytest.raises(ValueError):
        advance(theta, None, cfg, 0.0, 1.0)  # box without boundary data
    with pytest.raises(ValueError):
        advance(sin_mode(128, 90), None, cfg, 0.0, 1.0,
                boundary=BoundaryData.zero(128, 90))


def test_duality_smooth_data():
    # <T^{V,kappa} a, b> = <a, T^{rev V,kappa} b> within 1e-3 relative
    from scalarlab.flow.fields import ReversedField, UniversalField

    V = UniversalField(alpha=0.5, dyadic_depth=3, inner_depth=[1, 1, 1])
    cfg = SolverConfig(kappa=1e-2, nx=128, ny=90, interp="quintic", limiter=False)
    a = field_from_function(lambda X, Y: np.sin(2 * np.pi * X / BOX_WIDTH), 128, 90)
    b = field_from_function(lambda X, Y: np.cos(2 * np.pi * Y) + 0.4 * np.sin(4 * np.pi * Y),
                            128, 90)
    Ta = advance(a, V, cfg, 0.0, 1.0)
    Tb = advance(b, ReversedField(V), cfg, 0.0, 1.0)
    lhs = float((Ta.data * b.data).sum()) * Ta.cell_area
    rhs = float((a.data * Tb.data).sum()) * a.cell_area
    scale = norms(a, "l2") * norms(b, "l2")
    assert abs(lhs - rhs) / scale < 1e-3
