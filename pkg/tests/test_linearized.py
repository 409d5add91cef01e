import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import nlsnorm.linearized as lin
from nlsnorm.linearized import (LinearizedProblem, ResonanceError, SweepFailure,
                                closed_form_z, compute_alpha, linear_residual,
                                moment_source, shoot_affine, solve_linearized_affine,
                                solve_z0, sweep_alpha, write_sweep)
from nlsnorm.radial import radial_quadrature, surface_area

import fixtures as fx
from oracles import alpha_bvp


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_dilation_mode(gs_2_3):
    src = gs_2_3.profile.with_values(-2 * gs_2_3.U, -2 * gs_2_3.dU)
    S = solve_linearized_affine(LinearizedProblem(gs_2_3, 3.0, src))
    expected = gs_2_3.U + gs_2_3.r * gs_2_3.dU
    n = np.flatnonzero(S.values)[-1]
    assert np.max(np.abs(S.values[:n] - expected[:n])) <= 1e-5


def test_zero_source_gives_zero(gs_2_3):
    src = gs_2_3.profile.with_values(np.zeros_like(gs_2_3.U), np.zeros_like(gs_2_3.U))
    S = solve_linearized_affine(LinearizedProblem(gs_2_3, 3.0, src))
    assert not np.any(S.values)


def test_alpha_planar_against_collocation(gs_2_3):
    a = compute_alpha(2, 3.0, ground=gs_2_3)
    assert a.alpha_radial == pytest.approx(fx.ORACLE_ALPHA_RADIAL_N2, rel=1e-8)
    _, _, a_bvp = alpha_bvp(2, 3.0)
    assert a.alpha_radial == pytest.approx(a_bvp, rel=1e-8)
    assert a.alpha_full / a.alpha_radial == surface_area(2)


def test_alpha_planar_figure_point(gs_2_3):
    a = compute_alpha(2, 3.0, ground=gs_2_3)
    assert _rel(a.alpha_radial, fx.FIGURE_ALPHA[(2, 3.0)]) <= fx.FIGURE_ALPHA_TOL


@pytest.mark.parametrize("N, p", [(1, 5.0), (3, 7.0 / 3.0)])
def test_alpha_against_collocation(N, p):
    a = compute_alpha(N, p).alpha_radial
    _, _, ref = alpha_bvp(N, p, u0_guess=1.3 if N == 1 else 3.0)
    assert a == pytest.approx(ref, rel=1e-6)


def test_affine_consistency(gs_2_3):
    prob = LinearizedProblem(gs_2_3, 3.0, moment_source(gs_2_3))
    y0, y1, y2 = (shoot_affine(prob, s) for s in (0.0, 1.0, 2.0))
    assert y2 == pytest.approx(2 * y1 - y0, rel=1e-10)


@settings(max_examples=8, deadline=None)
@given(a=st.floats(-3, 3), b=st.floats(-3, 3), power=st.sampled_from([0, 2, 4]))
def test_superposition(gs_2_3, a, b, power):
    g1 = moment_source(gs_2_3, 2, a)
    g2 = moment_source(gs_2_3, power, b)
    g12 = gs_2_3.profile.with_values(g1.values + g2.values, g1.derivative + g2.derivative)
    r0 = gs_2_3.decay_radius(1e-10)
    s1, s2, s12 = (solve_linearized_affine(LinearizedProblem(gs_2_3, 3.0, g, r0)).values
                   for g in (g1, g2, g12))
    # past this radius the growing mode amplifies round-off of S(0) by e^r
    n = int(gs_2_3.decay_radius(1e-6) / gs_2_3.grid.h)
    scale = max(np.max(np.abs(s12)), 1e-300)
    assert np.max(np.abs(s12[:n] - s1[:n] - s2[:n])) <= 1e-8 * scale


def test_r0_robustness(gs_2_3):
    r0 = gs_2_3.decay_radius(1e-10)
    a = compute_alpha(2, 3.0, ground=gs_2_3, r0=r0).alpha_radial
    b = compute_alpha(2, 3.0, ground=gs_2_3, r0=min(1.2 * r0, gs_2_3.grid.r_max)).alpha_radial
    assert _rel(b, a) <= 1e-6


def test_step_refinement_alpha():
    vals = [compute_alpha(2, 3.0, h=h).alpha_radial for h in (4e-3, 2e-3, 1e-3)]
    ratio = (vals[0] - vals[1]) / (vals[1] - vals[2])
    assert 8 <= ratio <= 32


def test_r0_beyond_grid(gs_2_3):
    with pytest.raises(ValueError):
        LinearizedProblem(gs_2_3, 3.0, moment_source(gs_2_3), r0=1e3)


def test_resonance_reported(gs_2_3, monkeypatch):
    monkeypatch.setattr(lin, "RESONANCE_TOL", 1e20)
    with pytest.raises(ResonanceError, match="perturb r0"):
        solve_z0(gs_2_3)


def test_closed_form_z(gs_2_3):
    z0 = closed_form_z(gs_2_3, 0.0)
    assert not np.any(z0.values)
    z = closed_form_z(gs_2_3, 1.0)
    src = gs_2_3.profile.with_values(gs_2_3.U, gs_2_3.dU)
    assert linear_residual(gs_2_3, 3.0, z, src) <= 1e-4
    orth = radial_quadrature(gs_2_3.profile.with_values(gs_2_3.U * z.values))
    assert abs(orth) <= 1e-6 * gs_2_3.gamma / (2 * math.pi)


def test_kernel_orthogonality(gs_2_3):
    v = gs_2_3.U + gs_2_3.r * gs_2_3.dU
    val = radial_quadrature(gs_2_3.profile.with_values(v * gs_2_3.U))
    assert abs(val) <= 1e-6 * gs_2_3.gamma / (2 * math.pi)


def test_closed_form_matches_solve(gs_2_3):
    src = gs_2_3.profile.with_values(gs_2_3.U, gs_2_3.dU)
    S = solve_linearized_affine(LinearizedProblem(gs_2_3, 3.0, src))
    z = closed_form_z(gs_2_3, 1.0)
    n = np.flatnonzero(S.values)[-1]
    assert np.max(np.abs(S.values[:n] - z.values[:n])) <= 1e-5


def test_z0(gs_2_3):
    z0 = solve_z0(gs_2_3)
    alpha = surface_area(2) * radial_quadrature(gs_2_3.profile.with_values(gs_2_3.U * z0.values))
    assert alpha == pytest.approx(compute_alpha(2, 3.0, ground=gs_2_3).alpha_full, rel=1e-8)
    assert linear_residual(gs_2_3, 3.0, z0, moment_source(gs_2_3)) <= 1e-4
    assert _rel(alpha, 2 * math.pi * fx.FIGURE_ALPHA[(2, 3.0)]) <= fx.FIGURE_ALPHA_TOL


def test_z0_requires_plane(gs_1_3):
    with pytest.raises(ValueError):
        solve_z0(gs_1_3)


def test_sweep_edge_counts():
    assert sweep_alpha(2, 3.0, 3.0, 0) == []
    one = sweep_alpha(2, 3.0, 3.0, 1)
    assert len(one) == 1 and one[0].p == 3.0
    assert _rel(one[0].alpha_radial, fx.FIGURE_ALPHA[(2, 3.0)]) <= fx.FIGURE_ALPHA_TOL


def test_sweep_trend_towards_critical_exponent():
    pts = sweep_alpha(3, 2.6, 4.6, 6)
    a = [pt.alpha_radial for pt in pts]
    assert [pt.p for pt in pts] == sorted(pt.p for pt in pts)
    assert all(x > y > 0 for x, y in zip(a, a[1:]))
    assert a[-1] < 0.05 * a[0]


def test_sweep_records_failures(monkeypatch):
    real = lin.compute_alpha

    def flaky(N, p, **kw):
        if p > 2.9:
            raise ArithmeticError("forced")
        return real(N, p, **kw)

    monkeypatch.setattr(lin, "compute_alpha", flaky)
    pts = sweep_alpha(2, 2.5, 3.0, 2)
    assert isinstance(pts[1], SweepFailure) and "forced" in pts[1].reason
    assert not isinstance(pts[0], SweepFailure)


def test_write_sweep(tmp_path):
    pts = [lin.AlphaPoint(2, 3.0, 1.5, 3.0), SweepFailure(2, 3.5, "boom"),
           lin.AlphaPoint(2, 2.0, 0.5, 1.0)]
    path = tmp_path / "integ_UW_N2.dat"
    write_sweep(pts, path, header="test")
    lines = path.read_text().splitlines()
    assert lines[0] == "# test"
    assert lines[1] == "2.0\t0.5"
    assert lines[2] == "3.0\t1.5"
    assert lines[3].startswith("# failed p=3.5")
