"""Connection-defect oracle, geodesic shooting and coset distance."""

import numpy as np
import pytest

from wallach_geo import (
    DiagonalMetric,
    IntegrationFailureError,
    OutOfChartError,
    ProductExpCurve,
    closed_form_geodesic,
    connection_defect,
    coset_distance,
    gw_defect_all,
    identity_checks,
    inner,
    matrix_exp,
    shoot_geodesic,
)
from .conftest import make_rng


def _draws(dec, seed):
    rng = make_rng(seed)
    return [dec.random_module_vector(p, rng) for p in ("m1", "m2", "m3")]


def test_cross_oracle_identity_on_arbitrary_curves(spaces):
    """<W, D(t)> reproduces the twist-based defect for every basis W, on
    curves that are not geodesics."""
    rng = make_rng(0)
    for dec in spaces.values():
        curve = ProductExpCurve(dec, _draws(dec, 1))
        g = DiagonalMetric(dec, rng.uniform(0.3, 3.0, 3))
        for t in (0.0, 0.6, 1.4):
            D = connection_defect(curve, g, t)
            vec = gw_defect_all(curve, g, t)
            for pos, w in enumerate(dec.part_indices["m"]):
                W = dec.context.basis_element(int(w))
                assert abs(vec[pos] - inner(g, W, D)) < 1e-8


def test_defect_vanishes_on_biinvariant_single_exponential(stiefel3):
    g = DiagonalMetric(stiefel3, (1.0, 1.0, 1.0))
    X = stiefel3.random_module_vector("m", make_rng(2))
    curve = ProductExpCurve(stiefel3, [X])
    for t in (0.0, 0.8, 1.9):
        assert connection_defect(curve, g, t).norm_b() < 1e-13


def test_defect_vanishes_on_closed_form_geodesics(su3):
    curve, g = closed_form_geodesic(su3, 2, *_draws(su3, 3), 1.5)
    for t in np.linspace(0.0, 2.0, 9):
        assert connection_defect(curve, g, t).norm_b() < 1e-12


def test_shot_biinvariant_curve_is_single_exponential(stiefel3):
    g = DiagonalMetric(stiefel3, (1.0, 1.0, 1.0))
    v0 = stiefel3.random_module_vector("m", make_rng(4))
    shot = shoot_geodesic(stiefel3, g, v0, 1.0, 100)
    for s in shot.samples[:: 20]:
        ref = matrix_exp(v0, s.t)
        assert np.abs(s.group_point.matrix - ref.matrix).max() < 1e-9


def test_shooting_agrees_with_closed_form(stiefel3):
    curve, g = closed_form_geodesic(stiefel3, 1, *_draws(stiefel3, 5), 0.5)
    v0 = curve.initial_velocity()
    shot = shoot_geodesic(stiefel3, g, v0, 1.0, 1000)
    for k in range(0, 1001, 100):
        s = shot.samples[k]
        assert coset_distance(s.group_point, curve.evaluate(s.t), stiefel3) < 1e-6


def test_shooting_step_halving_is_fourth_order(stiefel3):
    """At coarse steps the max coset error shrinks by ~16x per halving."""
    curve, g = closed_form_geodesic(stiefel3, 1, *_draws(stiefel3, 6), 2.0)
    v0 = curve.initial_velocity()

    def max_err(steps):
        shot = shoot_geodesic(stiefel3, g, v0, 1.0, steps)
        stride = steps // 10
        return max(
            coset_distance(shot.samples[k].group_point, curve.evaluate(shot.samples[k].t), stiefel3)
            for k in range(stride, steps + 1, stride)
        )

    factor = max_err(20) / max_err(40)
    assert 8.0 <= factor <= 32.0


def test_shooting_conserves_energy(su3):
    g = DiagonalMetric(su3, (1.0, 2.0, 0.5))
    v0 = su3.random_module_vector("m", make_rng(7))
    shot = shoot_geodesic(su3, g, v0, 1.0, 400)
    assert shot.energy_drift <= 1e-8
    e0 = inner(g, shot.samples[0].v, shot.samples[0].v)
    for s in shot.samples[:: 80]:
        assert inner(g, s.v, s.v) == pytest.approx(e0, abs=1e-8)


def test_shooting_rejects_tiny_step_counts(stiefel3):
    g = DiagonalMetric(stiefel3, (1.0, 1.0, 0.5))
    v0 = stiefel3.random_module_vector("m", make_rng(8))
    with pytest.raises(ValueError):
        shoot_geodesic(stiefel3, g, v0, 1.0, 5)


def test_shot_frames_stay_orthogonal(so222):
    g = DiagonalMetric(so222, (1.0, 1.7, 0.4))
    v0 = so222.random_module_vector("m", make_rng(9))
    shot = shoot_geodesic(so222, g, v0, 1.0, 200)
    assert shot.samples[-1].group_point.orthogonality_drift() < 1e-12


def test_coset_distance_basics(stiefel3):
    a = matrix_exp(stiefel3.random_module_vector("m1", make_rng(10)), 0.4)
    assert coset_distance(a, a, stiefel3) < 1e-14
    # right K-translation does not move the coset
    zeta = stiefel3.random_module_vector("k", make_rng(11))
    ak = a @ matrix_exp(zeta, 0.9)
    assert coset_distance(a, ak, stiefel3) < 1e-12
    b = matrix_exp(stiefel3.random_module_vector("m2", make_rng(12)), 0.3)
    d_ab = coset_distance(a, b, stiefel3)
    assert d_ab > 1e-3
    assert coset_distance(b, a, stiefel3) == pytest.approx(d_ab, abs=1e-10)


def test_coset_distance_chart_boundary(stiefel3):
    e = stiefel3.context.identity()
    far = matrix_exp(stiefel3.random_module_vector("m1", make_rng(13)), 7.0)
    with pytest.raises(OutOfChartError):
        coset_distance(e, far, stiefel3)


def test_gauge_invariance_of_defect_and_cosets(stiefel3):
    """A right k-factor changes the lift but neither the cosets nor the
    defect magnitude."""
    factors = _draws(stiefel3, 14)
    zeta = stiefel3.random_module_vector("k", make_rng(15))
    g = DiagonalMetric(stiefel3, (1.0, 1.4, 0.7))
    base = ProductExpCurve(stiefel3, factors)
    gauged = ProductExpCurve(stiefel3, factors + [zeta])
    for t in (0.4, 1.2):
        assert coset_distance(base.evaluate(t), gauged.evaluate(t), stiefel3) < 1e-10
        db = connection_defect(base, g, t).norm_b()
        dg = connection_defect(gauged, g, t).norm_b()
        assert db == pytest.approx(dg, abs=1e-9)


def test_identity_checks_pass_everywhere(spaces):
    for dec in spaces.values():
        report = identity_checks(dec)
        assert report.verdict, [c.name for c in report.checks if not c.passed]
