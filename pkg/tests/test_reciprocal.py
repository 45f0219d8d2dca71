import numpy as np
import pytest

from whitham_ch import (
    ChCurve,
    ReciprocalPair,
    alpha_identity_residuals,
    casimir_dual_residual,
    casimir_identity_residuals,
    ferapontov_check,
    ferapontov_transform,
    metricbeta_residuals,
    nu_dual_residual,
    table1,
    tilde_speeds,
    velocity_identity_residual,
)
from whitham_ch.ch_modulation import _speeds_elliptic
from whitham_ch.errors import DomainError

from conftest import make_curve, make_kdv


def test_edge_map():
    # beta^i = 1 / (u^i + nu), stored descending on the aligned side
    pair = ReciprocalPair.from_ch(ChCurve(1.0, (0.0, 1.0, 3.0)))
    np.testing.assert_allclose(pair.beta_aligned, [1.0, 0.5, 0.25],
                               rtol=1e-14)
    np.testing.assert_allclose(pair.kdv.beta, [0.25, 0.5, 1.0], rtol=1e-14)


def test_alpha_identities(rng):
    for _ in range(4):
        pair = ReciprocalPair.from_ch(make_curve(rng))
        res = alpha_identity_residuals(pair)
        assert res["alpha0"] < 1e-10
        assert res["alpha1"] < 1e-10


def test_tilde_speeds_equal_ch_speeds(rng):
    for _ in range(4):
        pair = ReciprocalPair.from_ch(make_curve(rng))
        np.testing.assert_allclose(tilde_speeds(pair),
                                   _speeds_elliptic(pair.ch),
                                   rtol=0, atol=1e-9)


def test_velocity_identity(rng):
    # C^i = v^i H0 + N across a wide sample
    worst = max(velocity_identity_residual(
        ReciprocalPair.from_ch(make_curve(rng))) for _ in range(50))
    assert worst < 1e-8


def test_casimir_dual_route(rng):
    for _ in range(4):
        pair = ReciprocalPair.from_ch(make_curve(rng))
        assert casimir_dual_residual(pair) < 1e-8


def test_counter_term_dual_route(rng):
    for _ in range(4):
        pair = ReciprocalPair.from_ch(make_curve(rng))
        assert nu_dual_residual(pair) < 1e-7


def test_metric_correspondence_all_exponents(rng):
    for _ in range(4):
        pair = ReciprocalPair.from_ch(make_curve(rng))
        res = metricbeta_residuals(pair)
        assert set(res) == {0, 1, 2, 3}
        for e, val in res.items():
            assert val < 1e-8, e


class TestFerapontov:
    def test_flat_base(self, rng):
        rep = ferapontov_check(make_kdv(rng), exponent=0)
        assert rep.residual < 1e-3

    def test_constant_curvature_base(self, rng):
        rep = ferapontov_check(make_kdv(rng), exponent=1)
        assert rep.residual < 1e-3
        off = [rep.sectional[i][j] for i in range(3) for j in range(3)
               if i != j]
        np.testing.assert_allclose(off, -1.0, atol=1e-3)

    def test_constant_factor_keeps_flatness(self, kdv):
        rep = ferapontov_transform(kdv, exponent=0, A=lambda bb: 2.0)
        np.testing.assert_allclose(rep.w_tilde, 0.0, atol=1e-6)
        assert rep.residual < 1e-3

    def test_vanishing_factor_rejected(self, kdv):
        with pytest.raises(DomainError, match="singular"):
            ferapontov_transform(kdv, A=lambda bb: 0.0)

    def test_curved_base_rejected(self, kdv):
        with pytest.raises(DomainError):
            ferapontov_transform(kdv, exponent=2)


class TestTable:
    def test_layout(self, curve):
        rows = table1(curve, curvature_check=False)
        assert len(rows) == 8
        assert [r.side for r in rows] == ["KdV", "CH"] * 4
        assert [r.slot for r in rows] == [1, 1, 2, 2, 3, 3, 4, 4]
        # the two sides pair complementary weights in each slot
        assert [r.exponent for r in rows] == [0, 3, 1, 2, 2, 1, 3, 0]

    def test_density_and_metric_residuals(self, curve):
        for r in table1(curve, curvature_check=False):
            if r.side == "KdV":
                assert r.density_residual is None
                assert r.metric_residual is None
            else:
                assert r.density_residual < 1e-7
                assert r.metric_residual < 1e-8

    def test_curvature_column(self, curve):
        for r in table1(curve, curvature_check=True):
            assert r.curvature_error < 1e-4
            assert len(r.metric) == 3

    def test_casimir_shifts(self, curve):
        from whitham_ch import densities

        rows = table1(curve, curvature_check=False)
        by_slot = {(r.side, r.slot): r for r in rows}
        assert by_slot[("KdV", 1)].casimir_shift == pytest.approx(-curve.nu)
        for slot in (1, 2, 3):
            assert by_slot[("CH", slot)].casimir_shift == 0.0
        d = densities(curve)
        want = 2.0 * curve.nu ** 2 * (d.h0 + curve.nu)
        assert by_slot[("CH", 4)].casimir_shift == pytest.approx(want,
                                                                 rel=1e-12)


def test_casimir_identities(rng):
    for _ in range(3):
        res = casimir_identity_residuals(make_curve(rng))
        assert set(res) == {"h0", "h1", "h2_shifted"}
        assert res["h0"] < 1e-9
        assert res["h1"] < 1e-8
        assert res["h2_shifted"] < 1e-7
