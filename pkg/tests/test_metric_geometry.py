import numpy as np
import pytest

from whitham_ch import (
    ChCurve,
    affinor_match,
    curvature,
    egorov_defect,
    metric,
    metric_signed,
    pencil_check,
    rotation_coefficients,
    tsarev_check,
)
from whitham_ch.ch_modulation import _speeds_elliptic
from whitham_ch.errors import DomainError
from whitham_ch.metric_geometry import _rotation_fd

from conftest import make_curve


def test_metric_signs(rng):
    for _ in range(5):
        c = make_curve(rng)
        for e in range(4):
            g = metric_signed(c, e)
            assert g[0] > 0 and g[1] < 0 and g[2] > 0
            assert np.all(metric(c, e) > 0)


def test_exponent_ladder_ratio(curve):
    u = np.array(curve.u)
    for e in range(3):
        ratio = metric_signed(curve, e) / metric_signed(curve, e + 1)
        np.testing.assert_allclose(ratio, 2.0 * (u + curve.nu), rtol=1e-12)


def test_exponent_out_of_range(curve):
    with pytest.raises(DomainError):
        metric_signed(curve, 4)
    with pytest.raises(DomainError):
        metric_signed(curve, -1)


def test_rotation_closed_matches_fd(rng):
    c = make_curve(rng)
    for e in range(4):
        closed = rotation_coefficients(c, e)
        fd = _rotation_fd(c, e, h=1e-6)
        for i in range(3):
            for j in range(3):
                if i != j:
                    assert closed[i][j] == pytest.approx(fd[i][j], abs=1e-5)


def test_rotation_is_asymmetric(rng):
    # the defect certifies these metrics are not of Egorov type
    for _ in range(3):
        c = make_curve(rng)
        for e in range(4):
            assert egorov_defect(c, e) > 1e-3


class TestCurvature:
    def test_flat_members(self, rng):
        for _ in range(2):
            c = make_curve(rng)
            for e in (0, 1):
                rep = curvature(c, e)
                assert rep.max_error < 1e-4
                np.testing.assert_allclose(rep.expected, 0.0, atol=0)

    def test_constant_negative_member(self, curve):
        rep = curvature(curve, 2)
        assert rep.max_error < 1e-4
        off = rep.expected[0][1]
        assert off == pytest.approx(-1.0)

    def test_speed_dependent_member(self, curve):
        rep = curvature(curve, 3)
        assert rep.max_error < 1e-4
        C = _speeds_elliptic(curve)
        for i in range(3):
            for j in range(3):
                if i != j:
                    want = -2.0 * curve.nu - C[i] - C[j]
                    assert rep.expected[i][j] == pytest.approx(want,
                                                               rel=1e-12)

    def test_report_fields(self, curve):
        rep = curvature(curve, 0)
        assert rep.exponent == 0
        assert rep.offdiagonal_residual < 1e-4
        assert rep.egorov_defect > 1e-3
        assert np.asarray(rep.rotation).shape == (3, 3)
        assert np.asarray(rep.sectional).shape == (3, 3)


def test_tsarev_compatibility(rng):
    for _ in range(2):
        c = make_curve(rng)
        for e in range(4):
            assert tsarev_check(c, e) < 1e-4


class TestPencil:
    def test_contravariant_member_flat(self, curve):
        reports = pencil_check(curve)
        assert len(reports) == 4
        ran = [r for r in reports if not r.skipped]
        assert ran, "every pencil parameter degenerated"
        for r in ran:
            assert r.flat_residual < 1e-4
            assert r.covariant_literal_residual > 1e-3

    def test_degenerate_parameter_is_skipped(self):
        # 1 + 2 lam (u1 + nu) = 0 at lam = -1, u1 + nu = 0.5
        c = ChCurve(0.2, (0.3, 1.1, 2.4))
        rep = pencil_check(c, lambdas=(-1.0,))[0]
        assert rep.skipped
        assert "vanishes" in rep.notice
        assert rep.flat_residual is None


def test_affinor_sign(rng):
    rep = affinor_match(make_curve(rng))
    assert rep.empirical_sign == -1
    assert rep.minus_residual < 1e-4
    assert rep.plus_residual > 1.0
