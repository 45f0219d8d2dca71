import math

import numpy as np
import pytest

from whitham_ch import (
    KdvCurve,
    casimir_gradient,
    gradient_identity_residual,
    hamiltonian_fit_report,
    kdv_curvature,
    kdv_hamiltonians,
    kdv_metric,
    kdv_metric_signed,
    neg_speeds,
    neg_speeds_fd,
    pos_speeds,
    varj0_residual,
)
from whitham_ch.errors import InvalidCurveError
from whitham_ch.kdv_modulation import _casimir_gradient_fd

from conftest import make_kdv


def test_validation_names_invariant():
    with pytest.raises(InvalidCurveError, match="invariant"):
        KdvCurve((1.0, 0.5, 2.0))
    with pytest.raises(InvalidCurveError, match="invariant"):
        KdvCurve((-0.5, 1.0, 2.0))
    with pytest.raises(InvalidCurveError, match="invariant"):
        KdvCurve((1.0, 1.0, 2.0))


def test_normalizations(rng):
    for _ in range(4):
        res = make_kdv(rng).normalization_residuals()
        assert set(res) == {"j0", "dp", "lambda0"}
        for key, val in res.items():
            assert val < 1e-10, key


def test_neg_speeds_match_kinematic_fd(rng):
    for _ in range(4):
        c = make_kdv(rng)
        np.testing.assert_allclose(neg_speeds(c), neg_speeds_fd(c),
                                   rtol=0, atol=1e-5)


def test_speed_scaling_law(kdv):
    # v(c beta) = c^(-3/2) v(beta)
    scaled = KdvCurve(tuple(2.0 * b for b in kdv.beta))
    np.testing.assert_allclose(neg_speeds(scaled),
                               2.0 ** -1.5 * neg_speeds(kdv), rtol=1e-10)


def test_solitonic_limit():
    """As the upper pair merges, the surviving edge moves dispersionlessly:
    the negative flow at speed 2 b1^(-3/2), the positive one at 3 b1."""
    b1, b3 = 0.6, 2.2
    for eps, tol in ((1e-3, 2e-2), (1e-6, 1e-4)):
        c = KdvCurve((b1, b3 - eps, b3))
        v = neg_speeds(c, check=False)
        w = pos_speeds(c)
        assert v[0] == pytest.approx(2.0 * b1 ** -1.5, abs=tol)
        assert w[0] == pytest.approx(3.0 * b1, abs=tol)
        assert v[1] == pytest.approx(v[2], abs=tol)


def test_metric_signs_and_curvature(rng):
    c = make_kdv(rng)
    for e in range(4):
        g = kdv_metric_signed(c, e)
        assert g[0] > 0 and g[1] < 0 and g[2] > 0
        assert np.all(kdv_metric(c, e) > 0)
        rep = kdv_curvature(c, e)
        assert rep.max_error < 1e-4
        assert rep.egorov_defect > 1e-3


def test_expected_curvature_values(kdv):
    w = pos_speeds(kdv)
    rep2 = kdv_curvature(kdv, 2)
    rep3 = kdv_curvature(kdv, 3)
    assert rep2.expected[0][1] == pytest.approx(-0.5)
    assert rep3.expected[0][1] == pytest.approx(-(w[0] + w[1]) / 8.0,
                                                rel=1e-12)


def test_varj0(rng):
    for _ in range(3):
        assert varj0_residual(make_kdv(rng)) < 1e-6


class TestHamiltonians:
    def test_casimir_positive_and_ladder(self, rng):
        for _ in range(4):
            c = make_kdv(rng)
            ham = kdv_hamiltonians(c)
            assert ham.H0 > 0.0
            assert len(ham.Hneg) == 3
            assert ham.Hm1 == ham.Hneg[0]

    def test_counter_term(self, kdv):
        ham = kdv_hamiltonians(kdv, nu=0.3)
        want = sum(1.0 / b for b in kdv.beta) - 0.3 + 2.0 * kdv.alpha0
        assert ham.N == pytest.approx(want, rel=1e-12)

    def test_gradient_closed_vs_fd(self, rng):
        c = make_kdv(rng)
        closed = casimir_gradient(c)
        fd = _casimir_gradient_fd(c, h=1e-6)
        np.testing.assert_allclose(closed, fd, rtol=0, atol=1e-7)

    def test_gradient_identity(self, rng):
        for _ in range(3):
            assert gradient_identity_residual(make_kdv(rng)) < 1e-7


class TestSmallParameterFit:
    """Hamiltonian ladder read off from densities sampled at small spectral
    parameter.  The interpolation itself must be sharp; the decoded ladder
    agrees exactly only for the leading members, the deeper ones carry the
    expansion's truncation error and stay diagnostic."""

    def test_interpolation_sharp(self, rng):
        for _ in range(2):
            rep = hamiltonian_fit_report(make_kdv(rng))
            assert rep.interpolation_residual < 1e-7

    def test_leading_members_decode(self, kdv):
        rep = hamiltonian_fit_report(kdv)
        assert rep.weight_one_consistent
        assert rep.errors[0] < 1e-3
        assert rep.errors[1] < 1e-2
        assert rep.decoded[0] == pytest.approx(rep.closed[0], rel=1e-3)

    def test_report_shapes(self, kdv):
        rep = hamiltonian_fit_report(kdv)
        assert len(rep.nodes) == len(rep.values) == 4
        assert len(rep.decoded) == len(rep.closed) == len(rep.errors) == 4
