import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whitham_ch import (
    ChCurve,
    densities,
    density_fit_residual,
    frequency,
    sign_facts,
    speeds,
    speeds_fd,
    traveling_wave,
    wavenumber,
)
from whitham_ch.ch_modulation import _speeds_elliptic, _speeds_residue

from conftest import make_curve


def test_wavenumber_matches_quadrature(rng):
    for _ in range(4):
        c = make_curve(rng)
        k_quad = 2.0 * np.pi / c.cycle(lambda l: l + c.nu)
        assert wavenumber(c) == pytest.approx(k_quad, rel=1e-9)


def test_frequency_relation(curve):
    want = (2.0 * curve.nu + curve.S1) * wavenumber(curve)
    assert frequency(curve) == pytest.approx(want, rel=1e-12)


class TestSpeedRoutes:
    def test_elliptic_equals_residue(self, rng):
        for _ in range(10):
            c = make_curve(rng)
            np.testing.assert_allclose(_speeds_elliptic(c),
                                       _speeds_residue(c),
                                       rtol=0, atol=1e-9)

    def test_elliptic_equals_kinematic_fd(self, rng):
        for _ in range(4):
            c = make_curve(rng)
            np.testing.assert_allclose(_speeds_elliptic(c), speeds_fd(c),
                                       rtol=0, atol=1e-5)

    def test_speeds_wrapper_cross_checks(self, curve):
        sp = speeds(curve)
        np.testing.assert_allclose(sp.C, _speeds_elliptic(curve), atol=1e-12)


class TestCoalescence:
    """Solitonic and harmonic edges.  The merging pair's speeds close on
    each other quickly at both edges.  The surviving invariant tends to
    the dispersionless value 3u + 2nu: at rate O(eps) on the harmonic
    edge, but only as 1/log(1/eps) on the solitonic edge, where the gap
    is certified by monotone decrease rather than an absolute bound."""

    def test_upper_pair_merges(self):
        nu, u1, v = 0.7, 0.3, 2.5
        pair_gaps, limit_gaps = [], []
        for eps in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
            C = _speeds_elliptic(ChCurve(nu, (u1, v - eps, v + eps)))
            pair_gaps.append(abs(C[1] - C[2]))
            limit_gaps.append(abs(C[0] - (3.0 * u1 + 2.0 * nu)))
        assert all(b < a for a, b in zip(pair_gaps, pair_gaps[1:]))
        assert pair_gaps[-1] < 1e-4
        assert all(b < a for a, b in zip(limit_gaps, limit_gaps[1:]))

    def test_lower_pair_merges(self):
        nu, u1, u3 = 0.7, 0.3, 2.5
        pair_gaps, limit_gaps = [], []
        for eps in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
            C = _speeds_elliptic(ChCurve(nu, (u1, u1 + eps, u3)))
            pair_gaps.append(abs(C[0] - C[1]))
            limit_gaps.append(abs(C[2] - (3.0 * u3 + 2.0 * nu)))
        assert all(b < a for a, b in zip(pair_gaps, pair_gaps[1:]))
        assert pair_gaps[-1] < 1e-6
        assert all(b < a for a, b in zip(limit_gaps, limit_gaps[1:]))
        assert limit_gaps[-1] < 1e-4

    def test_soliton_speed_at_upper_edge(self):
        # the merging pair's common speed is the soliton speed S1 + 2 nu
        nu, u1, v = 0.7, 0.3, 2.5
        C = _speeds_elliptic(ChCurve(nu, (u1, v - 1e-6, v + 1e-6)))
        assert C[1] == pytest.approx(u1 + 2.0 * v + 2.0 * nu, abs=1e-4)


@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
@settings(max_examples=60, deadline=None)
def test_hyperbolicity_ordering(seed):
    c = make_curve(np.random.default_rng(seed), margin=0.05)
    C = _speeds_elliptic(c)
    assert C[0] < C[2]
    assert C[1] < C[2]


def test_sign_facts_hold(rng):
    for _ in range(10):
        facts = sign_facts(make_curve(rng))
        assert all(facts.values()), facts


class TestTravelingWave:
    def test_zero_nu_reference(self):
        tw = traveling_wave(ChCurve(0.0, (1.0, 2.0, 3.0)))
        assert tw.c == pytest.approx(6.0, rel=1e-12)
        np.testing.assert_allclose(tw.e, [4.0, 2.0, 0.0], atol=1e-12)

    def test_speed_is_invariant_sum(self, rng):
        for _ in range(4):
            c = make_curve(rng)
            tw = traveling_wave(c)
            assert tw.c == pytest.approx(sum(tw.e) + 2.0 * c.nu, abs=1e-10)
            assert tw.c == pytest.approx(c.S1 + 2.0 * c.nu, rel=1e-12)


class TestDensities:
    def test_h0_direct_form(self, rng):
        for _ in range(4):
            c = make_curve(rng)
            d = densities(c)
            want = -2.0 * c.P2(-c.nu) / c.P1(-c.nu) - c.nu
            assert d.h0 == pytest.approx(want, rel=1e-10)

    def test_zero_nu_ladder_reductions(self):
        c = ChCurve(0.0, (0.5, 1.4, 3.1))
        d = densities(c)
        assert d.h1 == pytest.approx(2.0 * d.xi1, rel=1e-10)
        assert d.h2 == pytest.approx(8.0 / 3.0 * d.xi2, rel=1e-10)

    def test_series_coefficients_against_fit(self, rng):
        for _ in range(3):
            assert density_fit_residual(make_curve(rng)) < 1e-6
