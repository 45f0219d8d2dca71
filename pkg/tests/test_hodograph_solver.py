"""Euler-Poisson-Darboux solver and the hodograph field construction.

Oracles: constant data propagates unchanged, linear data gives the mean of
the invariants, and polynomial data must satisfy the defining second-order
relation to quadrature accuracy.
"""

import numpy as np
import pytest

from whitham_ch import (
    InitialData,
    as_engine,
    boundary_residual,
    commuting_speeds,
    epd_q,
    epd_residual,
    solve,
    solve_field,
    thread_cap,
    tsarev1_residual,
    zone_chart,
)
from whitham_ch.errors import DomainError


def _callable_data(f, fp, fpp, u_range=(0.05, 5.0), label="test"):
    arr = lambda g: (lambda s: g(np.asarray(s, dtype=float)))
    return InitialData.from_callable(arr(f), arr(fp), arr(fpp),
                                     u_range=u_range, label=label)


@pytest.fixture(scope="module")
def const_data():
    return _callable_data(lambda u: np.ones_like(u),
                          lambda u: np.zeros_like(u),
                          lambda u: np.zeros_like(u), label="const")


@pytest.fixture(scope="module")
def linear_data():
    return _callable_data(lambda u: u, lambda u: np.ones_like(u),
                          lambda u: np.zeros_like(u), label="linear")


@pytest.fixture(scope="module")
def cubic_data():
    return _callable_data(lambda u: u ** 3, lambda u: 3.0 * u ** 2,
                          lambda u: 6.0 * u, label="cubic")


@pytest.fixture(scope="module")
def breaking_data():
    # inflection of f' sits inside the domain, so the breaking zone opens
    # at an interior point rather than at the boundary
    c = 1.7
    return _callable_data(lambda u: u + (u - c) ** 3 / 3.0,
                          lambda u: 1.0 + (u - c) ** 2,
                          lambda u: 2.0 * (u - c),
                          u_range=(0.2, 3.2), label="inflection")


class TestInitialData:
    def test_from_samples_roundtrip(self):
        us = np.linspace(0.5, 2.5, 21)
        xs = us ** 2
        data = InitialData.from_samples(list(zip(us, xs)))
        assert data.f(1.5) == pytest.approx(2.25, rel=1e-6)
        assert data.inverse(2.25) == pytest.approx(1.5, rel=1e-6)

    def test_rejects_decreasing_profile(self):
        with pytest.raises(DomainError, match="increasing"):
            InitialData.from_samples([(0.5, 2.0), (1.0, 1.0), (1.5, 0.5)])

    def test_rejects_too_few_samples(self):
        with pytest.raises(DomainError):
            InitialData.from_samples([(0.5, 0.5), (1.0, 1.0)])

    def test_rejects_nonpositive_invariant(self):
        with pytest.raises(DomainError):
            InitialData.from_samples([(-0.5, 0.1), (1.0, 1.0), (2.0, 2.0)])

    def test_engine_cache(self, cubic_data):
        assert as_engine(cubic_data) is as_engine(cubic_data)


class TestEpdOracles:
    def test_constant_data(self, const_data):
        for u in [(0.3, 1.1, 2.2), (1.0, 2.0, 4.0), (0.5, 0.9, 1.4)]:
            assert epd_q(const_data, u) == pytest.approx(1.0, abs=1e-10)

    def test_linear_data_gives_mean(self, linear_data):
        for u in [(0.3, 1.1, 2.2), (1.0, 2.0, 4.0)]:
            assert epd_q(linear_data, u) == pytest.approx(sum(u) / 3.0,
                                                          abs=1e-8)

    def test_pde_residual_cubic(self, cubic_data):
        for u in [(1.0, 1.7, 2.6), (0.8, 1.2, 2.0)]:
            assert epd_residual(cubic_data, u) < 1e-4

    def test_boundary_condition(self, cubic_data):
        # on the full diagonal the average collapses to the data itself
        for a in (0.7, 1.3, 1.9):
            assert boundary_residual(cubic_data, a) < 1e-8

    def test_symmetry(self, cubic_data):
        assert epd_q(cubic_data, (1.0, 1.5, 2.5)) == pytest.approx(
            epd_q(cubic_data, (2.5, 1.0, 1.5)), rel=1e-12)


def test_commuting_speeds_linear_profile(linear_data):
    # w^i - C^i/3 is symmetric in the invariants for linear data
    u = (0.9, 1.6, 2.8)
    w = commuting_speeds(linear_data, u)
    from whitham_ch.hodograph_solver import _speeds_nu0
    C = _speeds_nu0(u)
    shifted = w - C / 3.0
    assert shifted[0] == pytest.approx(shifted[1], rel=1e-6)
    assert shifted[1] == pytest.approx(shifted[2], rel=1e-6)


def test_tsarev1_residual(cubic_data):
    assert tsarev1_residual(cubic_data, (1.0, 2.0, 3.0)) < 1e-3


class TestPointSolve:
    def test_interior_point(self, breaking_data):
        res = solve(breaking_data, -0.45, 0.45, (0.85, 2.0, 2.8))
        assert res.status == "ok"
        assert res.residual < 1e-9
        u = res.u
        assert 0.0 < u[0] < u[1] < u[2]

    def test_rejects_negative_time(self, breaking_data):
        with pytest.raises(DomainError):
            solve(breaking_data, 0.0, -0.1, (0.85, 2.0, 2.8))

    def test_rejects_bad_seed(self, breaking_data):
        with pytest.raises(DomainError):
            solve(breaking_data, 0.0, 0.4, (2.0, 1.0, 3.0))


def test_zone_chart_is_physical(breaking_data):
    chart = zone_chart(breaking_data)
    assert len(chart) >= 5
    for p in chart:
        assert p.t > 0.0
        assert 0.0 < p.u[0] < p.u[1] < p.u[2]


class TestField:
    def test_small_field(self, breaking_data):
        t = np.linspace(0.447, 0.457, 6)
        x = np.linspace(-0.462, -0.442, 16)
        sol = solve_field(breaking_data, t, x)
        assert sol.solved_fraction >= 0.95
        ok = np.isin(sol.status, ("ok", "degenerate"))
        assert float(np.max(sol.residual[ok])) < 1e-9
        assert sol.pde_residual_max() < 5e-2

    def test_determinism(self, breaking_data):
        t = np.linspace(0.449, 0.455, 3)
        x = np.linspace(-0.458, -0.448, 5)
        a = solve_field(breaking_data, t, x)
        b = solve_field(breaking_data, t, x)
        np.testing.assert_array_equal(a.u, b.u)
        np.testing.assert_array_equal(a.status, b.status)

    def test_csv_shape(self, breaking_data, tmp_path):
        t = np.linspace(0.449, 0.455, 3)
        x = np.linspace(-0.458, -0.448, 4)
        sol = solve_field(breaking_data, t, x)
        out = tmp_path / "field.csv"
        text = sol.to_csv(str(out))
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "x,t,u1,u2,u3,residual,status"
        assert len(lines) == 1 + 3 * 4
        assert text.startswith("x,t,")


def test_thread_cap(monkeypatch):
    monkeypatch.delenv("WHITHAM_CH_THREADS", raising=False)
    assert thread_cap() == 1
    monkeypatch.setenv("WHITHAM_CH_THREADS", "4")
    assert thread_cap() == 4
    monkeypatch.setenv("WHITHAM_CH_THREADS", "0")
    with pytest.raises(DomainError):
        thread_cap()
    monkeypatch.setenv("WHITHAM_CH_THREADS", "many")
    with pytest.raises(DomainError):
        thread_cap()
