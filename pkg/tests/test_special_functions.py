import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whitham_ch import elliptic_E, elliptic_K, elliptic_Pi_complete
from whitham_ch.errors import DomainError

mpmath.mp.dps = 30


@pytest.mark.parametrize("m", [1e-8, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99,
                               0.999999])
def test_K_against_mpmath(m):
    assert elliptic_K(m) == pytest.approx(float(mpmath.ellipk(m)),
                                          rel=1e-14, abs=1e-14)


@pytest.mark.parametrize("m", [1e-8, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99,
                               0.999999])
def test_E_against_mpmath(m):
    assert elliptic_E(m) == pytest.approx(float(mpmath.ellipe(m)),
                                          rel=1e-14, abs=1e-14)


@pytest.mark.parametrize("n,m", [(0.1, 0.3), (0.5, 0.5), (0.9, 0.2),
                                 (0.3, 0.9), (-0.5, 0.4), (-2.0, 0.7)])
def test_Pi_against_mpmath(n, m):
    ref = float(mpmath.ellippi(n, m))
    assert elliptic_Pi_complete(n, m) == pytest.approx(ref, rel=1e-12)


def test_zero_modulus_values():
    assert elliptic_K(0.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert elliptic_E(0.0) == pytest.approx(math.pi / 2, rel=1e-15)


def test_Pi_reduces_to_K_exactly():
    for m in (0.1, 0.5, 0.9):
        assert elliptic_Pi_complete(0.0, m) == elliptic_K(m)


@given(st.floats(min_value=1e-6, max_value=1.0 - 1e-6))
@settings(max_examples=200, deadline=None)
def test_legendre_relation(m):
    c = 1.0 - m
    lhs = (elliptic_E(m) * elliptic_K(c) + elliptic_E(c) * elliptic_K(m)
           - elliptic_K(m) * elliptic_K(c))
    assert lhs == pytest.approx(math.pi / 2, abs=1e-12)


@given(st.floats(min_value=0.01, max_value=0.98))
@settings(max_examples=100, deadline=None)
def test_K_increases_E_decreases(m):
    dm = 0.005
    assert elliptic_K(m + dm) > elliptic_K(m)
    assert elliptic_E(m + dm) < elliptic_E(m)


def test_domain_rejection():
    with pytest.raises(DomainError):
        elliptic_K(1.0)
    with pytest.raises(DomainError):
        elliptic_K(-0.1)
    with pytest.raises(DomainError):
        elliptic_E(1.5)
    with pytest.raises(DomainError):
        elliptic_Pi_complete(1.0, 0.5)
    with pytest.raises(DomainError):
        elliptic_Pi_complete(0.5, 1.0)
