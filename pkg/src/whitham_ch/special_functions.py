"""Complete elliptic integrals via AGM and Carlson symmetric forms.

K and E run on the arithmetic-geometric mean; the complete third-kind
integral Pi uses the Carlson R_F/R_J duplication algorithm.  Nothing here
calls a quadrature routine, so these are safe inside finite-difference
loops.

Conventions: all inputs are the squared modulus m = s^2 and squared
characteristic n = rho^2, i.e. K(m) = int_0^{pi/2} dpsi / sqrt(1 - m sin^2 psi),
Pi(n, m) = int_0^{pi/2} dpsi / ((1 - n sin^2 psi) sqrt(1 - m sin^2 psi)).
Pi(n, m) equals the Jacobi-sn form int_0^{K} dv / (1 - n sn^2(v|m)); the
equivalence is exercised by the test-suite against direct quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NumericalError

_REL_EPS = 5.0e-16
_MAX_ITER = 64


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive numbers."""
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"agm requires positive operands, got ({a}, {b})")
    for _ in range(_MAX_ITER):
        if abs(a - b) <= _REL_EPS * a:
            return 0.5 * (a + b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    raise NumericalError("agm did not converge", achieved=abs(a - b))


def elliptic_K(s2: float) -> float:
    """Complete elliptic integral of the first kind, squared modulus s2."""
    if not 0.0 <= s2 < 1.0:
        raise DomainError(f"elliptic_K requires 0 <= s2 < 1, got {s2}")
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - s2)))


def elliptic_E(s2: float) -> float:
    """Complete elliptic integral of the second kind, squared modulus s2.

    AGM with the running sum s = m/2 + sum_n 2^(n-1) c_n^2, c_n the
    successive half-differences; E = K (1 - s).
    """
    if not 0.0 <= s2 <= 1.0:
        raise DomainError(f"elliptic_E requires 0 <= s2 <= 1, got {s2}")
    if s2 == 1.0:
        return 1.0
    a, b = 1.0, math.sqrt(1.0 - s2)
    s = 0.5 * s2
    p = 0.5
    for _ in range(_MAX_ITER):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        p *= 2.0
        s += p * c * c
        if abs(c) <= _REL_EPS * a:
            break
    else:
        raise NumericalError("elliptic_E AGM did not converge")
    K = math.pi / (2.0 * a)
    return K * (1.0 - s)


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson symmetric integral R_F(x, y, z); nonnegative args, at most one zero."""
    if min(x, y, z) < 0.0 or (x + y) == 0.0 or (y + z) == 0.0 or (z + x) == 0.0:
        raise DomainError("carlson_rf requires nonnegative arguments, at most one zero")
    for _ in range(200):
        lam = math.sqrt(x) * math.sqrt(y) + math.sqrt(y) * math.sqrt(z) \
            + math.sqrt(z) * math.sqrt(x)
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        mu = (x + y + z) / 3.0
        if max(abs(x - mu), abs(y - mu), abs(z - mu)) < 1e-10 * mu:
            break
    else:
        raise NumericalError("carlson_rf duplication did not converge")
    X, Y = 1.0 - x / mu, 1.0 - y / mu
    Z = -X - Y
    E2 = X * Y - Z * Z
    E3 = X * Y * Z
    return (1.0 - E2 / 10.0 + E3 / 14.0 + E2 * E2 / 24.0
            - 3.0 * E2 * E3 / 44.0) / math.sqrt(mu)


def carlson_rc(x: float, y: float) -> float:
    """Degenerate case R_C(x, y) = R_F(x, y, y)."""
    return carlson_rf(x, y, y)


def carlson_rj(x: float, y: float, z: float, p: float) -> float:
    """Carlson symmetric integral R_J(x, y, z, p) for p > 0."""
    if min(x, y, z) < 0.0 or p <= 0.0:
        raise DomainError("carlson_rj requires nonnegative x,y,z and p > 0")
    s = 0.0
    fac = 1.0
    for _ in range(200):
        lam = math.sqrt(x) * math.sqrt(y) + math.sqrt(y) * math.sqrt(z) \
            + math.sqrt(z) * math.sqrt(x)
        alpha = (p * (math.sqrt(x) + math.sqrt(y) + math.sqrt(z))
                 + math.sqrt(x) * math.sqrt(y) * math.sqrt(z)) ** 2
        beta = p * (p + lam) ** 2
        s += fac * carlson_rc(alpha, beta)
        fac *= 0.25
        x, y, z, p = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam), \
            0.25 * (p + lam)
        mu = (x + y + z + 2.0 * p) / 5.0
        if max(abs(x - mu), abs(y - mu), abs(z - mu), abs(p - mu)) < 1e-10 * mu:
            break
    else:
        raise NumericalError("carlson_rj duplication did not converge")
    X, Y, Z = 1.0 - x / mu, 1.0 - y / mu, 1.0 - z / mu
    P = (-X - Y - Z) / 2.0
    E2 = X * Y + X * Z + Y * Z - 3.0 * P * P
    E3 = X * Y * Z + 2.0 * E2 * P + 4.0 * P ** 3
    E4 = (2.0 * X * Y * Z + E2 * P + 3.0 * P ** 3) * P
    E5 = X * Y * Z * P * P
    series = (1.0 - 3.0 * E2 / 14.0 + E3 / 6.0 + 9.0 * E2 * E2 / 88.0
              - 3.0 * E4 / 22.0 - 9.0 * E2 * E3 / 52.0 + 3.0 * E5 / 26.0)
    return 3.0 * s + fac * series / (mu * math.sqrt(mu))


def elliptic_Pi_complete(rho2: float, s2: float) -> float:
    """Complete elliptic integral of the third kind Pi(rho2, s2).

    rho2 = 0 short-circuits to elliptic_K exactly.
    """
    if not 0.0 <= s2 < 1.0:
        raise DomainError(f"elliptic_Pi_complete requires 0 <= s2 < 1, got {s2}")
    if rho2 >= 1.0:
        raise DomainError(
            f"elliptic_Pi_complete characteristic rho2 must be < 1, got {rho2}")
    if rho2 == 0.0:
        return elliptic_K(s2)
    return carlson_rf(0.0, 1.0 - s2, 1.0) \
        + (rho2 / 3.0) * carlson_rj(0.0, 1.0 - s2, 1.0, 1.0 - rho2)


@dataclass(frozen=True)
class EllipticModulus:
    """Squared modulus and third-kind characteristic of a spectral curve.

    For a curve with parameter nu and branch points u1 < u2 < u3 (all > -nu):
        s2   = (u2 - u1)(u3 + nu) / ((u3 - u1)(u2 + nu))
        rho2 = (u2 - u1) / (u2 + nu)
    both automatically in [0, 1).
    """

    s2: float
    rho2: float

    def __post_init__(self):
        if not 0.0 <= self.s2 < 1.0:
            raise DomainError(f"squared modulus must lie in [0,1), got {self.s2}")
        if not self.rho2 < 1.0:
            raise DomainError(f"characteristic must be < 1, got {self.rho2}")

    @classmethod
    def from_invariants(cls, nu: float, u: tuple) -> "EllipticModulus":
        u1, u2, u3 = u
        s2 = (u2 - u1) * (u3 + nu) / ((u3 - u1) * (u2 + nu))
        rho2 = (u2 - u1) / (u2 + nu)
        return cls(s2=s2, rho2=rho2)

    @property
    def K(self) -> float:
        return elliptic_K(self.s2)

    @property
    def E(self) -> float:
        return elliptic_E(self.s2)

    @property
    def Pi(self) -> float:
        return elliptic_Pi_complete(self.rho2, self.s2)
