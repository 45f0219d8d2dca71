"""The quartic spectral curve R(lambda) and its Abelian differentials.

R(lambda) = (lambda + nu)(lambda - u1)(lambda - u2)(lambda - u3) with
-nu < u1 < u2 < u3.  The a-cycle runs around the cut (u1, u2), where
R > 0, oriented so that I0 = cycle(1/sqrt(R)) > 0.  Off the cuts R can be
negative; evaluations there, and local values at branch points, use the
principal complex square root.

Normalized differentials, by numerator polynomial over sqrt(R):
    Sigma1:  P1(lambda) = lambda + gamma1                    (third kind)
    Sigma2:  P2(lambda) = lambda^2 - (S1-nu)/2 lambda + gamma2  (second kind)
    OmegaNu: Pnu(lambda) = Dnu/(2(lambda+nu)) + P2(-nu)      (pole at -nu)
    Phi:     1/I0                                            (holomorphic)
with Dnu = -prod(nu + u^i).  gamma1, gamma2 are fixed by the vanishing of
the a-periods; both have closed elliptic forms and moment-quadrature forms,
and the constructor cross-checks the two.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.lib import scimath

from ._quadrature import cycle_integral
from .errors import ConsistencyError, DomainError, InvalidCurveError
from .special_functions import EllipticModulus

EPS_COALESCENCE = 1e-9

NU_BRANCH = -1  # index value selecting the branch point at lambda = -nu


class DifferentialKind(enum.Enum):
    Sigma1 = "sigma1"
    Sigma2 = "sigma2"
    OmegaNu = "omega_nu"
    Phi = "phi"


@dataclass(frozen=True)
class CurveConstants:
    I0: float
    I1: float
    I2: float
    gamma1: float
    gamma2: float
    residue_sigma1_sq: float  # res at lambda=-nu of sigma1^2/dlambda, > 0


@dataclass(frozen=True)
class ChCurve:
    """Spectral curve with parameter nu and Riemann invariants u1 < u2 < u3."""

    nu: float
    u: tuple
    eps_c: float = EPS_COALESCENCE

    def __post_init__(self):
        if len(self.u) != 3:
            raise InvalidCurveError("exactly three Riemann invariants required")
        object.__setattr__(self, "u", tuple(float(x) for x in self.u))
        u1, u2, u3 = self.u
        nu = float(self.nu)
        object.__setattr__(self, "nu", nu)
        if not u1 + nu > self.eps_c:
            raise InvalidCurveError(
                f"invariant u1 + nu > {self.eps_c:g} violated: "
                f"u1 + nu = {u1 + nu:.6g}")
        if not u2 - u1 > self.eps_c:
            raise InvalidCurveError(
                f"invariant u2 - u1 > {self.eps_c:g} violated: "
                f"u2 - u1 = {u2 - u1:.6g}")
        if not u3 - u2 > self.eps_c:
            raise InvalidCurveError(
                f"invariant u3 - u2 > {self.eps_c:g} violated: "
                f"u3 - u2 = {u3 - u2:.6g}")

    # -- basic symmetric data ------------------------------------------------

    @property
    def S1(self) -> float:
        return self.u[0] + self.u[1] + self.u[2]

    @property
    def S2(self) -> float:
        u1, u2, u3 = self.u
        return u1 * u2 + u1 * u3 + u2 * u3

    @property
    def S3(self) -> float:
        return self.u[0] * self.u[1] * self.u[2]

    @property
    def Dnu(self) -> float:
        # R'(-nu) absorbed sign: Dnu = -prod(nu + u^i) < 0
        return -float(np.prod([self.nu + ui for ui in self.u]))

    def R(self, lam):
        u1, u2, u3 = self.u
        return (lam + self.nu) * (lam - u1) * (lam - u2) * (lam - u3)

    def R_prime_at_branch(self, i: int):
        """dR/dlambda at the i-th branch point (i in 0..2, or NU_BRANCH)."""
        if i == NU_BRANCH:
            return float(np.prod([-self.nu - ui for ui in self.u]))
        ui = self.u[i]
        return (ui + self.nu) * float(
            np.prod([ui - self.u[j] for j in range(3) if j != i]))

    # -- elliptic closed forms -----------------------------------------------

    @cached_property
    def modulus(self) -> EllipticModulus:
        return EllipticModulus.from_invariants(self.nu, self.u)

    @cached_property
    def _KEL(self):
        m = self.modulus
        return m.K, m.E, m.Pi

    @cached_property
    def _gammas(self):
        # closed elliptic forms; the quadrature cross-check lives in constants
        u1, u2, u3 = self.u
        nu = self.nu
        K, E, Lam = self._KEL
        g1 = nu - (u1 + nu) * Lam / K
        g2 = 0.5 * (u1 * u2 - nu * u3 + (u3 - u1) * (u2 + nu) * E / K)
        return g1, g2

    @property
    def gamma1(self) -> float:
        return self._gammas[0]

    @property
    def gamma2(self) -> float:
        return self._gammas[1]

    @cached_property
    def I0_closed(self) -> float:
        u1, u2, u3 = self.u
        K = self._KEL[0]
        return 4.0 * K / math.sqrt((u3 - u1) * (u2 + self.nu))

    # -- numerator polynomials -----------------------------------------------

    def P1(self, lam):
        return lam + self.gamma1

    def P2(self, lam):
        return lam * lam - 0.5 * (self.S1 - self.nu) * lam + self.gamma2

    def Pnu(self, lam):
        return self.Dnu / (2.0 * (lam + self.nu)) + self.P2(-self.nu)

    def P_pole(self, i: int, lam):
        """Numerator of the third-kind differential with pole at u^i.

        Same construction as Pnu with -nu replaced by u^i; the additive
        normalization constant is P2(u^i).
        """
        ui = self.u[i]
        Di = self.R_prime_at_branch(i)
        return Di / (2.0 * (lam - ui)) + self.P2(ui)

    # -- quadrature ------------------------------------------------------------

    def moment(self, k: int, rtol: float = 1e-12) -> float:
        """a-cycle moment I_k = cycle(lambda^k / sqrt(R)), k <= 4."""
        if not 0 <= k <= 4:
            raise DomainError(f"moment order must be in 0..4, got {k}")
        u1, u2, u3 = self.u
        nu = self.nu
        return cycle_integral(lambda l: l ** k if k else np.ones_like(l),
                              u1, u2, lambda l: (l + nu) * (u3 - l), rtol=rtol)

    def cycle(self, f, rtol: float = 1e-12) -> float:
        """a-cycle integral of f(lambda)/sqrt(R) over the cut (u1, u2)."""
        u1, u2, u3 = self.u
        nu = self.nu
        return cycle_integral(f, u1, u2, lambda l: (l + nu) * (u3 - l), rtol=rtol)

    @cached_property
    def constants(self) -> CurveConstants:
        """Moments plus gamma constants, elliptic vs moment routes cross-checked."""
        I0 = self.moment(0)
        I1 = self.moment(1)
        I2 = self.moment(2)
        g1_m = -I1 / I0
        g2_m = -I2 / I0 + 0.5 * (self.S1 - self.nu) * I1 / I0
        g1, g2 = self._gammas
        scale = max(1.0, abs(g1), abs(g2))
        resid = max(abs(g1 - g1_m), abs(g2 - g2_m)) / scale
        if resid > 1e-6:
            raise ConsistencyError("curve.gamma_dual_path", resid, 1e-6)
        res_s1 = self.P1(-self.nu) ** 2 / float(
            np.prod([ui + self.nu for ui in self.u]))
        return CurveConstants(I0=I0, I1=I1, I2=I2, gamma1=g1, gamma2=g2,
                              residue_sigma1_sq=res_s1)

    # -- differential evaluation -------------------------------------------

    def _numerator(self, kind: DifferentialKind, lam):
        if kind is DifferentialKind.Sigma1:
            return self.P1(lam)
        if kind is DifferentialKind.Sigma2:
            return self.P2(lam)
        if kind is DifferentialKind.OmegaNu:
            return self.Pnu(lam)
        if kind is DifferentialKind.Phi:
            return 1.0 / self.I0_closed
        raise DomainError(f"unknown differential kind {kind!r}")

    def eval_differential(self, kind: DifferentialKind, lam: float):
        """Density P(lambda)/sqrt(R) (real where R > 0, else principal complex)."""
        pts = [-self.nu, *self.u]
        if min(abs(lam - p) for p in pts) < 1e-12 * max(1.0, abs(lam)):
            raise DomainError(f"lambda = {lam} is at a branch point")
        if kind is DifferentialKind.OmegaNu and abs(lam + self.nu) < 1e-9:
            raise DomainError("OmegaNu has a pole at lambda = -nu")
        root = scimath.sqrt(self.R(lam))
        val = self._numerator(kind, lam) / root
        return float(val.real) if abs(val.imag) == 0.0 else complex(val)

    def eval_at_branch(self, kind: DifferentialKind, i: int):
        """Local value at a branch point, coordinate t^2 = lambda - p.

        i in {0, 1, 2} selects u^i; i = NU_BRANCH selects lambda = -nu.
        Value = 2 P(p) / sqrt(R'(p)), principal complex branch, with the
        extra 1/I0 for Phi.
        """
        p = -self.nu if i == NU_BRANCH else self.u[i]
        if kind is DifferentialKind.OmegaNu and i == NU_BRANCH:
            raise DomainError("OmegaNu is singular at its own pole lambda = -nu")
        num = self._numerator(kind, p)
        return complex(2.0 * num / scimath.sqrt(self.R_prime_at_branch(i)))

    def eval_pole_at_branch(self, i: int, j: int):
        """Local value at u^j of the third-kind differential with pole at u^i."""
        if i == j:
            raise DomainError("third-kind differential is singular at its pole")
        return complex(2.0 * self.P_pole(i, self.u[j])
                       / scimath.sqrt(self.R_prime_at_branch(j)))

    # -- normalization checks ------------------------------------------------

    def normalization_residuals(self) -> dict:
        """a-period residuals of the four normalized differentials.

        Sigma1, Sigma2, OmegaNu must have zero a-period; Phi has a-period 1.
        """
        c = self.constants
        r_s1 = self.cycle(self.P1) / max(1.0, abs(c.I1))
        r_s2 = self.cycle(self.P2) / max(1.0, abs(c.I2))
        r_om = self.cycle(self.Pnu)
        r_phi = c.I0 / self.I0_closed - 1.0
        return {
            "sigma1": abs(r_s1),
            "sigma2": abs(r_s2),
            "omega_nu": abs(r_om),
            "phi": abs(r_phi),
        }

    def pole_normalization(self, i: int):
        """a-period constant for the pole-at-u^i differential, by reduction.

        The pole sits on or at the a-cut, so the period of the singular part
        D_i/(2(lambda-u^i)sqrt(R)) is rewritten through an exact form: with
        R_i = R/(lambda-u^i) it equals the period of
        [R_i' - (R_i - D_i)/(lambda-u^i)] / (2 sqrt(R)), whose numerator is
        polynomial.  Returns (reduction-route constant, P2(u^i)); the two
        agree to quadrature accuracy.
        """
        p = self.u[i]
        others = [-self.nu] + [self.u[j] for j in range(3) if j != i]
        Di = self.R_prime_at_branch(i)
        monic = np.poly(others)
        diff = monic.copy()
        diff[-1] -= Di
        quot = np.polydiv(diff, np.array([1.0, -p]))[0]
        dmonic = np.polyder(monic)

        def integrand(l):
            return 0.5 * (np.polyval(dmonic, l) - np.polyval(quot, l))

        A = self.cycle(integrand)
        return -A / self.constants.I0, self.P2(p)


def shifted_curve(curve: ChCurve, i: int, h: float) -> ChCurve:
    """Curve with u^i displaced by h (finite-difference helper)."""
    u = list(curve.u)
    u[i] += h
    return ChCurve(curve.nu, tuple(u), eps_c=curve.eps_c)


def variational_residuals(curve: ChCurve, h: float | None = None) -> dict:
    """Central-difference residuals of the branch-motion derivative laws.

    With hatted values v = 2P(p)/sqrt(R'(p)) in the local coordinate
    t^2 = lambda - p (principal complex branch) and W_p the second-kind
    differential of unit principal part at p, so that Omega_nu has strength
    sqrt(R'(-nu)) and Omega_{u^i} has strength sqrt(R'(u^i)):

        d gamma1 / d u^i = -1/2 + (1/4) sigma1(u^i) sigma2(u^i)
        d gamma2 / d u^i = (S1 - nu)/4 - u^i/2 + (1/4) sigma2(u^i)^2
        d phi(-nu)    / d u^i = (1/2) phi(u^i)    Omega_nu(u^i) / sqrt(R'(-nu))
        d sigma1(-nu) / d u^i = (1/2) sigma1(u^i) Omega_nu(u^i) / sqrt(R'(-nu))
        d Omega_nu(u^j) / d u^i
            = (1/2) Omega_nu(u^i) Omega_{u^i}(u^j) / sqrt(R'(u^i))
              + (1/2) Omega_nu(u^j) / (u^i + nu)

    The last term is the variation of Omega_nu's own pole strength.  Returns
    the max relative residual per law.
    """
    u1, u2, u3 = curve.u
    gaps = [u1 + curve.nu, u2 - u1, u3 - u2]
    if h is None:
        h = 1e-6 * max(1.0, max(abs(x) for x in curve.u))
    h = min(h, 0.1 * min(gaps))
    out = {"gamma1": 0.0, "gamma2": 0.0, "phi": 0.0, "sigma1": 0.0,
           "omega": 0.0}

    def rel(fd, closed):
        return abs(fd - closed) / max(1.0, abs(closed))

    for i in range(3):
        cp = shifted_curve(curve, i, h)
        cm = shifted_curve(curve, i, -h)
        s1 = curve.eval_at_branch(DifferentialKind.Sigma1, i)
        s2 = curve.eval_at_branch(DifferentialKind.Sigma2, i)
        om_i = curve.eval_at_branch(DifferentialKind.OmegaNu, i)
        root_nu = scimath.sqrt(curve.R_prime_at_branch(NU_BRANCH))
        root_i = scimath.sqrt(curve.R_prime_at_branch(i))

        fd = (cp.gamma1 - cm.gamma1) / (2.0 * h)
        out["gamma1"] = max(out["gamma1"], rel(fd, -0.5 + 0.25 * (s1 * s2)))
        fd = (cp.gamma2 - cm.gamma2) / (2.0 * h)
        closed = (0.25 * (curve.S1 - curve.nu) - 0.5 * curve.u[i]
                  + 0.25 * s2 * s2)
        out["gamma2"] = max(out["gamma2"], rel(fd, closed))

        for key, kind in (("phi", DifferentialKind.Phi),
                          ("sigma1", DifferentialKind.Sigma1)):
            fd = (cp.eval_at_branch(kind, NU_BRANCH)
                  - cm.eval_at_branch(kind, NU_BRANCH)) / (2.0 * h)
            closed = (0.5 * curve.eval_at_branch(kind, i) * om_i / root_nu)
            out[key] = max(out[key], rel(fd, closed))

        for j in range(3):
            if j == i:
                continue
            fd = (cp.eval_at_branch(DifferentialKind.OmegaNu, j)
                  - cm.eval_at_branch(DifferentialKind.OmegaNu, j)) / (2.0 * h)
            closed = (0.5 * om_i * curve.eval_pole_at_branch(i, j) / root_i
                      + 0.5 * curve.eval_at_branch(DifferentialKind.OmegaNu, j)
                      / (curve.u[i] + curve.nu))
            out["omega"] = max(out["omega"], rel(fd, closed))
    return out
