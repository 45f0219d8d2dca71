"""Modulation data of the first negative flow on the cubic spectral curve.

The curve is w^2 = (eta - b1)(eta - b2)(eta - b3) with 0 < b1 < b2 < b3 and
a-cycle over the upper band (b2, b3).  The normalized quasi-momentum fixes
alpha1 = -<eta> and the weight-minus-one differential fixes
alpha0 = -<1/eta>; both averages have closed elliptic forms that the
quadrature route cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import special_functions as sf
from ._quadrature import cycle_integral
from .errors import ConsistencyError, DomainError, InvalidCurveError
from .metric_geometry import CurvatureReport, _riemann

_NORM_TOL = 1e-10  # quadrature vs closed normalization residual gate
_FIT_GATE = 1e-7  # interpolation residual gate in the fit report

# sign of the closed-form Casimir gradient, fixed by the harmonic limit
# b2 -> b3 where H0 -> sqrt(b1)
_GRAD_SIGN = -1.0


@dataclass(frozen=True)
class KdvCurve:
    """Ascending positive edges (b1, b2, b3) of the cubic curve."""

    beta: tuple
    eps_c: float = 1e-9

    def __post_init__(self):
        b = tuple(float(x) for x in self.beta)
        object.__setattr__(self, "beta", b)
        if len(b) != 3:
            raise InvalidCurveError(f"expected 3 edges, got {len(b)}")
        for x in b:
            if not math.isfinite(x):
                raise InvalidCurveError(f"invariant finite edges violated: {b}")
        if not b[0] > self.eps_c:
            raise InvalidCurveError(
                f"invariant b1 > {self.eps_c:g} violated: b1 = {b[0]!r}")
        for i in (0, 1):
            if not b[i + 1] - b[i] > self.eps_c:
                raise InvalidCurveError(
                    f"invariant b{i + 2} - b{i + 1} > {self.eps_c:g} violated: "
                    f"gap = {b[i + 1] - b[i]!r}")

    @property
    def B(self) -> float:
        return self.beta[0] * self.beta[1] * self.beta[2]

    @property
    def e1(self) -> float:
        return self.beta[0] + self.beta[1] + self.beta[2]

    @property
    def e2(self) -> float:
        b1, b2, b3 = self.beta
        return b1 * b2 + b1 * b3 + b2 * b3

    @property
    def m(self) -> float:
        b1, b2, b3 = self.beta
        return (b3 - b2) / (b3 - b1)

    @cached_property
    def _KEP(self) -> tuple:
        b1, b2, b3 = self.beta
        m = self.m
        n = (b3 - b2) / b3
        return (sf.elliptic_K(m), sf.elliptic_E(m),
                sf.elliptic_Pi_complete(n, m))

    @cached_property
    def J0_closed(self) -> float:
        b1, _, b3 = self.beta
        return 4.0 * self._KEP[0] / math.sqrt(b3 - b1)

    @cached_property
    def alpha1(self) -> float:
        b1, _, b3 = self.beta
        K, E, _ = self._KEP
        return -(b1 + (b3 - b1) * E / K)

    @cached_property
    def alpha0(self) -> float:
        _, _, b3 = self.beta
        K, _, P = self._KEP
        return -P / (b3 * K)

    @property
    def kappa(self) -> float:
        return 2.0 * math.pi / self.J0_closed

    @property
    def omega(self) -> float:
        return 4.0 * math.pi / (self.J0_closed * math.sqrt(self.B))

    def cycle(self, f) -> float:
        """Cycle integral 2 int_{b2}^{b3} f / sqrt(-R) over the upper band."""
        b1, b2, b3 = self.beta
        return cycle_integral(f, b2, b3, lambda e: e - b1)

    def normalization_residuals(self) -> dict:
        """Quadrature residuals of the two normalized differentials."""
        J0 = self.cycle(lambda e: np.ones_like(e))
        a1, a0 = self.alpha1, self.alpha0
        scale = self.J0_closed * max(1.0, self.beta[2])
        return {
            "j0": abs(J0 / self.J0_closed - 1.0),
            "dp": abs(self.cycle(lambda e: e + a1)) / scale,
            "lambda0": abs(self.cycle(lambda e: 1.0 / e + a0)) / scale,
        }

    def check(self) -> None:
        for name, resid in self.normalization_residuals().items():
            if resid > _NORM_TOL:
                raise ConsistencyError(f"kdv_modulation.normalization_{name}",
                                       resid, _NORM_TOL)


def _offdiag_product(beta: tuple, i: int) -> float:
    return float(np.prod([beta[i] - beta[j] for j in range(3) if j != i]))


def neg_speeds(curve: KdvCurve, check: bool = True,
               h: float = 1e-6) -> np.ndarray:
    """Characteristic speeds of the first negative flow.

    v^i = (2/sqrt(B)) (1 - prod_{j!=i}(b^i-b^j) / (b^i (b^i + alpha1))),
    cross-checked against the kinematic ratio d_i(omega)/d_i(kappa).
    """
    b = curve.beta
    sB = math.sqrt(curve.B)
    a1 = curve.alpha1
    v = np.array([2.0 / sB * (1.0 - _offdiag_product(b, i) / (b[i] * (b[i] + a1)))
                  for i in range(3)])
    if check:
        vfd = neg_speeds_fd(curve, h=h)
        resid = float(np.max(np.abs(v - vfd)) / max(1.0, float(np.max(np.abs(v)))))
        if resid > 1e-5:
            raise ConsistencyError("kdv_modulation.neg_speeds_kinematic",
                                   resid, 1e-5)
    return v


def neg_speeds_fd(curve: KdvCurve, h: float = 1e-6) -> np.ndarray:
    """Kinematic speeds d_i(omega)/d_i(kappa) by central differences."""
    b = curve.beta
    gaps = [b[0], b[1] - b[0], b[2] - b[1]]
    h = min(h, 0.1 * min(gaps))
    out = []
    for i in range(3):
        bp = list(b)
        bm = list(b)
        bp[i] += h
        bm[i] -= h
        cp, cm = KdvCurve(tuple(bp)), KdvCurve(tuple(bm))
        out.append((cp.omega - cm.omega) / (cp.kappa - cm.kappa))
    return np.array(out)


def pos_speeds(curve: KdvCurve) -> np.ndarray:
    """Characteristic speeds of the positive (dispersive shallow-water) flow."""
    b = curve.beta
    a1 = curve.alpha1
    return np.array([curve.e1 + 2.0 * _offdiag_product(b, i) / (b[i] + a1)
                     for i in range(3)])


def kdv_metric_signed(curve: KdvCurve, exponent: int) -> np.ndarray:
    """Signed diagonal entries; signature (+, -, +).

    Entry i is (b^i + alpha1)^2 / prod_{j!=i}(b^i - b^j) over the divisor
    2^(3-e) (b^i)^e for exponent e in {0, 1, 2, 3}.
    """
    if exponent not in (0, 1, 2, 3):
        raise DomainError(f"metric exponent must be 0, 1, 2 or 3, got {exponent!r}")
    b = curve.beta
    a1 = curve.alpha1
    out = np.empty(3)
    for i in range(3):
        res = (b[i] + a1) ** 2 / _offdiag_product(b, i)
        out[i] = res / (2.0 ** (3 - exponent) * b[i] ** exponent)
    return out


def kdv_metric(curve: KdvCurve, exponent: int) -> np.ndarray:
    return np.abs(kdv_metric_signed(curve, exponent))


def kdv_expected_curvature(curve: KdvCurve, exponent: int) -> np.ndarray:
    exp = np.zeros((3, 3))
    if exponent == 2:
        exp[~np.eye(3, dtype=bool)] = -0.5
    elif exponent == 3:
        w = pos_speeds(curve)
        for i in range(3):
            for j in range(3):
                if i != j:
                    exp[i][j] = -(w[i] + w[j]) / 8.0
    return exp


def kdv_rotation_fd(curve: KdvCurve, exponent: int,
                    h: float = 1e-6) -> np.ndarray:
    """Rotation coefficients of the positive cubic metric, by differences."""
    b = np.array(curve.beta)
    gaps = [curve.beta[0], curve.beta[1] - curve.beta[0],
            curve.beta[2] - curve.beta[1]]
    h = min(h, 0.1 * min(gaps))
    g0 = kdv_metric(curve, exponent)
    out = np.zeros((3, 3))
    for i in range(3):
        bp = b.copy()
        bm = b.copy()
        bp[i] += h
        bm[i] -= h
        gp = np.sqrt(kdv_metric(KdvCurve(tuple(float(x) for x in bp)),
                                exponent))
        gm = np.sqrt(kdv_metric(KdvCurve(tuple(float(x) for x in bm)),
                                exponent))
        for j in range(3):
            if j != i:
                out[i][j] = (gp[j] - gm[j]) / (2.0 * h) / math.sqrt(g0[i])
    return out


def _kdv_sec_off(curve: KdvCurve, exponent: int,
                 h: float) -> tuple[np.ndarray, float]:
    b = np.array(curve.beta)
    gfun = lambda bb: kdv_metric_signed(
        KdvCurve((float(bb[0]), float(bb[1]), float(bb[2]))), exponent)
    g0, riem = _riemann(gfun, b, h)
    sec = np.zeros((3, 3))
    off = 0.0
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            sec[i][j] = riem[i][j][i][j] / g0[j]
            for l in range(3):
                if l != j and l != i:
                    off = max(off, abs(riem[i][j][i][l] / g0[j]))
    return sec, off


def kdv_curvature(curve: KdvCurve, exponent: int,
                  h: float | None = None) -> CurvatureReport:
    if h is None:
        # the family is scale invariant, so the step must follow the
        # overall beta scale; pairing each step with its double cancels
        # the leading h^2 truncation term
        gaps = [curve.beta[0], curve.beta[1] - curve.beta[0],
                curve.beta[2] - curve.beta[1]]
        h = min(8e-5 * curve.beta[2], 0.05 * min(gaps))
        s1, off1 = _kdv_sec_off(curve, exponent, h)
        s2, off2 = _kdv_sec_off(curve, exponent, 2.0 * h)
        sec = (4.0 * s1 - s2) / 3.0
        off = max(off1, off2)
    else:
        sec, off = _kdv_sec_off(curve, exponent, h)
    exp = kdv_expected_curvature(curve, exponent)
    r = kdv_rotation_fd(curve, exponent)
    d = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            d = max(d, abs(r[i][j] - r[j][i]))
    return CurvatureReport(exponent=exponent, rotation=r, sectional=sec,
                           expected=exp,
                           max_error=float(np.max(np.abs(sec - exp))),
                           offdiagonal_residual=off, egorov_defect=d)


def varj0_residual(curve: KdvCurve, h: float = 1e-6) -> float:
    """Residual of d J0 / d b^i = -J0 (b^i+alpha1) / (2 prod_{j!=i}(b^i-b^j))."""
    b = curve.beta
    gaps = [b[0], b[1] - b[0], b[2] - b[1]]
    h = min(h, 0.1 * min(gaps))
    resid = 0.0
    for i in range(3):
        bp = list(b)
        bm = list(b)
        bp[i] += h
        bm[i] -= h
        fd = (KdvCurve(tuple(bp)).J0_closed
              - KdvCurve(tuple(bm)).J0_closed) / (2.0 * h)
        closed = (-0.5 * curve.J0_closed * (b[i] + curve.alpha1)
                  / _offdiag_product(b, i))
        resid = max(resid, abs(fd - closed) / max(1.0, abs(closed)))
    return resid


@dataclass(frozen=True)
class KdvHamiltonians:
    H0: float
    Hneg: tuple  # (H_{-1}, H_{-2}, H_{-3})
    N: float

    @property
    def Hm1(self) -> float:
        return self.Hneg[0]

    @property
    def Hm2(self) -> float:
        return self.Hneg[1]

    @property
    def Hm3(self) -> float:
        return self.Hneg[2]


def kdv_hamiltonians(curve: KdvCurve, nu: float = 0.0,
                     check: bool = True) -> KdvHamiltonians:
    """Casimir H0, the first three averaged negative densities, and N.

    H0 = -sqrt(B) alpha0 > 0.  The negative densities come from the Taylor
    coefficients at the origin of the weight-one Abelian integral:
    H_{-1} = -g(0), H_{-2} = -g'(0), H_{-3} = -(2/3) g''(0) with
    g(eta) = (eta + alpha1) / sqrt(prod (b^j - eta)).
    N = sum 1/b^i - nu + 2 alpha0; with check=True it is compared against
    the gradient route (1/2)(grad H0)^2 - nu built from central differences.
    """
    B = curve.B
    e1, e2 = curve.e1, curve.e2
    a1 = curve.alpha1
    sB = math.sqrt(B)
    g0 = a1 / sB
    gp0 = 1.0 / sB + 0.5 * a1 * e2 / B ** 1.5
    gpp0 = e2 / B ** 1.5 + a1 * (-e1 / B ** 1.5 + 0.75 * e2 ** 2 / B ** 2.5)
    H0 = -sB * curve.alpha0
    if not H0 > 0.0:
        raise ConsistencyError("kdv_modulation.casimir_positive", H0, 0.0)
    N = sum(1.0 / x for x in curve.beta) - nu + 2.0 * curve.alpha0
    if check:
        resid = gradient_identity_residual(curve, use_fd=True)
        if resid > 1e-7:
            raise ConsistencyError("kdv_modulation.nu_dual_route", resid, 1e-7)
    return KdvHamiltonians(H0=H0, Hneg=(-g0, -gp0, -(2.0 / 3.0) * gpp0), N=N)


def _casimir_gradient_fd(curve: KdvCurve, h: float) -> np.ndarray:
    b = curve.beta
    gaps = [b[0], b[1] - b[0], b[2] - b[1]]
    h = min(h, 0.1 * min(gaps))
    fd = np.empty(3)
    for i in range(3):
        bp = list(b)
        bm = list(b)
        bp[i] += h
        bm[i] -= h
        fd[i] = (kdv_hamiltonians(KdvCurve(tuple(bp)), check=False).H0
                 - kdv_hamiltonians(KdvCurve(tuple(bm)), check=False).H0) \
            / (2.0 * h)
    return fd


def casimir_gradient(curve: KdvCurve, check: bool = True,
                     h: float = 1e-6) -> np.ndarray:
    """Gradient of the Casimir H0 with respect to the edges."""
    b = curve.beta
    sB = math.sqrt(curve.B)
    a0, a1 = curve.alpha0, curve.alpha1
    g = np.array([_GRAD_SIGN * 0.5 * sB * (1.0 / b[i] + a0) * (b[i] + a1)
                  / _offdiag_product(b, i) for i in range(3)])
    if check:
        fd = _casimir_gradient_fd(curve, h)
        resid = float(np.max(np.abs(g - fd)) / max(1.0, float(np.max(np.abs(g)))))
        if resid > 1e-5:
            raise ConsistencyError("kdv_modulation.casimir_gradient_fd",
                                   resid, 1e-5)
    return g


def gradient_identity_residual(curve: KdvCurve, use_fd: bool = True,
                               h: float = 1e-6) -> float:
    """Residual of sum_i (4/res_i) (d_i H0)^2 = sum 1/b^i + 2 alpha0.

    res_i is the exponent-free metric numerator; with use_fd the gradient
    comes from central differences so the identity is a genuine cross-check
    of metric, Casimir and normalization at once.
    """
    b = curve.beta
    a1 = curve.alpha1
    if use_fd:
        grad = _casimir_gradient_fd(curve, h)
    else:
        grad = casimir_gradient(curve, check=False)
    lhs = 0.0
    for i in range(3):
        res = (b[i] + a1) ** 2 / _offdiag_product(b, i)
        lhs += 4.0 / res * grad[i] ** 2
    rhs = sum(1.0 / x for x in b) + 2.0 * curve.alpha0
    return abs(lhs - rhs) / max(1.0, abs(rhs))


@dataclass(frozen=True)
class FitReport:
    nodes: tuple
    values: tuple
    coefficients: tuple  # cubic Taylor model of the truncated integral
    decoded: tuple  # (H0, H_{-1}, H_{-2}, H_{-3}) read off the coefficients
    closed: tuple
    errors: tuple  # relative, per density
    interpolation_residual: float
    weight_one_consistent: bool


def _weight_one_integral(curve: KdvCurve, eta: float, n: int = 256) -> float:
    """int_eta^{b1} (xi + alpha1) dxi / sqrt((b1-xi)(b2-xi)(b3-xi)).

    The endpoint root at b1 is removed by xi = b1 - s^2; the smooth result
    is integrated by Gauss-Legendre with order doubling.
    """
    b1, b2, b3 = curve.beta
    a1 = curve.alpha1
    smax = math.sqrt(b1 - eta)

    def f(s):
        xi = b1 - s * s
        return 2.0 * (xi + a1) / np.sqrt((b2 - xi) * (b3 - xi))

    prev = None
    while n <= 4096:
        x, w = np.polynomial.legendre.leggauss(n)
        s = 0.5 * smax * (x + 1.0)
        cur = 0.5 * smax * float(np.sum(w * f(s)))
        if prev is not None and abs(cur - prev) <= 1e-13 * max(1.0, abs(cur)):
            return cur
        prev = cur
        n *= 2
    return prev


def hamiltonian_fit_report(curve: KdvCurve,
                           nodes: tuple = (1e-2, 5e-3, 2.5e-3, 1e-3)) -> FitReport:
    """Decode the density ladder from small-eta values of the truncated
    weight-one integral and compare with the closed forms (diagnostic)."""
    vals = [_weight_one_integral(curve, t) for t in nodes]
    V = np.vander(np.array(nodes), 4, increasing=True)
    c = np.linalg.solve(V, np.array(vals))
    resid = float(np.max(np.abs(V @ c - np.array(vals))))
    if resid > _FIT_GATE * max(1.0, float(np.max(np.abs(vals)))):
        raise ConsistencyError("kdv_modulation.fit_interpolation", resid,
                               _FIT_GATE)
    ham = kdv_hamiltonians(curve, check=False)
    closed = (ham.H0,) + ham.Hneg
    decoded = (-0.5 * float(c[0]), float(c[1]), 2.0 * float(c[2]),
               4.0 * float(c[3]))
    errs = tuple(abs(d - e) / max(1.0, abs(e))
                 for d, e in zip(decoded, closed))
    return FitReport(nodes=tuple(nodes), values=tuple(vals),
                     coefficients=tuple(float(x) for x in c),
                     decoded=decoded, closed=closed, errors=errs,
                     interpolation_residual=resid,
                     weight_one_consistent=errs[0] < 1e-3)
