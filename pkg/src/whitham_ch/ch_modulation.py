"""One-phase modulation data: wave number, frequency, speeds, densities.

The characteristic speeds come from three routes:
  * explicit complete-elliptic expressions (production),
  * the residue/product form S1 + 2 nu - P1(-nu) prod(u^i-u^j) / Pnu(u^i),
    cross-checked against the first on every call,
  * the kinematic definition d(omega)/d(k) by finite differences, exposed
    as a diagnostic oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve import ChCurve, shifted_curve
from .errors import ConsistencyError, InvalidCurveError

_DUAL_TOL = 1e-7  # wavenumber route disagreement that raises
_SPEED_TOL = 1e-9  # elliptic vs residue-form speed disagreement that raises


@dataclass(frozen=True)
class ChSpeeds:
    C: tuple  # (C1, C2, C3)


@dataclass(frozen=True)
class TravelingWave:
    c: float
    A: float
    B: float
    k: float
    omega: float
    e: tuple  # roots e1 > e2 > e3 of the wave cubic


@dataclass(frozen=True)
class ChDensities:
    xi0: float
    xi1: float
    xi2: float
    h0: float
    h1: float
    h2: float
    h_neg1: float


def wavenumber(curve: ChCurve, check: bool = True) -> float:
    """Wave number k > 0; moment route and branch-value route cross-checked."""
    k_closed = -2.0 * math.pi / (curve.I0_closed * curve.P1(-curve.nu))
    if check:
        k_quad = 2.0 * math.pi / curve.cycle(lambda l: l + curve.nu)
        resid = abs(k_quad / k_closed - 1.0)
        if resid > _DUAL_TOL:
            raise ConsistencyError("ch_modulation.wavenumber_dual_path",
                                   resid, _DUAL_TOL)
    return k_closed


def frequency(curve: ChCurve, check: bool = True) -> float:
    return (2.0 * curve.nu + curve.S1) * wavenumber(curve, check=check)


def _speeds_elliptic(curve: ChCurve) -> np.ndarray:
    u1, u2, u3 = curve.u
    nu = curve.nu
    K, E, Lam = curve._KEL
    S = u1 + u2 + u3 + 2.0 * nu
    C1 = S + 2.0 * (u1 + nu) * (u1 - u2) * Lam / ((u2 + nu) * (K - E))
    C2 = S + 2.0 * (u2 - u1) * Lam / (
        K - (u2 + nu) * (u3 - u1) / ((u1 + nu) * (u3 - u2)) * E)
    C3 = S + 2.0 * (u1 + nu) * (u3 - u2) * Lam / ((u2 + nu) * E)
    return np.array([C1, C2, C3])


def _speeds_residue(curve: ChCurve) -> np.ndarray:
    nu = curve.nu
    out = []
    for i in range(3):
        prod = float(np.prod([curve.u[i] - curve.u[j] for j in range(3) if j != i]))
        out.append(curve.S1 + 2.0 * nu
                   - curve.P1(-nu) / curve.Pnu(curve.u[i]) * prod)
    return np.array(out)


def speeds(curve: ChCurve, check: bool = True) -> ChSpeeds:
    """Characteristic speeds (C1, C2, C3).

    Production values are the explicit elliptic forms; the residue/product
    route is recomputed and compared on every call unless check=False.
    The ordering facts C1 < C3 and C2 < C3 are enforced.
    """
    Ce = _speeds_elliptic(curve)
    if check:
        Cr = _speeds_residue(curve)
        resid = float(np.max(np.abs(Ce - Cr)))
        if resid > _SPEED_TOL * max(1.0, float(np.max(np.abs(Ce)))):
            raise ConsistencyError("ch_modulation.speeds_dual_route",
                                   resid, _SPEED_TOL)
    if not (Ce[0] < Ce[2] and Ce[1] < Ce[2]):
        raise InvalidCurveError(
            f"hyperbolicity ordering C1 < C3, C2 < C3 violated: C = {tuple(Ce)}")
    return ChSpeeds(C=tuple(float(c) for c in Ce))


def speeds_fd(curve: ChCurve, h: float | None = None) -> np.ndarray:
    """Kinematic speeds d_i(omega)/d_i(k) by central differences (diagnostic)."""
    u = curve.u
    nu = curve.nu
    if h is None:
        gaps = [u[0] + nu, u[1] - u[0], u[2] - u[1]]
        h = min(1e-6 * max(1.0, max(abs(x) for x in u)), 0.1 * min(gaps))
    out = []
    for i in range(3):
        cp = shifted_curve(curve, i, +h)
        cm = shifted_curve(curve, i, -h)
        kp, km = wavenumber(cp, check=False), wavenumber(cm, check=False)
        wp = (2.0 * nu + cp.S1) * kp
        wm = (2.0 * nu + cm.S1) * km
        out.append((wp - wm) / (kp - km))
    return np.array(out)


def traveling_wave(curve: ChCurve, check: bool = True) -> TravelingWave:
    """Constants of the periodic wave matched to the curve.

    The wave cubic eta^3 - (c - 2 nu) eta^2 + 2 B eta - 2 A has roots
    e1 > e2 > e3 related to the invariants by half sums
    u1 = (e2+e3)/2, u2 = (e1+e3)/2, u3 = (e1+e2)/2.
    """
    u1, u2, u3 = curve.u
    nu = curve.nu
    e1 = -u1 + u2 + u3
    e2 = u1 - u2 + u3
    e3 = u1 + u2 - u3
    c = e1 + e2 + e3 + 2.0 * nu
    B = 0.5 * (e1 * e2 + e1 * e3 + e2 * e3)
    A = 0.5 * e1 * e2 * e3
    k = wavenumber(curve, check=False)
    om = (2.0 * nu + curve.S1) * k
    if check:
        # phase-speed identity: B c + nu c^2 - A = (Omega/K)^2 = 4 prod(u^i+nu)
        lhs = B * c + nu * c * c - A
        rhs = 4.0 * float(np.prod([ui + nu for ui in curve.u]))
        resid = abs(lhs - rhs) / max(1.0, abs(rhs))
        if resid > 1e-10:
            raise ConsistencyError("ch_modulation.traveling_wave_constant",
                                   resid, 1e-10)
    return TravelingWave(c=c, A=A, B=B, k=k, omega=om, e=(e1, e2, e3))


def _series_coefficients(curve: ChCurve) -> tuple:
    """Large-lambda coefficients of the OmegaNu density lambda^2 P_nu/sqrt(R).

    Built from polynomial coefficients: with R = lambda^4 (1 + a/l + b/l^2 +
    ...), the binomial series of (1+x)^(-1/2) to third order gives
    lambda^2/sqrt(R) = 1 + A1/l + A2/l^2 + ..., and the geometric series of
    the pole term 1/(l + nu) supplies the rest.
    """
    nu = curve.nu
    S1, S2 = curve.S1, curve.S2
    a = nu - S1
    b = S2 - nu * S1
    # (1 + x)^(-1/2) = 1 - x/2 + 3 x^2/8 - ...
    A1 = -a / 2.0
    A2 = -b / 2.0 + 3.0 * a * a / 8.0
    P2n = curve.P2(-nu)
    half_D = curve.Dnu / 2.0
    coeff0 = P2n
    coeff1 = P2n * A1 + half_D
    coeff2 = P2n * A2 + half_D * (A1 - nu)
    return coeff0, coeff1, coeff2


def densities(curve: ChCurve, check: bool = True) -> ChDensities:
    """Averaged Hamiltonian densities from the large-lambda expansion.

    xi_k are the series coefficients normalized by -P1(-nu); the h ladder is
    h0 = 2 xi0 - nu, h1 = 2 xi1 + 2 nu xi0, h2 = 8/3 xi2 + 6 nu xi1.
    h0 is cross-checked against its direct branch-value form.
    """
    nu = curve.nu
    p1 = curve.P1(-nu)
    coeffs = _series_coefficients(curve)
    xi0, xi1, xi2 = (-c / p1 for c in coeffs)
    h0 = 2.0 * xi0 - nu
    h1 = 2.0 * xi1 + 2.0 * nu * xi0
    h2 = 8.0 / 3.0 * xi2 + 6.0 * nu * xi1
    if check:
        h0_direct = -2.0 * curve.P2(-nu) / p1 - nu
        resid = abs(h0 - h0_direct) / max(1.0, abs(h0_direct))
        if resid > 1e-9:
            raise ConsistencyError("ch_modulation.h0_dual_path", resid, 1e-9)
    res_s1 = curve.P1(-nu) ** 2 / float(np.prod([ui + nu for ui in curve.u]))
    h_neg1 = 1.0 - nu / math.sqrt(res_s1)
    return ChDensities(xi0=xi0, xi1=xi1, xi2=xi2,
                       h0=h0, h1=h1, h2=h2, h_neg1=h_neg1)


def density_fit_residual(curve: ChCurve) -> float:
    """Max relative gap between the symbolic series coefficients and a
    numerical fit of lambda^2 P_nu/sqrt(R) at large lambda.

    Probes lambda in [1e3, 1e5] and fits six descending powers; the three
    guard terms keep the lambda^-3 tail out of the leading coefficients.
    """
    lams = np.array([1e3, 1.4e3, 2e3, 3e3, 5e3, 1e4, 3e4, 1e5])
    y = 1e3 / lams
    G = np.array([curve.Pnu(l) / math.sqrt(curve.R(l)) * l * l for l in lams])
    V = np.column_stack([y ** k for k in range(6)])
    coef, *_ = np.linalg.lstsq(V, G, rcond=None)
    fitted = tuple(coef[k] * 1e3 ** k for k in range(3))
    sym = _series_coefficients(curve)
    return max(abs(f - s) / max(1.0, abs(s)) for f, s in zip(fitted, sym))


def sign_facts(curve: ChCurve) -> dict:
    """Structural sign facts used across the geometry: all must be True."""
    nu = curve.nu
    u1, u2, u3 = curve.u
    p1 = curve.P1(-nu)
    return {
        "P1_at_minus_nu_negative": p1 < 0.0,
        "Pnu_u1_negative": curve.Pnu(u1) < 0.0,
        "Pnu_u2_positive": curve.Pnu(u2) > 0.0,
        "Pnu_u3_gt_Pnu_u2": curve.Pnu(u3) > curve.Pnu(u2),
        "sigma1_zero_in_gap": u1 < -curve.gamma1 < u2,
    }
