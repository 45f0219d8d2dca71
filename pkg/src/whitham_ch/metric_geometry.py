"""Diagonal metrics of the modulation system and their differential geometry.

A one-parameter family of diagonal metrics is indexed by an integer exponent
e in {0, 1, 2, 3}; consecutive members differ by the divisor 2(u^i + nu).
The signed family has signature (+, -, +) and constant sectional curvature
pattern {0, 0, -1, -2 nu - C^i - C^j}; the entrywise positive family is the
one used for rotation coefficients and Tsarev relations.  Curvature is
computed by a finite-difference Christoffel engine; the step is pinned at
1e-4 because smaller steps are roundoff dominated for these entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ch_modulation import speeds
from .curve import ChCurve
from .errors import ConsistencyError, DomainError

_CURV_STEP = 1e-4
_ROTATION_FD_TOL = 1e-5

# sign of the closed-form rotation coefficient r[i][j]; constant across the
# admissible region and all four exponents
_ROTATION_SIGN = np.array([[0.0, -1.0, -1.0],
                           [1.0, 0.0, -1.0],
                           [-1.0, 1.0, 0.0]])

# power of (u^j+nu)/(u^i+nu) in the closed form, halved, per exponent
_ROTATION_KPOW = {0: 1.0, 1: 0.0, 2: -1.0, 3: -2.0}


def _check_exponent(exponent: int) -> None:
    if exponent not in (0, 1, 2, 3):
        raise DomainError(f"metric exponent must be 0, 1, 2 or 3, got {exponent!r}")


def metric_signed(curve: ChCurve, exponent: int) -> np.ndarray:
    """Signed diagonal entries; signature (+, -, +) from R'(u^i)."""
    _check_exponent(exponent)
    nu = curve.nu
    out = np.empty(3)
    for i in range(3):
        ui = curve.u[i]
        Di = curve.R_prime_at_branch(i)
        base = 4.0 * (ui + nu) * curve.Pnu(ui) ** 2 / (Di * curve.P1(-nu) ** 2)
        out[i] = base / (2.0 * (ui + nu)) ** exponent
    return out


def metric(curve: ChCurve, exponent: int) -> np.ndarray:
    """Entrywise positive diagonal entries.

    This is the object entering rotation coefficients and Tsarev relations.
    Stripping the signs destroys the constant-curvature tables; those are
    stated for the signed family.
    """
    return np.abs(metric_signed(curve, exponent))


def _metric_at(nu: float, u_arr: np.ndarray, exponent: int) -> np.ndarray:
    return metric_signed(ChCurve(nu, (float(u_arr[0]), float(u_arr[1]),
                                      float(u_arr[2]))), exponent)


def _christoffel(gfun, u: np.ndarray, h: float):
    """Diagonal-metric Christoffel symbols Gam[a][b][c] = Gamma^a_{bc}."""
    g = gfun(u)
    dg = np.empty((3, 3))  # dg[l][i] = d g_ii / d u^l
    for l in range(3):
        up = u.copy()
        um = u.copy()
        up[l] += h
        um[l] -= h
        dg[l] = (gfun(up) - gfun(um)) / (2.0 * h)
    gam = np.zeros((3, 3, 3))
    for a in range(3):
        for b in range(3):
            for c in range(3):
                val = 0.0
                if a == b:
                    val += dg[c][a]
                if a == c:
                    val += dg[b][a]
                if b == c:
                    val -= dg[a][b]
                gam[a][b][c] = val / (2.0 * g[a])
    return g, gam


def _riemann(gfun, u: np.ndarray, h: float):
    """Full curvature tensor R^i_{jkl} of a diagonal metric, by nested FD."""
    g0, gam0 = _christoffel(gfun, u, h)
    dgam = np.empty((3, 3, 3, 3))  # dgam[k] = d Gamma / d u^k
    for k in range(3):
        up = u.copy()
        um = u.copy()
        up[k] += h
        um[k] -= h
        gp = _christoffel(gfun, up, h)[1]
        gm = _christoffel(gfun, um, h)[1]
        dgam[k] = (gp - gm) / (2.0 * h)
    riem = np.zeros((3, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    val = dgam[k][i][l][j] - dgam[l][i][k][j]
                    for p in range(3):
                        val += (gam0[i][k][p] * gam0[p][l][j]
                                - gam0[i][l][p] * gam0[p][k][j])
                    riem[i][j][k][l] = val
    return g0, riem


@dataclass(frozen=True)
class CurvatureReport:
    exponent: int
    rotation: np.ndarray  # r[i][j] = d_i sqrt(g_jj) / sqrt(g_ii)
    sectional: np.ndarray  # sec[i][j] = R^i_{jij} / g_jj, zero diagonal
    expected: np.ndarray
    max_error: float
    offdiagonal_residual: float  # max |d_k r_ij - r_ik r_kj|, distinct i,j,k
    egorov_defect: float  # max |r_ij - r_ji|


def expected_curvature(curve: ChCurve, exponent: int) -> np.ndarray:
    """Constant-curvature pattern of the signed family."""
    _check_exponent(exponent)
    exp = np.zeros((3, 3))
    if exponent == 2:
        exp[~np.eye(3, dtype=bool)] = -1.0
    elif exponent == 3:
        C = speeds(curve, check=False).C
        for i in range(3):
            for j in range(3):
                if i != j:
                    exp[i][j] = -2.0 * curve.nu - C[i] - C[j]
    return exp


def curvature(curve: ChCurve, exponent: int,
              h: float | None = None) -> CurvatureReport:
    """Curvature data of one signed metric, from rotation coefficients.

    For a diagonal metric with entries g_ii = eps_i * H_i^2 the pair
    curvatures are

        sec_ij = -(eps_i d_i r_ij + eps_j d_j r_ji
                   + sum_{k != i,j} eps_k r_ki r_kj) / (H_i H_j)

    where r are the rotation coefficients of |g|.  One difference of the
    closed-form coefficients keeps roundoff near machine level; nested
    differences of the metric itself lose four digits on wide curves.
    The mixed components vanish exactly when d_k r_ij = r_ik r_kj for
    distinct indices, reported here as offdiagonal_residual.
    """
    _check_exponent(exponent)
    gaps = [curve.u[0] + curve.nu, curve.u[1] - curve.u[0],
            curve.u[2] - curve.u[1]]
    if h is None:
        h = min(1e-5, 0.01 * min(gaps))
    gs = metric_signed(curve, exponent)
    eps = np.sign(gs)
    H = np.sqrt(np.abs(gs))

    def rot(uu: np.ndarray) -> np.ndarray:
        shifted = ChCurve(curve.nu, (float(uu[0]), float(uu[1]),
                                     float(uu[2])))
        return rotation_coefficients(shifted, exponent, check=False)

    u0 = np.array(curve.u, dtype=float)
    r = rot(u0)
    dr = np.empty((3, 3, 3))  # dr[k][i][j] = d_k r_ij
    for k in range(3):
        up = u0.copy()
        um = u0.copy()
        up[k] += h
        um[k] -= h
        dr[k] = (rot(up) - rot(um)) / (2.0 * h)
    sec = np.zeros((3, 3))
    off = 0.0
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            cross = 0.0
            for k in range(3):
                if k != i and k != j:
                    cross += eps[k] * r[k][i] * r[k][j]
                    off = max(off, abs(dr[k][i][j] - r[i][k] * r[k][j]))
            sec[i][j] = -(eps[i] * dr[i][i][j] + eps[j] * dr[j][j][i]
                          + cross) / (H[i] * H[j])
    exp = expected_curvature(curve, exponent)
    d = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            d = max(d, abs(r[i][j] - r[j][i]))
    return CurvatureReport(exponent=exponent, rotation=r, sectional=sec,
                           expected=exp,
                           max_error=float(np.max(np.abs(sec - exp))),
                           offdiagonal_residual=off, egorov_defect=d)


def rotation_coefficients(curve: ChCurve, exponent: int,
                          check: bool = True, h: float = 1e-6) -> np.ndarray:
    """Rotation coefficients r[i][j] = d_i sqrt(g_jj) / sqrt(g_ii), i != j.

    Production values are closed-form; with check=True they are compared
    against the finite-difference definition applied to the positive metric.
    """
    _check_exponent(exponent)
    nu = curve.nu
    kpow = _ROTATION_KPOW[exponent]
    r = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            Di = curve.R_prime_at_branch(i)
            Dj = curve.R_prime_at_branch(j)
            bracket = (curve.P_pole(i, curve.u[j])
                       - curve.Pnu(curve.u[j]) * curve.P1(curve.u[i])
                       / curve.P1(-nu))
            ratio = (curve.u[j] + nu) / (curve.u[i] + nu)
            r[i][j] = (_ROTATION_SIGN[i][j] * ratio ** (0.5 * kpow)
                       * bracket / math.sqrt(abs(Di * Dj)))
    if check:
        fd = _rotation_fd(curve, exponent, h)
        resid = float(np.max(np.abs(r - fd)))
        if resid > _ROTATION_FD_TOL * max(1.0, float(np.max(np.abs(r)))):
            raise ConsistencyError("metric_geometry.rotation_closed_vs_fd",
                                   resid, _ROTATION_FD_TOL)
    return r


def _rotation_fd(curve: ChCurve, exponent: int, h: float) -> np.ndarray:
    u = np.array(curve.u, dtype=float)
    gaps = [curve.u[0] + curve.nu, curve.u[1] - curve.u[0],
            curve.u[2] - curve.u[1]]
    h = min(h, 0.1 * min(gaps))
    g0 = np.abs(_metric_at(curve.nu, u, exponent))
    out = np.zeros((3, 3))
    for i in range(3):
        up = u.copy()
        um = u.copy()
        up[i] += h
        um[i] -= h
        gp = np.sqrt(np.abs(_metric_at(curve.nu, up, exponent)))
        gm = np.sqrt(np.abs(_metric_at(curve.nu, um, exponent)))
        for j in range(3):
            if j != i:
                out[i][j] = (gp[j] - gm[j]) / (2.0 * h) / math.sqrt(g0[i])
    return out


def egorov_defect(curve: ChCurve, exponent: int) -> float:
    """Max asymmetry |r_ij - r_ji| of the rotation coefficients.

    An Egorov (potential) metric would make this zero; these metrics are not
    Egorov anywhere in the admissible region.
    """
    r = rotation_coefficients(curve, exponent, check=False)
    d = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            d = max(d, abs(r[i][j] - r[j][i]))
    return d


def tsarev_check(curve: ChCurve, exponent: int = 0,
                 h: float = 1e-6) -> float:
    """Residual of d_j C^i / (C^j - C^i) = d_j log sqrt(g_ii), i != j.

    The right side is exponent independent off the diagonal, since the
    divisor separating consecutive metrics depends on u^i alone.
    """
    _check_exponent(exponent)
    u = np.array(curve.u, dtype=float)
    gaps = [curve.u[0] + curve.nu, curve.u[1] - curve.u[0],
            curve.u[2] - curve.u[1]]
    h = min(h, 0.1 * min(gaps))
    C0 = np.array(speeds(curve, check=False).C)
    dC = np.empty((3, 3))  # dC[j][i] = d C^i / d u^j
    dlog = np.empty((3, 3))  # dlog[j][i] = d_j log sqrt(g_ii)
    for j in range(3):
        up = u.copy()
        um = u.copy()
        up[j] += h
        um[j] -= h
        cp = ChCurve(curve.nu, tuple(up))
        cm = ChCurve(curve.nu, tuple(um))
        dC[j] = (np.array(speeds(cp, check=False).C)
                 - np.array(speeds(cm, check=False).C)) / (2.0 * h)
        gp = np.abs(metric_signed(cp, exponent))
        gm = np.abs(metric_signed(cm, exponent))
        dlog[j] = (np.log(gp) - np.log(gm)) / (4.0 * h)
    resid = 0.0
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            if abs(C0[j] - C0[i]) < 1e-6:
                continue  # near-coalescent speed pair, quotient ill posed
            lhs = dC[j][i] / (C0[j] - C0[i])
            resid = max(resid, abs(lhs - dlog[j][i]))
    return resid


@dataclass(frozen=True)
class PencilReport:
    lam: float
    flat_residual: float | None  # curvature of the contravariant-sum member
    covariant_literal_residual: float | None  # the naive covariant sum
    skipped: bool = False
    notice: str | None = None


_PENCIL_LAMBDAS = (-1.0, 0.5, 1.0, 3.0)


def _one_pencil(curve: ChCurve, lam: float, h: float) -> PencilReport:
    nu = curve.nu
    for ui in curve.u:
        if abs(1.0 + 2.0 * lam * (ui + nu)) < 1e-6:
            return PencilReport(
                lam=lam, flat_residual=None, covariant_literal_residual=None,
                skipped=True,
                notice=f"parameter {lam} degenerates the pencil entry at "
                       f"u = {ui}: 1 + 2 lam (u + nu) vanishes")
        if abs(1.0 + lam / (ui + nu)) < 1e-4:
            return PencilReport(
                lam=lam, flat_residual=None, covariant_literal_residual=None,
                skipped=True,
                notice=f"parameter {lam} zeroes the covariant comparison "
                       f"entry at u = {ui}: 1 + lam / (u + nu) vanishes")
    u = np.array(curve.u, dtype=float)

    def g_contra(uu):
        g0 = _metric_at(nu, uu, 0)
        return g0 / (1.0 + 2.0 * lam * (uu + nu))

    def g_literal(uu):
        g0 = _metric_at(nu, uu, 0)
        return g0 * (1.0 + lam / (uu + nu))

    out = []
    for gfun in (g_contra, g_literal):
        g0, riem = _riemann(gfun, u, h)
        m = 0.0
        for i in range(3):
            for j in range(3):
                if i != j:
                    m = max(m, abs(riem[i][j][i][j] / g0[j]))
        out.append(m)
    return PencilReport(lam=lam, flat_residual=out[0],
                        covariant_literal_residual=out[1])


def pencil_check(curve: ChCurve, lambdas=_PENCIL_LAMBDAS,
                 h: float | None = None) -> list:
    """Flatness of the metric pencil across a list of parameters.

    The two flat members (exponents 0 and 1) combine contravariantly, which
    for diagonal metrics gives entries g0_ii / (1 + 2 lam (u^i + nu)).  That
    member is flat for every admissible lam.  The naive covariant combination
    g0_ii (1 + lam / (u^i + nu)) is recomputed alongside to show it is not.
    Parameters that make an entry degenerate are skipped with a notice.
    """
    u = np.array(curve.u, dtype=float)
    if h is None:
        gaps = [curve.u[0] + curve.nu, curve.u[1] - curve.u[0],
                curve.u[2] - curve.u[1]]
        h = min(_CURV_STEP, 0.05 * min(gaps))
    return [_one_pencil(curve, float(lam), h) for lam in lambdas]


@dataclass(frozen=True)
class AffinorReport:
    minus_residual: float  # sec_ij vs -(eta^i + eta^j)
    plus_residual: float  # sec_ij vs +(eta^i + eta^j)
    empirical_sign: int


def affinor_match(curve: ChCurve, h: float | None = None) -> AffinorReport:
    """Compare sec_ij against both signs of (eta^i + eta^j), eta^i = C^i + nu.

    The exponent-3 curvature table matches the minus sign; both residuals
    are reported and the better-matching sign is flagged.
    """
    rep = curvature(curve, 3, h=h)
    C = speeds(curve, check=False).C
    minus = 0.0
    plus = 0.0
    for i in range(3):
        for j in range(3):
            if i != j:
                eta = (C[i] + curve.nu) + (C[j] + curve.nu)
                minus = max(minus, abs(rep.sectional[i][j] + eta))
                plus = max(plus, abs(rep.sectional[i][j] - eta))
    return AffinorReport(minus_residual=minus, plus_residual=plus,
                         empirical_sign=-1 if minus <= plus else 1)
