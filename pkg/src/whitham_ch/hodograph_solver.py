"""Hodograph solution of the zero-depth modulation system.

The three Riemann invariants solve x = -C^i(u) t + w^i(u) where the
commuting flows w^i = q + (C^i - S1) d_i q come from a single potential q.
The potential is the symmetric double average of the initial profile f,

    q(u) = N0 int int f(w . u) dmu deta / sqrt((1 - mu)(1 - eta^2)),

with barycentric weights w1 = (1+mu)(1+eta)/4, w2 = (1+mu)(1-eta)/4,
w3 = (1-mu)/2 and N0 = 1/(2 sqrt(2) pi).  Gauss-Jacobi nodes absorb the
endpoint singularities, so q, its gradient (through f') and its Hessian
(through f'') are all spectral-accuracy quadratures with no differencing.

f is the inverse initial profile: at zero amplitude u1 = u2 = u3 = a the
solution collapses to x = f(a) at t = 0.

Everything here is for nu = 0; the invariants must stay positive.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import roots_jacobi

from .ch_modulation import _speeds_elliptic
from .curve import ChCurve
from .errors import DomainError, InvalidCurveError

_N0 = 1.0 / (2.0 * math.sqrt(2.0) * math.pi)
_GAP = 1e-8  # smallest admissible invariant separation inside Newton
_NEWTON_TOL = 1e-11
_NEWTON_OK = 1e-9


def thread_cap() -> int:
    """Thread budget from WHITHAM_CH_THREADS; execution is serial, which
    satisfies any cap of at least one."""
    raw = os.environ.get("WHITHAM_CH_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError:
        raise DomainError(f"WHITHAM_CH_THREADS must be an integer, got {raw!r}")
    if cap < 1:
        raise DomainError(f"WHITHAM_CH_THREADS must be >= 1, got {cap}")
    return cap


@dataclass(frozen=True)
class InitialData:
    """Monotone initial profile x = f(u) with two derivatives."""

    f: object
    fp: object
    fpp: object
    u_min: float
    u_max: float
    label: str = "callable"

    @classmethod
    def from_samples(cls, samples) -> "InitialData":
        """Shape-preserving interpolant through increasing (u, x) pairs."""
        pts = [(float(a), float(b)) for a, b in samples]
        if len(pts) < 3:
            raise DomainError(f"need at least 3 samples, got {len(pts)}")
        us = np.array([p[0] for p in pts])
        xs = np.array([p[1] for p in pts])
        if not np.all(np.diff(us) > 0.0):
            raise DomainError("sample u values must be strictly increasing")
        if not np.all(np.diff(xs) > 0.0):
            raise DomainError("sample x values must be strictly increasing")
        if us[0] <= 0.0:
            raise DomainError(
                f"invariants must stay positive, got u = {us[0]!r}")
        interp = PchipInterpolator(us, xs)
        return cls(f=interp, fp=interp.derivative(1), fpp=interp.derivative(2),
                   u_min=float(us[0]), u_max=float(us[-1]), label="samples")

    @classmethod
    def from_callable(cls, f, fp=None, fpp=None,
                      u_range=(0.05, 5.0), label="callable") -> "InitialData":
        lo, hi = float(u_range[0]), float(u_range[1])
        if not 0.0 < lo < hi:
            raise DomainError(f"u_range must satisfy 0 < lo < hi, got {u_range}")
        if fp is None:
            h1 = 1e-6
            fp = lambda s: (f(s + h1) - f(s - h1)) / (2.0 * h1)
        if fpp is None:
            h2 = 1e-4
            fpp = lambda s: (f(s + h2) - 2.0 * f(s) + f(s - h2)) / h2 ** 2
        return cls(f=f, fp=fp, fpp=fpp, u_min=lo, u_max=hi, label=label)

    def inverse(self, x: float) -> float:
        """Solve f(u) = x on the data range."""
        g = lambda s: float(self.f(s)) - x
        a, b = self.u_min, self.u_max
        if g(a) * g(b) > 0.0:
            raise DomainError(
                f"x = {x} is outside the initial profile range "
                f"[{float(self.f(a))}, {float(self.f(b))}]")
        return float(brentq(g, a, b, xtol=1e-13))


class EpdEngine:
    """Tensor-product Gauss-Jacobi evaluator of q and its derivatives."""

    def __init__(self, data: InitialData, n: int | None = None):
        self.data = data
        if n is None:
            n = self._probe_order()
        self.n = n
        self._build(n)

    def _build(self, n: int) -> None:
        xm, wm = roots_jacobi(n, -0.5, 0.0)  # weight (1 - mu)^(-1/2)
        xe, we = roots_jacobi(n, -0.5, -0.5)  # weight (1 - eta^2)^(-1/2)
        mu = np.repeat(xm, n)
        eta = np.tile(xe, n)
        wt = _N0 * np.repeat(wm, n) * np.tile(we, n)
        w1 = 0.25 * (1.0 + mu) * (1.0 + eta)
        w2 = 0.25 * (1.0 + mu) * (1.0 - eta)
        w3 = 0.5 * (1.0 - mu)
        self._w = (w1, w2, w3)
        self._wt = wt
        self._wtw = tuple(wt * wi for wi in self._w)
        self._wtww = {(i, j): wt * self._w[i] * self._w[j]
                      for i in range(3) for j in range(i, 3)}

    def _probe_order(self) -> int:
        lo, hi = self.data.u_min, self.data.u_max
        span = hi - lo
        probes = [(lo + 0.1 * span, lo + 0.45 * span, hi - 0.1 * span),
                  (lo + 0.2 * span, lo + 0.6 * span, hi - 0.05 * span)]
        prev = None
        n = 64
        while n <= 512:
            self._build(n)
            vals = np.array([self.q(np.array(p)) for p in probes])
            if prev is not None and np.max(np.abs(vals - prev)) \
                    <= 1e-11 * max(1.0, float(np.max(np.abs(vals)))):
                return n // 2
            prev = vals
            n *= 2
        return 512

    def _s(self, u) -> np.ndarray:
        w1, w2, w3 = self._w
        return w1 * u[0] + w2 * u[1] + w3 * u[2]

    def q(self, u) -> float:
        return float(np.dot(self._wt, self.data.f(self._s(u))))

    def grad(self, u) -> np.ndarray:
        fpv = self.data.fp(self._s(u))
        return np.array([float(np.dot(wtw, fpv)) for wtw in self._wtw])

    def hess(self, u) -> np.ndarray:
        fppv = self.data.fpp(self._s(u))
        out = np.empty((3, 3))
        for i in range(3):
            for j in range(i, 3):
                out[i][j] = out[j][i] = float(np.dot(self._wtww[(i, j)], fppv))
        return out

    def qgh(self, u):
        s = self._s(u)
        qv = float(np.dot(self._wt, self.data.f(s)))
        fpv = self.data.fp(s)
        g = np.array([float(np.dot(wtw, fpv)) for wtw in self._wtw])
        fppv = self.data.fpp(s)
        H = np.empty((3, 3))
        for i in range(3):
            for j in range(i, 3):
                H[i][j] = H[j][i] = float(np.dot(self._wtww[(i, j)], fppv))
        return qv, g, H


@lru_cache(maxsize=8)
def _cached_engine(data: InitialData) -> EpdEngine:
    return EpdEngine(data)


def as_engine(f) -> EpdEngine:
    """Accept raw initial data or a prebuilt engine in the operations."""
    return f if isinstance(f, EpdEngine) else _cached_engine(f)


def epd_q(f, u) -> float:
    return as_engine(f).q(np.asarray(u, dtype=float))


def epd_q_grad(f, u) -> np.ndarray:
    return as_engine(f).grad(np.asarray(u, dtype=float))


def epd_residual(f, u, h: float | None = None) -> float:
    """Max residual of d_i q - d_j q = 2 (u^i - u^j) d_i d_j q over pairs.

    Both sides are rebuilt from plain finite differences of q, independent
    of the quadrature gradient and Hessian routes.
    """
    engine = as_engine(f)
    u = np.asarray(u, dtype=float)
    if h is None:
        h = 1e-4 * max(1.0, float(np.max(np.abs(u))))

    def qs(du):
        return engine.q(u + du)

    e = np.eye(3)
    dq = [(qs(h * e[i]) - qs(-h * e[i])) / (2.0 * h) for i in range(3)]
    worst = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            cross = (qs(h * (e[i] + e[j])) - qs(h * (e[i] - e[j]))
                     - qs(h * (e[j] - e[i])) + qs(-h * (e[i] + e[j]))) \
                / (4.0 * h * h)
            worst = max(worst, abs((dq[i] - dq[j])
                                   - 2.0 * (u[i] - u[j]) * cross))
    return worst


def boundary_residual(f, a: float) -> float:
    """|q(a,a,a) - f(a)|: the average must collapse on the diagonal."""
    engine = as_engine(f)
    return abs(engine.q(np.array([a, a, a])) - float(engine.data.f(a)))


def _speeds_nu0(u) -> np.ndarray:
    return _speeds_elliptic(ChCurve(0.0, (float(u[0]), float(u[1]),
                                          float(u[2]))))


def _speeds_grad_nu0(u, h: float = 1e-6) -> tuple:
    u = np.asarray(u, dtype=float)
    gaps = [u[0], u[1] - u[0], u[2] - u[1]]
    h = min(h, 0.1 * min(gaps))
    C = _speeds_nu0(u)
    dC = np.empty((3, 3))  # dC[i][j] = d C^i / d u^j
    for j in range(3):
        up = u.copy()
        um = u.copy()
        up[j] += h
        um[j] -= h
        dC[:, j] = (_speeds_nu0(up) - _speeds_nu0(um)) / (2.0 * h)
    return C, dC


def commuting_speeds(f, u) -> np.ndarray:
    """w^i = q + (C^i - S1) d_i q."""
    engine = as_engine(f)
    u = np.asarray(u, dtype=float)
    qv = engine.q(u)
    g = engine.grad(u)
    C = _speeds_nu0(u)
    S1 = float(np.sum(u))
    return qv + (C - S1) * g


def tsarev1_residual(f, u, h: float = 1e-6) -> float:
    """Residual of d_j w^i / (w^i - w^j) = d_j C^i / (C^i - C^j)."""
    engine = as_engine(f)
    u = np.asarray(u, dtype=float)
    gaps = [u[0], u[1] - u[0], u[2] - u[1]]
    h = min(h, 0.1 * min(gaps))
    w0 = commuting_speeds(engine, u)
    C0 = _speeds_nu0(u)
    dw = np.empty((3, 3))
    dC = np.empty((3, 3))
    for j in range(3):
        up = u.copy()
        um = u.copy()
        up[j] += h
        um[j] -= h
        dw[:, j] = (commuting_speeds(engine, up)
                    - commuting_speeds(engine, um)) / (2.0 * h)
        dC[:, j] = (_speeds_nu0(up) - _speeds_nu0(um)) / (2.0 * h)
    worst = 0.0
    for i in range(3):
        for j in range(3):
            if i != j:
                worst = max(worst, abs(dw[i][j] / (w0[i] - w0[j])
                                       - dC[i][j] / (C0[i] - C0[j])))
    return worst


def _valid_point(u) -> bool:
    return (u[0] > _GAP and u[1] - u[0] > _GAP and u[2] - u[1] > _GAP
            and np.all(np.isfinite(u)))


@dataclass(frozen=True)
class SolveResult:
    u: np.ndarray
    residual: float
    status: str
    iterations: int


def solve(f, x: float, t: float, u0,
          tol: float = _NEWTON_TOL, maxiter: int = 50) -> SolveResult:
    """Newton solve of w^i(u) - C^i(u) t - x = 0 with validity backtracking."""
    engine = as_engine(f)
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got t = {t}")
    u = np.asarray(u0, dtype=float).copy()
    if not _valid_point(u):
        raise DomainError(
            f"seed must be strictly ordered with positive entries, got {u0}")
    res = math.inf
    for it in range(maxiter):
        qv, g, H = engine.qgh(u)
        C, dC = _speeds_grad_nu0(u)
        S1 = float(np.sum(u))
        F = qv + (C - S1) * g - C * t - x
        res = float(np.max(np.abs(F)))
        if res < tol:
            break
        J = np.empty((3, 3))
        for i in range(3):
            for j in range(3):
                J[i][j] = (g[j] + (dC[i][j] - 1.0) * g[i]
                           + (C[i] - S1) * H[i][j] - t * dC[i][j])
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return SolveResult(u=u, residual=res, status="no-converge",
                               iterations=it)
        alpha = 1.0
        while alpha > 1e-7 and not _valid_point(u + alpha * step):
            alpha *= 0.5
        if alpha <= 1e-7:
            # pinned against the coalescence boundary; only a converged
            # iterate earns the degenerate label, the rest are failures
            status = "degenerate" if res <= _NEWTON_OK else "no-converge"
            return SolveResult(u=u, residual=res, status=status,
                               iterations=it)
        u = u + alpha * step
    else:
        # iteration budget exhausted: re-measure at the final iterate
        qv, g, _ = engine.qgh(u)
        C = _speeds_nu0(u)
        S1 = float(np.sum(u))
        res = float(np.max(np.abs(qv + (C - S1) * g - C * t - x)))
        it = maxiter - 1
    if res <= _NEWTON_OK:
        gaps = [u[0], u[1] - u[0], u[2] - u[1]]
        status = "degenerate" if min(gaps) < 1e-6 else "ok"
        return SolveResult(u=u, residual=res, status=status,
                           iterations=it + 1)
    return SolveResult(u=u, residual=res, status="no-converge",
                       iterations=maxiter)


@dataclass(frozen=True)
class ChartPoint:
    t: float
    x: float
    u: tuple


def zone_chart(f, n1: int = 10, n3: int = 10,
               n2: int = 24, margin: float = 0.05) -> list:
    """Consistent (t, x, u) triples charting the hodograph zone.

    For fixed (u1, u3), the first two characteristic relations determine
    t = (w^1 - w^2)/(C^1 - C^2) and x = -C^1 t + w^1; roots in u2 of the
    third relation G = w^3 - C^3 t - x give exactly solvable points.
    """
    engine = as_engine(f)
    lo, hi = engine.data.u_min, engine.data.u_max
    span = hi - lo
    pad = margin * span

    def txg(u1, u2, u3):
        u = np.array([u1, u2, u3])
        w = commuting_speeds(engine, u)
        C = _speeds_nu0(u)
        t = (w[0] - w[1]) / (C[0] - C[1])
        x = -C[0] * t + w[0]
        return t, x, w[2] - C[2] * t - x

    out = []
    for u1 in np.linspace(lo + pad, hi - 3.0 * pad, n1):
        for u3 in np.linspace(u1 + 2.0 * pad, hi - pad, n3):
            if u3 - u1 < 3.0 * pad:
                continue
            u2s = np.linspace(u1 + 0.05 * (u3 - u1), u3 - 0.05 * (u3 - u1), n2)
            gs = np.array([txg(u1, u2, u3)[2] for u2 in u2s])
            for a, b, ga, gb in zip(u2s[:-1], u2s[1:], gs[:-1], gs[1:]):
                if not (np.isfinite(ga) and np.isfinite(gb)) or ga * gb > 0.0:
                    continue
                u2 = brentq(lambda v: txg(u1, v, u3)[2], a, b, xtol=1e-12)
                t, x, _ = txg(u1, u2, u3)
                if np.isfinite(t) and np.isfinite(x) and t > 0.0:
                    out.append(ChartPoint(t=float(t), x=float(x),
                                          u=(float(u1), float(u2), float(u3))))
    # roots grazing a coalescence edge blow t up by orders of magnitude;
    # trim them so the remaining points outline the physical zone
    if len(out) >= 4:
        tm = float(np.median([p.t for p in out]))
        out = [p for p in out if p.t <= 50.0 * tm]
    return out


@dataclass
class ModulationSolution:
    t: np.ndarray
    x: np.ndarray
    u: np.ndarray  # (nt, nx, 3)
    residual: np.ndarray  # (nt, nx)
    status: np.ndarray  # (nt, nx) strings
    iterations: np.ndarray  # (nt, nx)

    @property
    def solved_fraction(self) -> float:
        ok = np.isin(self.status, ("ok", "degenerate"))
        return float(np.count_nonzero(ok)) / self.status.size

    @cached_property
    def pde_residual(self) -> np.ndarray:
        """Central-difference transport residual u_t - C(u) u_x per point.

        Differentiating x = -C^i t + w^i in x and t and eliminating with
        the commuting-flow relation gives u^i_t = C^i u^i_x, so this sign
        is the one the hodograph field satisfies identically.
        """
        nt, nx = self.status.shape
        out = np.full((nt, nx), np.nan)
        ut = np.gradient(self.u, self.t, axis=0)
        ux = np.gradient(self.u, self.x, axis=1)
        for it in range(1, nt - 1):
            for ix in range(1, nx - 1):
                block = self.status[it - 1:it + 2, ix - 1:ix + 2]
                if not (block[1, 1] == "ok" and block[0, 1] == "ok"
                        and block[2, 1] == "ok" and block[1, 0] == "ok"
                        and block[1, 2] == "ok"):
                    continue
                C = _speeds_nu0(self.u[it, ix])
                r = ut[it, ix] - C * ux[it, ix]
                out[it, ix] = float(np.max(np.abs(r)))
        return out

    def pde_residual_max(self) -> float:
        vals = self.pde_residual[np.isfinite(self.pde_residual)]
        return float(np.max(vals)) if vals.size else math.nan

    def to_csv(self, path: str | None = None) -> str:
        lines = ["x,t,u1,u2,u3,residual,status"]
        for it in range(self.t.size):
            for ix in range(self.x.size):
                ui = self.u[it, ix]
                lines.append(
                    f"{self.x[ix]:.17g},{self.t[it]:.17g},"
                    f"{ui[0]:.17g},{ui[1]:.17g},{ui[2]:.17g},"
                    f"{self.residual[it, ix]:.17g},{self.status[it, ix]}")
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def solve_field(f, t_grid, x_grid,
                chart: list | None = None) -> ModulationSolution:
    """Grid solve by warm-started wavefront sweep.

    The seed is the chart point nearest the grid center; each solved node
    hands its invariants to unsolved neighbors through a FIFO front.  Runs
    on one thread, which respects any WHITHAM_CH_THREADS cap.
    """
    thread_cap()
    engine = as_engine(f)
    ts = np.asarray(t_grid, dtype=float)
    xs = np.asarray(x_grid, dtype=float)
    nt, nx = ts.size, xs.size
    u = np.full((nt, nx, 3), np.nan)
    residual = np.full((nt, nx), np.inf)
    status = np.full((nt, nx), "no-converge", dtype=object)
    iters = np.zeros((nt, nx), dtype=int)
    sol = ModulationSolution(t=ts, x=xs, u=u, residual=residual,
                             status=status, iterations=iters)
    if nt == 0 or nx == 0:
        return sol
    if chart is None:
        chart = zone_chart(engine)
    if not chart:
        return sol

    tc, xc = 0.5 * (ts[0] + ts[-1]), 0.5 * (xs[0] + xs[-1])
    tspan = max(ts[-1] - ts[0], 1e-30)
    xspan = max(xs[-1] - xs[0], 1e-30)
    anchors = sorted(chart, key=lambda p: ((p.t - tc) / tspan) ** 2
                     + ((p.x - xc) / xspan) ** 2)

    from collections import deque

    def attempt(it, ix, guess):
        if not _valid_point(np.asarray(guess, dtype=float)):
            return False
        r = solve(engine, float(xs[ix]), float(ts[it]), guess)
        status[it, ix] = r.status
        iters[it, ix] = r.iterations
        if r.status in ("ok", "degenerate"):
            u[it, ix] = r.u
            residual[it, ix] = r.residual
            return True
        residual[it, ix] = r.residual
        return False

    seed = None
    for p in anchors[:40]:
        it = int(np.argmin(np.abs(ts - p.t)))
        ix = int(np.argmin(np.abs(xs - p.x)))
        if status[it, ix] in ("ok", "degenerate"):
            continue
        if attempt(it, ix, np.array(p.u)):
            seed = (it, ix)
            break
    if seed is None:
        return sol

    front = deque([seed])
    visited = np.zeros((nt, nx), dtype=bool)
    visited[seed] = True
    while front:
        it, ix = front.popleft()
        for dt_, dx_ in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            jt, jx = it + dt_, ix + dx_
            if not (0 <= jt < nt and 0 <= jx < nx) or visited[jt, jx]:
                continue
            visited[jt, jx] = True
            if attempt(jt, jx, u[it, ix]):
                front.append((jt, jx))
    # second chance for stragglers next to solved nodes, then give up
    for it in range(nt):
        for ix in range(nx):
            if status[it, ix] in ("ok", "degenerate"):
                continue
            for dt_, dx_ in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                jt, jx = it + dt_, ix + dx_
                if (0 <= jt < nt and 0 <= jx < nx
                        and status[jt, jx] == "ok"
                        and attempt(it, ix, u[jt, jx])):
                    break
    return sol
