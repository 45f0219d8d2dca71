"""Gauss-Chebyshev cycle quadrature with order doubling.

Every period integral in the package reduces to

    2 * int_lo^hi f(lam) dlam / sqrt((lam - lo)(hi - lam) * rest(lam))

with rest > 0 on (lo, hi).  The Chebyshev substitution absorbs the two
endpoint square-root singularities, leaving a smooth integrand, so the
order-doubling loop converges geometrically.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError


def chebyshev_sum(g, n: int) -> float:
    # int_{-1}^{1} g(x) / sqrt(1 - x^2) dx at Chebyshev nodes
    k = np.arange(1, n + 1)
    x = np.cos((2 * k - 1) * np.pi / (2 * n))
    return float(np.pi / n * np.sum(g(x)))


def cycle_integral(f, lo: float, hi: float, rest, rtol: float = 1e-12,
                   n0: int = 64, nmax: int = 1 << 14) -> float:
    """Cycle integral (twice the branch-cut segment integral) of f / sqrt(|R|).

    rest(lam) must collect the factors of |R| other than (lam-lo)(hi-lam).
    Doubles the Chebyshev order until two successive orders agree to rtol.
    """
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def g(x):
        lam = mid + half * x
        return f(lam) / np.sqrt(rest(lam))

    n = n0
    prev = 2.0 * chebyshev_sum(g, n)
    while n < nmax:
        n *= 2
        cur = 2.0 * chebyshev_sum(g, n)
        if abs(cur - prev) <= rtol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise NumericalError(
        f"cycle integral did not converge by order {nmax}",
        achieved=abs(cur - prev))
