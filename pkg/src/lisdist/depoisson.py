"""Analytic de-Poissonization.

The fixed-n probabilities a_n = P(L_n <= l) are recovered from the Poisson
generating function P(r; l) by the Jasz expansion, whose weights are the
diagonal Poisson-Charlier values b_j(n) = c_j(n; n).  Also here: the
monotonicity sandwich and an empirical check of the genus-zero growth
bound on circles |z| = r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._validate import check_int, check_real
from .errors import DomainError
from .exact_lis import exact_dist, poisson_gf
from .expansions import e2_hard
from .tracy_widom import ChebModel

JASZ_MAX_M = 8
MODEL_NPTS = 41
MODEL_WIDTH = 4.0


# --------------------------------------------------------------------------
# Poisson-Charlier coefficients

@lru_cache(maxsize=None)
def charlier_b_poly(j: int) -> tuple:
    """Coefficients (in increasing powers of n) of the polynomial b_j(n)."""
    j = check_int("j", j, lo=0)
    prev, cur = (Fraction(0),), (Fraction(1),)  # b_{-1}, b_0
    for k in range(j):
        # (k+1) b_{k+1} = -k b_k - n b_{k-1}
        size = max(len(cur), len(prev) + 1)
        nxt = [Fraction(0)] * size
        for i, c in enumerate(cur):
            nxt[i] -= k * c
        for i, c in enumerate(prev):
            nxt[i + 1] -= c
        nxt = tuple(c / (k + 1) for c in nxt)
        prev, cur = cur, nxt
    while len(cur) > 1 and cur[-1] == 0:
        cur = cur[:-1]
    return cur


def charlier_b(j: int, n):
    """b_j(n); exact for integer or Fraction n, float otherwise."""
    coeffs = charlier_b_poly(j)
    if isinstance(n, (int, Fraction)):
        n = Fraction(n)
    else:
        coeffs = [float(c) for c in coeffs]
    total = 0 * n
    for c in reversed(coeffs):
        total = total * n + c
    return total


def charlier_c(j: int, n, r):
    """c_j(n; r) from (k+1) c_{k+1} + (k + r - n) c_k + r c_{k-1} = 0."""
    j = check_int("j", j, lo=0)
    exact = isinstance(n, (int, Fraction)) and isinstance(r, (int, Fraction))
    one = Fraction(1) if exact else 1.0
    prev, cur = 0 * one, one
    for k in range(j):
        prev, cur = cur, -((k + r - n) * cur + r * prev) / (k + 1)
    return cur


# --------------------------------------------------------------------------
# Jasz expansion

def poisson_model(n: float, l: int, npts: int = MODEL_NPTS, deriv_limit: int = JASZ_MAX_M) -> ChebModel:
    """Chebyshev model of r -> P(r; l) = e2_hard(4r; l) on [n - 4 sqrt(n), n + 4 sqrt(n)]."""
    n = check_real("n", n, lo=0.0, strict_lo=True)
    l = check_int("l", l, lo=1)
    w = MODEL_WIDTH * math.sqrt(n)
    lo = max(n - w, 0.0)
    return ChebModel.fit(lambda r: e2_hard(4.0 * r, l), (lo, n + w), npts, deriv_limit=deriv_limit)


def _check_model(model: ChebModel, n: float):
    w = MODEL_WIDTH * math.sqrt(n)
    a, b = model.domain
    if a > max(n - w, 0.0) + 1e-9 or b < n + w - 1e-9:
        raise DomainError(f"model domain [{a:g}, {b:g}] does not contain [n - 4 sqrt(n), n + 4 sqrt(n)]")


def jasz(model: ChebModel, n: float, M: int) -> float:
    """P(n) + sum_{j=2..M} b_j(n) P^(j)(n)."""
    M = check_int("M", M, lo=0, hi=JASZ_MAX_M)
    _check_model(model, n)
    if M > model.deriv_limit:
        raise DomainError(f"model supports derivatives up to {model.deriv_limit}")
    total = float(model(n))
    for j in range(2, M + 1):
        total += float(charlier_b(j, float(n))) * float(model(n, j))
    return total


def jasz_p4(model: ChebModel, n: float) -> float:
    """Reduced fourth-order form P(n) - (n/2) P''(n) + (n^2/8) P''''(n)."""
    _check_model(model, n)
    return float(model(n) - 0.5 * n * model(n, 2) + n * n / 8.0 * model(n, 4))


def jasz_eval(n: int, l: int, M: int = 4) -> dict:
    """Jasz value against the exact probability where available."""
    n = check_int("n", n, lo=1)
    model = poisson_model(n, l)
    out = {"n": n, "l": l, "M": M, "P(n)": float(model(n)), "jasz": jasz(model, n, M),
           "jasz_p4": jasz_p4(model, n)}
    try:
        out["exact"] = float(exact_dist(n).cdf(l))
    except Exception:
        out["exact"] = None
    return out


# --------------------------------------------------------------------------
# monotonicity sandwich

def _P(r: float, l: int) -> float:
    # P(r; l) with P(0) = 1 for arguments clamped at the origin
    return 1.0 if r <= 0 else e2_hard(4.0 * r, l)


def johansson_sandwich(n: int, s: float, l: int):
    """(lower, upper, exact, holds) with mu_pm = n -+ 2 sqrt(s n log n)."""
    n = check_int("n", n, lo=2)
    s = check_real("s", s, lo=1.0)
    l = check_int("l", l, lo=1)
    d = 2.0 * math.sqrt(s * n * math.log(n))
    slack = n ** (-s)
    lower = _P(n + d, l) - slack
    upper = _P(n - d, l) + slack
    exact = float(exact_dist(n).cdf(l))
    return lower, upper, exact, lower <= exact <= upper


# --------------------------------------------------------------------------
# growth bound on circles

@dataclass(frozen=True)
class HaymanRow:
    theta: float
    abs_f: float
    bound: float
    practical_bound: float

    @property
    def ok(self) -> bool:
        return self.abs_f <= self.bound

    @property
    def practical_ok(self) -> bool:
        return self.abs_f <= self.practical_bound


@dataclass(frozen=True)
class HaymanReport:
    l: int
    r: float
    f_r: float
    b: float
    rows: tuple

    @property
    def all_pass(self) -> bool:
        return all(row.ok for row in self.rows)

    @property
    def failures(self) -> list:
        return [row.theta for row in self.rows if not row.ok]


def hayman_bound_check(l: int, r: float, thetas=None, K: int = 80) -> HaymanReport:
    """Compare |f(r e^{i theta})| with 2 f(r) exp(-min(theta^2 b, b^(1/5))/2), f = e^z P(z; l).

    The bound rests on an unverified hypothesis on the zeros of f, so
    failures are reported rather than raised.
    """
    from .stirling import aux

    l = check_int("l", l, lo=1)
    r = check_real("r", r, lo=0.0, hi=25.0, strict_lo=True)
    if thetas is None:
        thetas = np.round(np.arange(0.0, math.pi, 0.1), 12).tolist() + [math.pi]
    f_r = abs(poisson_gf(l, r, K)) * math.exp(r)
    b = aux(l, r)[1]
    rows = []
    for th in thetas:
        th = float(th)
        z = r * complex(math.cos(th), math.sin(th))
        abs_f = abs(poisson_gf(l, z, K)) * math.exp(z.real)
        bound = 2.0 * f_r * math.exp(-0.5 * min(th * th * b, b ** 0.2))
        practical = 2.0 * f_r * math.exp(-0.5 * min(th * th * r, r ** 0.2))
        rows.append(HaymanRow(th, abs_f, bound, practical))
    return HaymanReport(l, r, f_r, b, tuple(rows))
