"""GUE Tracy-Widom distribution F(t) = det(I - K0) on L^2(t, inf).

F is sampled at Chebyshev points of [-13, 9] and represented by its
Chebyshev series; derivatives up to order 7 come from exact
differentiation of that series.  The fit reaches past the working window
[-10, 6] because high derivatives of an interpolant are least accurate
at the ends of its interval.  The resolvent traces
u_jk(t) = tr((I - K0)^{-1} Ai^(j) (x) Ai^(k)) are computed directly on the
Nystrom grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as cheb

from ._validate import check_int, check_real
from .errors import DomainError
from .kernels import airy_kernel, choup_finite_rank
from .quad_fredholm import DEFAULT_L, DEFAULT_M, Resolvent, fredholm_det
from .specfun import airy

TW_DOMAIN = (-10.0, 6.0)
FIT_DOMAIN = (-13.0, 9.0)
DERIV_LIMIT = 7
# adaptive chop: cut at this multiple of the noise plateau in the coefficient tail
NOISE_FACTOR = 2.0


class ChebModel:
    """Chebyshev interpolant of a smooth function on [a, b] with derivatives."""

    def __init__(self, domain, coeffs, deriv_limit: int = DERIV_LIMIT):
        self.domain = (float(domain[0]), float(domain[1]))
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.deriv_limit = deriv_limit
        scale = 2.0 / (self.domain[1] - self.domain[0])
        self._derivs = [self.coeffs]
        for k in range(deriv_limit):
            self._derivs.append(cheb.chebder(self._derivs[-1]) * scale)

    @classmethod
    def fit(cls, f, domain, npts: int, deriv_limit: int = DERIV_LIMIT, chop: float | str = 1e-13):
        """Interpolate f at npts Chebyshev points and chop the noise tail.

        ``chop`` is a relative threshold or "auto" (twice the largest
        coefficient in the last quarter of the raw series).
        """
        a, b = domain
        k = np.arange(npts)
        s = np.cos(np.pi * (k + 0.5) / npts)
        x = 0.5 * (b - a) * s + 0.5 * (a + b)
        vals = np.array([f(xi) for xi in x], dtype=float)
        coeffs = cheb.chebfit(s, vals, npts - 1)
        coeffs = _chop(coeffs, chop)
        model = cls(domain, coeffs, deriv_limit)
        model.samples = (x, vals)
        return model

    def _s(self, t):
        a, b = self.domain
        return (2.0 * np.asarray(t, dtype=float) - (a + b)) / (b - a)

    def __call__(self, t, k: int = 0):
        if k > self.deriv_limit:
            raise DomainError(f"derivative order {k} exceeds {self.deriv_limit}")
        return cheb.chebval(self._s(t), self._derivs[k])

    def trailing_ratio(self) -> float:
        c = np.abs(self.coeffs)
        return float(c[-1] / c.max())


def _chop(coeffs, tol):
    c = np.asarray(coeffs, dtype=float).copy()
    if tol == "auto":
        tail = np.abs(c[-max(len(c) // 4, 1):]).max()
        tol = NOISE_FACTOR * tail / np.abs(c).max()
    tail = np.maximum.accumulate(np.abs(c)[::-1])[::-1]
    below = np.nonzero(tail < tol * np.abs(c).max())[0]
    if below.size:
        c = c[: max(below[0], 1)]
    return c


@lru_cache(maxsize=None)
def _airy_spec():
    return airy_kernel().spec


def tw_det(t: float, m: int = DEFAULT_M, L: float = DEFAULT_L) -> float:
    """F(t) by a direct Nystrom determinant (no interpolation)."""
    return fredholm_det(_airy_spec(), (t, np.inf), m, L)


@dataclass
class TWModel:
    F: ChebModel
    window: tuple = TW_DOMAIN

    def __call__(self, t, k: int = 0):
        return self.eval(t, k)

    def eval(self, t, k: int = 0):
        k = check_int("k", k, lo=0, hi=self.F.deriv_limit)
        ta = np.asarray(t, dtype=float)
        a, b = self.window
        inside = np.clip(ta, a, b)
        out = np.asarray(self.F(inside, k), dtype=float)
        out = np.where(ta > b, 1.0 if k == 0 else 0.0, out)
        out = np.where(ta < a, 0.0, out)
        return float(out) if out.ndim == 0 else out


def build_tw_model(npts: int = 240, m: int = DEFAULT_M, L: float = DEFAULT_L,
                   domain=FIT_DOMAIN, deriv_limit: int = DERIV_LIMIT, window=TW_DOMAIN) -> TWModel:
    """Model of F fitted on ``domain``; evaluation saturates outside ``window``."""
    npts = check_int("npts", npts, lo=120)
    a, b = domain
    if not (a <= window[0] < window[1] <= b):
        raise DomainError("the saturation window must lie inside the fit domain")
    cm = ChebModel.fit(lambda t: tw_det(t, m, L), domain, npts, deriv_limit=deriv_limit, chop="auto")
    return TWModel(cm, tuple(window))


@lru_cache(maxsize=None)
def default_model() -> TWModel:
    return build_tw_model()


def F(t, k: int = 0):
    """F^(k)(t); saturates to the limits 1 / 0 outside [-10, 6]."""
    return default_model().eval(t, k)


@lru_cache(maxsize=4096)
def _resolvent(t: float, m: int) -> Resolvent:
    return Resolvent(_airy_spec(), (t, np.inf), m)


def _ai(j):
    return lambda x: airy(x, j)


def u(t: float, j: int, k: int, m: int = DEFAULT_M) -> float:
    """u_jk(t) = tr((I - K0)^{-1} Ai^(j) (x) Ai^(k)) on L^2(t, inf)."""
    t = check_real("t", t, lo=TW_DOMAIN[0], hi=TW_DOMAIN[1])
    j = check_int("j", j, lo=0, hi=5)
    k = check_int("k", k, lo=0, hi=5)
    return _resolvent(t, m).inner(_ai(j), _ai(k))


def u_table(t: float, jmax: int = 5, m: int = DEFAULT_M) -> np.ndarray:
    """Matrix U[j, k] = u_jk(t) for 0 <= j, k <= jmax."""
    R = _resolvent(check_real("t", t), m)
    x, w = R.rule.nodes, R.rule.weights
    A = np.array([airy(x, j) for j in range(jmax + 1)])
    S = np.array([R.solve(a) for a in A])
    return (A * w) @ S.T


def choup_trace(t: float, m: int = DEFAULT_M) -> float:
    """tr((I - K0)^{-1} L) on L^2(t, inf)."""
    R = _resolvent(check_real("t", t), m)
    return sum(c * R.inner(uf, vf) for c, uf, vf in choup_finite_rank().terms)


def choup_decomposition(t: float, m: int = DEFAULT_M) -> float:
    U = u_table(t, 4, m)
    return -2 * U[1, 0] + U[2, 2] - 2 * U[3, 1] + 2 * U[4, 0]


def choup_trace_identity(t: float, model: TWModel | None = None):
    """(F(t) tr((I - K0)^{-1} L), t^2 F'(t))."""
    t = check_real("t", t, lo=-8.0, hi=4.0)
    model = model or default_model()
    return model(t) * choup_trace(t), t * t * model(t, 1)
