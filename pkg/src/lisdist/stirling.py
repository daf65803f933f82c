"""Saddle-point (Stirling-type) approximations of P(L_n <= l).

With f(z) = e^z P(z; l) and P(r; l) = E2hard(4r; l) the auxiliary
functions are a(r) = r f'(r)/f(r) and b(r) = r a'(r).  P'/P comes from
the resolvent kernel on the diagonal at the endpoint of the hard-edge
interval; a' is taken by a Richardson-extrapolated central difference.
"""

from __future__ import annotations

import math

from ._validate import check_int, check_real
from .errors import DomainError, NoConvergence, SingularSystem
from .expansions import e2_hard_logderiv, t_nu
from .tracy_widom import TWModel, default_model

NEWTON_MAXIT = 50
NEWTON_RTOL = 1e-8
# Far in the left tail P(r_n) is tiny and a(r) carries relative noise near
# 1e-5, so Newton also stops on a small step.  r_n is a stationary point,
# so an error in it enters S only at second order.
NEWTON_STEP_RTOL = 1e-4
B_STEP = 0.02
# for small l the saddle point sits far to the right of n
R_MAX_FACTOR = 64.0


def _log_p(l: int, r: float):
    # (P(r), P'(r)/P(r)) with s = 4r
    P, dlog = e2_hard_logderiv(4.0 * r, l)
    return P, 4.0 * dlog


def _a(l: int, r: float) -> float:
    return r * (1.0 + _log_p(l, r)[1])


def aux(l: int, r: float):
    """Auxiliary functions (a(r), b(r)) of f(z) = e^z P(z; l)."""
    l = check_int("l", l, lo=1)
    r = check_real("r", r, lo=0.0, strict_lo=True)
    h = B_STEP * r
    d = lambda k: (_a(l, r + k * h) - _a(l, r - k * h)) / (2.0 * k * h)  # noqa: E731
    da = (4.0 * d(0.5) - d(1.0)) / 3.0
    return _a(l, r), r * da


def _bracket_solve(l: int, n: float, lo: float, hi: float) -> float:
    glo = _a(l, lo) - n
    # far right P(r) underflows the Nystrom determinant; pull the end back
    for _ in range(60):
        try:
            ghi = _a(l, hi) - n
            break
        except SingularSystem:
            hi = 0.5 * (hi + lo)
    else:
        raise NoConvergence("no evaluable right end for the bracket")
    if glo * ghi > 0:
        raise NoConvergence(f"a(r) - n does not change sign on [{lo:g}, {hi:g}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g = _a(l, mid) - n
        if abs(g) <= NEWTON_RTOL * n or hi - lo <= NEWTON_STEP_RTOL * mid:
            return mid
        if (g < 0) == (glo < 0):
            lo, glo = mid, g
        else:
            hi = mid
    raise NoConvergence("bisection for a(r) = n did not converge")


def solve_rn(n: int, l: int, model: TWModel | None = None) -> float:
    """Solution r_n of a(r_n) = n, started from n + (F'/F)(t_l(n)) n^(1/3)."""
    n = check_int("n", n, lo=10)
    l = check_int("l", l, lo=1)
    if l >= n:
        # P(L_n <= l) = 1 here; the saddle point is taken at r = n
        return float(n)
    t = t_nu(l, n)
    if not -8.0 <= t <= 4.0:
        raise DomainError(f"t_l(n) = {t:g} outside [-8, 4]")
    model = model or default_model()
    r = n + model(t, 1) / model(t) * n ** (1.0 / 3.0)
    r = min(max(r, 0.5 * n), R_MAX_FACTOR * n)
    for _ in range(NEWTON_MAXIT):
        a, b = aux(l, r)
        g = a - n
        if abs(g) <= NEWTON_RTOL * n:
            return r
        step = g * r / b if b > 0 else math.inf
        r_new = r - step
        if not (0.25 * n <= r_new <= R_MAX_FACTOR * n) or not math.isfinite(r_new):
            return _bracket_solve(l, n, 0.25 * n, R_MAX_FACTOR * n)
        if abs(step) <= NEWTON_STEP_RTOL * r:
            return r_new
        r = r_new
    raise NoConvergence(f"Newton iteration for a(r) = {n} did not converge (l = {l})")


def _lambda(h: float) -> float:
    return h - math.log1p(h)


def stirling_S(n: int, l: int, with_tau: bool = False, model: TWModel | None = None) -> float:
    """P(r_n)/sqrt(b(r_n)/n) exp(n Lambda((r_n - n)/n)), Lambda(h) = h - log(1 + h)."""
    n = check_int("n", n, lo=10)
    l = check_int("l", l, lo=1)
    if l >= n:
        return tau_n(n) if with_tau else 1.0
    r = solve_rn(n, l, model)
    P = e2_hard_logderiv(4.0 * r, l)[0]
    _, b = aux(l, r)
    S = P / math.sqrt(b / n) * math.exp(n * _lambda((r - n) / n))
    return S * tau_n(n) if with_tau else S


def stirling_S_tilde(n: int, l: int, with_tau: bool = False) -> float:
    """P(n)/sqrt(b(n)/n) exp(-(n - a(n))^2 / (2 b(n)))."""
    n = check_int("n", n, lo=10)
    l = check_int("l", l, lo=1)
    if l >= n:
        return tau_n(n) if with_tau else 1.0
    P = e2_hard_logderiv(4.0 * n, l)[0]
    a, b = aux(l, float(n))
    S = P / math.sqrt(b / n) * math.exp(-((n - a) ** 2) / (2.0 * b))
    return S * tau_n(n) if with_tau else S


def tau_n(n: int) -> float:
    """n! / (sqrt(2 pi n) (n/e)^n)."""
    n = check_int("n", n, lo=1)
    return math.exp(math.lgamma(n + 1) - 0.5 * math.log(2 * math.pi * n) - n * math.log(n) + n)


def stirling_eval(n: int, l: int, simplified: bool = False, with_tau: bool = False) -> dict:
    """Summary used by the command line: S, r_n, a, b."""
    if simplified:
        r = float(n)
        S = stirling_S_tilde(n, l, with_tau)
    else:
        r = solve_rn(n, l)
        S = stirling_S(n, l, with_tau)
    if l >= n:
        a = b = r
    else:
        a, b = aux(l, r)
    return {"S": S, "r_n": r, "a": a, "b": b}
