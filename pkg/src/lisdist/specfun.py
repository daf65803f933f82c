"""Airy and Bessel functions, Olver transition polynomials and the zeta map.

Two evaluation paths are kept side by side.  The vectorised routines
(`airy`, `bessel_jv`) are backed by scipy and feed the Nystrom matrices.
The reference routines (`airy_reference`, `bessel_j`) are written from
scratch (power series in extended precision, asymptotic series, Miller's
backward recurrence) and serve as independent checks of the fast path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial import Polynomial
from scipy import special

from ._validate import check_int, check_real
from .errors import DomainError

CBRT2 = 2.0 ** (1.0 / 3.0)
TINY_X = 1e-8


# --------------------------------------------------------------------------
# Airy

@lru_cache(maxsize=None)
def _airy_reduction(k: int) -> tuple[Polynomial, Polynomial]:
    """Polynomials (p_k, q_k) with Ai^(k) = p_k Ai + q_k Ai'."""
    if k == 0:
        return Polynomial([1.0]), Polynomial([0.0])
    p, q = _airy_reduction(k - 1)
    x = Polynomial([0.0, 1.0])
    # (p Ai + q Ai')' = (p' + x q) Ai + (p + q') Ai'
    return p.deriv() + x * q, p + q.deriv()


def _airy_pair(x):
    ai, aip, _, _ = special.airy(x)
    return ai, aip


def airy(x, k: int = 0):
    """Ai^(k)(x) for 0 <= k <= 7, vectorised.

    Only Ai and Ai' are evaluated directly; higher derivatives use the
    reduction Ai'' = x Ai.
    """
    k = check_int("k", k, lo=0, hi=7)
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 200) or np.any(np.isnan(xa)):
        raise DomainError("airy: |x| must be <= 200")
    ai, aip = _airy_pair(xa)
    if k == 0:
        out = ai
    elif k == 1:
        out = aip
    else:
        p, q = _airy_reduction(k)
        out = p(xa) * ai + q(xa) * aip
    return float(out) if np.ndim(out) == 0 else out


def airy_derivs(x, kmax: int):
    """List [Ai, Ai', ..., Ai^(kmax)] at x (arrays)."""
    xa = np.asarray(x, dtype=float)
    ai, aip = _airy_pair(xa)
    out = []
    for k in range(kmax + 1):
        p, q = _airy_reduction(k)
        out.append(p(xa) * ai + q(xa) * aip)
    return out


def _airy_asym_coeffs(n: int):
    u = [mpmath.mpf(1)]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [mpmath.mpf(1)] + [-mpmath.mpf(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, n)]
    return u, v


def _airy_reference_mp(x):
    """(Ai, Ai') at a real point using series in extended precision."""
    x = mpmath.mpf(x)
    if abs(x) <= 10:
        c1 = 1 / (mpmath.power(3, mpmath.mpf(2) / 3) * mpmath.gamma(mpmath.mpf(2) / 3))
        c2 = 1 / (mpmath.power(3, mpmath.mpf(1) / 3) * mpmath.gamma(mpmath.mpf(1) / 3))
        x3 = x ** 3
        f = g = fp = gp = mpmath.mpf(0)
        t, s = mpmath.mpf(1), x
        u, v = x * x / 2, mpmath.mpf(1)
        k = 0
        eps = mpmath.mpf(10) ** (-(mpmath.mp.dps + 5))
        while True:
            f += t
            g += s
            fp += u
            gp += v
            if max(abs(t), abs(s), abs(u), abs(v)) < eps and k > 3:
                break
            t *= x3 / ((3 * k + 2) * (3 * k + 3))
            s *= x3 / ((3 * k + 3) * (3 * k + 4))
            u *= x3 / ((3 * k + 3) * (3 * k + 5))
            v *= x3 / ((3 * k + 1) * (3 * k + 3))
            k += 1
        return c1 * f - c2 * g, c1 * fp - c2 * gp
    z = abs(x)
    zeta = mpmath.mpf(2) / 3 * z ** mpmath.mpf(1.5)
    u, v = _airy_asym_coeffs(31)
    sqpi = mpmath.sqrt(mpmath.pi)
    if x > 0:
        su = sum((-1) ** k * u[k] / zeta ** k for k in range(31))
        sv = sum((-1) ** k * v[k] / zeta ** k for k in range(31))
        e = mpmath.exp(-zeta)
        return e / (2 * sqpi * z ** mpmath.mpf(0.25)) * su, -z ** mpmath.mpf(0.25) * e / (2 * sqpi) * sv
    ph = zeta - mpmath.pi / 4
    c, s = mpmath.cos(ph), mpmath.sin(ph)
    ue = sum((-1) ** k * u[2 * k] / zeta ** (2 * k) for k in range(15))
    uo = sum((-1) ** k * u[2 * k + 1] / zeta ** (2 * k + 1) for k in range(15))
    ve = sum((-1) ** k * v[2 * k] / zeta ** (2 * k) for k in range(15))
    vo = sum((-1) ** k * v[2 * k + 1] / zeta ** (2 * k + 1) for k in range(15))
    ai = (c * ue + s * uo) / (sqpi * z ** mpmath.mpf(0.25))
    aip = z ** mpmath.mpf(0.25) / sqpi * (s * ve - c * vo)
    return ai, aip


def airy_reference(x: float, k: int = 0) -> float:
    """Reference Ai^(k)(x): Maclaurin series for |x| <= 10, asymptotic series beyond."""
    k = check_int("k", k, lo=0, hi=7)
    x = check_real("x", x, lo=-200, hi=200)
    with mpmath.workdps(60):
        ai, aip = _airy_reference_mp(x)
        p, q = _airy_reduction(k)
        return float(mpmath.polyval(list(reversed(p.coef)), x) * ai
                     + mpmath.polyval(list(reversed(q.coef)), x) * aip)


# --------------------------------------------------------------------------
# Bessel

def bessel_j(nu: int, x):
    """J_nu(x) for integer nu >= 0 by Miller's backward recurrence.

    The recurrence starts at index nu + 40 + ceil(1.2 x) and is normalised
    with J_0 + 2 sum J_2k = 1.  Accepts scalar or array x >= 0.
    """
    nu = check_int("nu", nu, lo=0, hi=5000)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0) or np.any(xa > 10 * (nu + 50)) or np.any(np.isnan(xa)):
        raise DomainError("bessel_j: need 0 <= x <= 10 (nu + 50)")
    out = np.zeros_like(xa)
    zero = xa == 0
    out[zero] = 1.0 if nu == 0 else 0.0
    # two series terms are exact to double precision here, and 2k/x would overflow
    tiny = (xa > 0) & (xa < TINY_X)
    if tiny.any():
        q = 0.5 * xa[tiny]
        lead = np.ones_like(q)
        for i in range(1, nu + 1):
            lead *= q / i
        out[tiny] = lead * (1 - q * q / (nu + 1))
    zero |= tiny
    xs = xa[~zero]
    if xs.size:
        N = nu + 40 + int(math.ceil(1.2 * xs.max()))
        N += N % 2
        jp1 = np.zeros_like(xs)
        j = np.full_like(xs, 1e-30)
        total = np.zeros_like(xs)
        keep = np.zeros_like(xs)
        for k in range(N, 0, -1):
            if k == nu:
                keep = j.copy()
            if k % 2 == 0:
                total += 2.0 * j
            jm1 = (2.0 * k / xs) * j - jp1
            jp1, j = j, jm1
            big = np.abs(j) > 1e200
            if big.any():
                scale = np.where(big, 1e-200, 1.0)
                j *= scale
                jp1 *= scale
                total *= scale
                keep *= scale
        if nu == 0:
            keep = j.copy()
        total += j
        out[~zero] = keep / total
    return float(out[0]) if np.ndim(x) == 0 else out


def bessel_jv(nu, x):
    """Vectorised J_nu(x) (scipy), used inside the Nystrom matrices."""
    return special.jv(nu, x)


def bessel_jv_prime(nu, x):
    return 0.5 * (special.jv(nu - 1, x) - special.jv(nu + 1, x))


# --------------------------------------------------------------------------
# exact polynomial helpers (ascending Fraction lists)

def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _pscale(a, c):
    return [c * x for x in a]


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pder(a):
    return [i * a[i] for i in range(1, len(a))]


def _ptau(a, power=1):
    return [Fraction(0)] * power + list(a)


def _ptrim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _solve_exact(rows, rhs, nunk):
    """Solve an overdetermined but consistent rational system exactly."""
    M = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(nunk):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [vi - f * vr for vi, vr in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    if any(row[-1] != 0 for row in M[r:]):
        raise ArithmeticError("inconsistent system")
    if len(piv_cols) != nunk:
        raise ArithmeticError("underdetermined system")
    sol = [Fraction(0)] * nunk
    for i, c in enumerate(piv_cols):
        sol[c] = M[i][-1]
    return sol


# --------------------------------------------------------------------------
# Olver transition polynomials

@dataclass(frozen=True)
class OlverTables:
    A: tuple
    B: tuple

    def eval(self, which: str, k: int, tau):
        coeffs = (self.A if which == "A" else self.B)[k]
        return np.polynomial.polynomial.polyval(tau, [float(c) for c in coeffs]) if coeffs else 0.0 * np.asarray(tau)


def _dtilde(A, B):
    # derivative of (y1 A + y2 B) in the scaled Airy basis
    return _padd(_pder(A), _pscale(_ptau(B), 2)), _padd(_pder(B), _pscale(A, -1))


def _olver_lower(As, Bs, k):
    """Terms of order eps^k in the Bessel ODE that involve orders < k."""
    g, h = [], []

    def add(pair, factor_tau_power, coef):
        nonlocal g, h
        g = _padd(g, _pscale(_ptau(pair[0], factor_tau_power), coef))
        h = _padd(h, _pscale(_ptau(pair[1], factor_tau_power), coef))

    if k >= 1:
        A1, B1 = As[k - 1], Bs[k - 1]
        d1 = _dtilde(A1, B1)
        d2 = _dtilde(*d1)
        add(d2, 1, 2)
        add(d1, 0, 1)
        add((A1, B1), 2, 1)
    if k >= 2:
        A2, B2 = As[k - 2], Bs[k - 2]
        d1 = _dtilde(A2, B2)
        d2 = _dtilde(*d1)
        add(d2, 2, 1)
        add(d1, 1, 1)
    return g, h


@lru_cache(maxsize=None)
def _olver_build(kmax: int):
    # Ansatz J_nu(nu + tau nu^(1/3)) = nu^(-1/3)[c Ai(-c tau) A + c^2 Ai'(-c tau) B],
    # A = sum A_k eps^k, B = sum B_k eps^k, eps = nu^(-2/3), c = 2^(1/3).
    # The Bessel ODE becomes, with D(A,B) = (A' + 2 tau B, B' - A),
    #   (1 + tau eps)^2 D^2 + eps (1 + tau eps) D + (2 tau + tau^2 eps) = 0,
    # solved order by order; the free constant in A_k is fixed by the
    # Wronskian identity A^2 + A'B - AB' + 2 tau B^2 = 1/(1 + tau eps).
    As = [[Fraction(1)]]
    Bs = [[]]
    for k in range(1, kmax + 1):
        deg = 3 * k + 2
        nA = nB = deg + 1
        nunk = nA + nB
        g, h = _olver_lower(As, Bs, k)
        # Wronskian lower-order part: sum over i+j=k, excluding the terms linear in order k
        w = []
        for i in range(k + 1):
            j = k - i
            if i == k or j == k:
                continue
            w = _padd(w, _pmul(As[i], As[j]))
            w = _padd(w, _pmul(_pder(As[i]), Bs[j]))
            w = _padd(w, _pscale(_pmul(As[i], _pder(Bs[j])), -1))
            w = _padd(w, _pscale(_ptau(_pmul(Bs[i], Bs[j])), 2))
        target = [Fraction(0)] * k + [Fraction((-1) ** k)]
        wr = _padd(target, _pscale(w, -1))
        rows, rhs = [], []
        nrow = deg + 3

        def unit(idx):
            v = [Fraction(0)] * nunk
            v[idx] = Fraction(1)
            return v

        # L0(A,B) = (A'' + 2B + 4 tau B', B'' - 2A') = -(g, h)
        eq1 = [[Fraction(0)] * nunk for _ in range(nrow)]
        eq2 = [[Fraction(0)] * nunk for _ in range(nrow)]
        eq3 = [[Fraction(0)] * nunk for _ in range(nrow)]
        for a in range(nA):
            if a >= 2:
                eq1[a - 2][a] += a * (a - 1)
            if a >= 1:
                eq2[a - 1][a] += -2 * a
                eq3[a - 1][a] += 0
            eq3[a][a] += 2  # 2 A_0 A_k
        for b in range(nB):
            col = nA + b
            eq1[b][col] += 2 + 4 * b
            if b >= 2:
                eq2[b - 2][col] += b * (b - 1)
            if b >= 1:
                eq3[b - 1][col] += -b  # -A_0 B_k'
        for d in range(nrow):
            rows.append(eq1[d])
            rhs.append(-(g[d] if d < len(g) else 0))
            rows.append(eq2[d])
            rhs.append(-(h[d] if d < len(h) else 0))
            rows.append(eq3[d])
            rhs.append(wr[d] if d < len(wr) else 0)
        if any(d >= nrow and c != 0 for lst in (g, h, wr) for d, c in enumerate(lst)):
            raise ArithmeticError("degree bound too small")
        sol = _solve_exact(rows, rhs, nunk)
        As.append(_ptrim(sol[:nA]))
        Bs.append(_ptrim(sol[nA:]))
    return tuple(tuple(a) for a in As), tuple(tuple(b) for b in Bs)


def olver_tables(kmax: int = 3) -> OlverTables:
    """Exact rational polynomials A_0..A_kmax, B_0..B_kmax in tau."""
    kmax = check_int("kmax", kmax, lo=1, hi=10)
    A, B = _olver_build(kmax)
    return OlverTables(A, B)


def format_poly(coeffs, var: str = "t") -> str:
    if not coeffs:
        return "0"
    parts = []
    for i, c in enumerate(coeffs):
        c = Fraction(c)
        if c == 0:
            continue
        s = f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)
        parts.append(s if i == 0 else f"{s}*{var}" + (f"^{i}" if i > 1 else ""))
    return " + ".join(parts) if parts else "0"


def bessel_transition(nu: int, tau, m: int = 3):
    """Truncated transition-region expansion of J_nu(nu + tau nu^(1/3))."""
    nu = check_int("nu", nu, lo=1)
    m = check_int("m", m, lo=0, hi=3)
    tau_a = np.asarray(tau, dtype=float)
    if np.any(tau_a <= -nu ** (2.0 / 3.0)):
        raise DomainError("bessel_transition: need tau > -nu^(2/3)")
    tab = olver_tables(max(m, 1))
    eps = nu ** (-2.0 / 3.0)
    sa = sum(tab.eval("A", k, tau_a) * eps ** k for k in range(m + 1))
    sb = sum(tab.eval("B", k, tau_a) * eps ** k for k in range(1, m + 1)) if m >= 1 else 0.0
    arg = -CBRT2 * tau_a
    ai, aip = _airy_pair(arg)
    out = nu ** (-1.0 / 3.0) * (CBRT2 * ai * sa + CBRT2 ** 2 * aip * sb)
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# zeta map of the uniform expansion

@lru_cache(maxsize=None)
def zeta_series_coeffs(order: int = 40) -> tuple:
    """Exact c_k with 2^(-1/3) zeta(1 - h) = sum_k c_k h^k (c_0 = 0)."""
    # zeta zeta'^2 = (1 - z^2)/z^2; with Z = 2^(-1/3) zeta and h = 1 - z:
    # Z Z_h^2 = h (2 - h) / (2 (1 - h)^2), whose h^n coefficient is (n + 1)/2.
    c = [Fraction(0), Fraction(1)]
    for n in range(2, order + 1):
        c.append(Fraction(0))
        d = [k * c[k] for k in range(1, n + 1)]  # coefficients of Z_h
        P = [sum(d[a] * d[j - a] for a in range(j + 1)) for j in range(n)]
        rest = sum(c[i] * P[n - i] for i in range(1, n))
        c[n] = (Fraction(n + 1, 2) - rest) / (2 * n + 1)
    return tuple(c)


def zeta_of_z(z: float) -> float:
    """zeta(z) with (2/3) zeta^(3/2) = log((1 + sqrt(1-z^2))/z) - sqrt(1 - z^2)."""
    z = check_real("z", z, lo=0.0, strict_lo=True)
    h = 1.0 - z
    if abs(h) < 0.1:
        c = [float(v) for v in zeta_series_coeffs(40)]
        return CBRT2 * float(np.polynomial.polynomial.polyval(h, c))
    if z < 1:
        s = math.sqrt(1 - z * z)
        return (1.5 * (math.log((1 + s) / z) - s)) ** (2.0 / 3.0)
    s = math.sqrt(z * z - 1)
    return -((1.5 * (s - math.acos(1.0 / z))) ** (2.0 / 3.0))
