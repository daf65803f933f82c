"""Finite-size expansions around the Tracy-Widom limit.

Every correction term of the hard-to-soft transition, the
Poissonized length distribution, the CDF and PDF of the length and the
Stirling-type formulas is stored here as an exact rational table and
evaluated on top of the Tracy-Widom model.  The module also supplies the
hard-edge gap probability E2(s; nu) = det(I - K_nu) on (0, s) and the
residual checks that compare the expansions with it.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ._validate import check_int, check_real
from .errors import DomainError, ToleranceExceeded
from .kernels import bessel_kernel, h_nu, phi_nu
from .quad_fredholm import (DEFAULT_L, DEFAULT_M, QuadRule, Resolvent, fredholm_det_rule,
                            gauss_legendre)
from .specfun import zeta_of_z
from .tracy_widom import DERIV_LIMIT, TWModel, default_model

FAMILIES = ("F", "F_tilde", "FP", "FD", "Fstar", "FS", "FS_tilde")


# --------------------------------------------------------------------------
# scalings

def t_nu(nu, r):
    """t_nu(r) = (nu - 2 sqrt(r)) / r^(1/6)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("r must be positive")
    out = (nu - 2.0 * np.sqrt(r)) / r ** (1.0 / 6.0)
    return float(out) if out.ndim == 0 else out


def dt_nu_dr(nu, r):
    """Derivative of t_nu(r) in r, written through t itself."""
    t = t_nu(nu, r)
    return -r ** (-2.0 / 3.0) - t / (6.0 * r)


def psi_h_inverse(h: float, t: float) -> float:
    """2^(-1/3) h^(-1) zeta(1 - h t), defined for t < 1/h."""
    h = check_real("h", h, lo=0.0, strict_lo=True)
    t = check_real("t", t)
    if h * t >= 1:
        raise DomainError("need t < 1/h")
    return 2.0 ** (-1.0 / 3.0) * zeta_of_z(1.0 - h * t) / h


def t_bracket(r, t):
    """Scaled length at the integer l = floor(2 sqrt(r) + t r^(1/6))."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    c = r ** (1.0 / 6.0)
    root = 2.0 * np.sqrt(r)
    out = (np.floor(root + t * c) - root) / c
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# hard-edge gap probability

def _hard_rule(s: float, nu: int, m: int, L: float) -> QuadRule:
    # The kernel is negligible far to the left of the transition point x = nu^2.
    # In the soft variable tau (x = phi_nu(tau)) the interval (0, s) is
    # (tau_s, 1/h); keep tau <= max(tau_s, 0) + L like the Airy truncation.
    h = h_nu(nu)
    tau_s = (1.0 - math.sqrt(s) / nu) / h
    tau_max = max(tau_s, 0.0) + L
    if tau_max < 1.0 / h:
        lo = nu * nu * (1.0 - h * tau_max) ** 2
        return gauss_legendre(m, lo, s)
    # Interval reaches the hard edge: substitute x = s u^2 so that the
    # half-integer powers x^(nu/2) become polynomials in u.
    g = gauss_legendre(m, 0.0, 1.0)
    u = g.nodes
    return QuadRule(s * u * u, 2.0 * s * u * g.weights, (0.0, float(s)))


def e2_hard(s: float, nu: int, m: int = DEFAULT_M, L: float = DEFAULT_L) -> float:
    """E2hard(s; nu) = det(I - K_nu) on L^2(0, s)."""
    s = check_real("s", s, lo=0.0)
    nu = check_int("nu", nu, lo=1)
    if s == 0:
        return 1.0
    return fredholm_det_rule(bessel_kernel(nu).spec, _hard_rule(s, nu, m, L))


def e2_hard_logderiv(s: float, nu: int, m: int = DEFAULT_M, L: float = DEFAULT_L):
    """(E2hard(s; nu), d/ds log E2hard(s; nu)); the derivative is -R(s, s)."""
    s = check_real("s", s, lo=0.0, strict_lo=True)
    nu = check_int("nu", nu, lo=1)
    R = Resolvent(bessel_kernel(nu).spec, rule=_hard_rule(s, nu, m, L))
    return R.det, -R.kernel_at(s, s)


# --------------------------------------------------------------------------
# linear forms  sum_k p_k(t) F^(k)(t)

def _poly(text: str) -> tuple:
    return tuple(Fraction(c) for c in text.split())


def _trim(p) -> tuple:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _padd(a, b):
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


class LinearForm:
    """sum_k p_k(t) F^(k)(t) with exact rational polynomials p_k."""

    def __init__(self, terms: dict):
        self.terms = {k: _trim(p) for k, p in terms.items()}
        self.terms = {k: p for k, p in sorted(self.terms.items()) if p}

    @classmethod
    def parse(cls, spec: dict) -> "LinearForm":
        return cls({k: _poly(v) for k, v in spec.items()})

    @classmethod
    def deriv(cls, k: int) -> "LinearForm":
        return cls({k: (Fraction(1),)})

    @property
    def order(self) -> int:
        return max(self.terms, default=0)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        out = dict(self.terms)
        for k, p in other.terms.items():
            out[k] = _padd(out.get(k, ()), p)
        return LinearForm(out)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + other.times(Fraction(-1))

    def times(self, poly) -> "LinearForm":
        """Multiply by a scalar or by a polynomial given as a coefficient tuple."""
        if not isinstance(poly, (tuple, list)):
            poly = (Fraction(poly),)
        poly = tuple(Fraction(c) for c in poly)
        return LinearForm({k: _pmul(p, poly) for k, p in self.terms.items()})

    def derivative(self) -> "LinearForm":
        out: dict = {}
        for k, p in self.terms.items():
            dp = tuple(i * p[i] for i in range(1, len(p)))
            out[k] = _padd(out.get(k, ()), dp)
            out[k + 1] = _padd(out.get(k + 1, ()), p)
        return LinearForm(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearForm) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"LinearForm({self.terms!r})"

    def __call__(self, t, model: TWModel | None = None):
        if self.order > DERIV_LIMIT:
            raise DomainError(f"form needs F^({self.order}), model stops at {DERIV_LIMIT}")
        model = model or default_model()
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for k, p in self.terms.items():
            poly = np.polynomial.polynomial.polyval(t, [float(c) for c in p])
            out = out + poly * model(t, k)
        return float(out) if out.ndim == 0 else out


# Coefficient polynomials in t, ascending powers, keyed by derivative order.
_TABLE = {
    ("F", 1): {1: "0 0 3/10", 2: "-1/5"},
    ("F", 2): {1: "2/175 0 0 32/175", 2: "0 -16/175 0 0 9/200", 3: "0 0 -3/50", 4: "1/50"},
    ("F", 3): {1: "0 64/7875 0 0 1037/7875", 2: "0 0 -9/175 0 0 48/875",
               3: "-122/7875 0 0 -8/125 0 0 9/2000", 4: "0 16/875 0 0 -9/1000",
               5: "0 0 3/500", 6: "-1/750"},
    ("F_tilde", 1): {2: "-1/5"},
    ("F_tilde", 2): {1: "2/175", 2: "0 -16/175", 4: "1/50"},
    ("F_tilde", 3): {1: "0 64/7875", 2: "0 0 -24/875", 3: "-122/7875", 4: "0 16/875",
                     6: "-1/750"},
    ("FP", 1): {1: "0 0 -1/60", 2: "-1/10"},
    ("FP", 2): {1: "1/350 0 0 2/1575", 2: "0 11/1050 0 0 1/7200", 3: "0 0 1/600", 4: "1/200"},
    ("FP", 3): {1: "0 -1/1125 0 0 -41/283500", 2: "0 0 -11/6300 0 0 -1/47250",
                3: "-61/31500 0 0 -19/63000 0 0 -1/1296000", 4: "0 -11/10500 0 0 -1/72000",
                5: "0 0 -1/12000", 6: "-1/6000"},
    ("FD", 1): {1: "0 0 -1/60", 2: "-3/5"},
    ("FD", 2): {1: "-139/350 0 0 2/1575", 2: "0 -43/350 0 0 1/7200", 3: "0 0 1/100", 4: "9/50"},
    ("FD", 3): {1: "0 -562/7875 0 0 -41/283500", 2: "0 0 1/300 0 0 -1/47250",
                3: "5137/15750 0 0 9/7000 0 0 -1/1296000", 4: "0 129/1750 0 0 -1/12000",
                5: "0 0 -3/1000", 6: "-9/250"},
    ("Fstar", 1): {1: "0 -1/30", 2: "0 0 -1/60", 3: "-67/120"},
    ("Fstar", 2): {1: "0 0 2/525", 2: "-629/1200 0 0 23/12600", 3: "0 -899/8400 0 0 1/7200",
                   4: "0 0 67/7200", 5: "1493/9600"},
    ("Fstar", 3): {1: "-373/5250 0 0 -41/70875", 2: "0 -1781/28000 0 0 -71/283500",
                   3: "0 0 63/8000 0 0 -13/504000", 4: "41473/112000 0 0 13/12096 0 0 -1/1296000",
                   5: "0 131057/2016000 0 0 -67/864000", 6: "0 0 -1493/576000",
                   7: "-232319/8064000"},
}


def fform(family: str, j: int) -> LinearForm:
    """Exact linear form of a correction term; j = 0 gives the leading term."""
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if family in ("FS", "FS_tilde"):
        raise DomainError(f"{family} is not a linear form of derivatives of F")
    j = check_int("j", j, lo=0, hi=3)
    if j == 0:
        return LinearForm.deriv(1 if family == "Fstar" else 0)
    return LinearForm.parse(_TABLE[family, j])


def _fs(t, model: TWModel, tilde: bool):
    f0, f1, f2, f3, f4 = (model(t, k) for k in range(5))
    with np.errstate(divide="ignore", invalid="ignore"):
        if tilde:
            out = -0.5 * f1 + 0.25 * f1 ** 4 / f0 ** 3 - 0.375 * f2 ** 2 / f0 + 0.125 * f4
        else:
            out = (-0.75 * f1 ** 4 / f0 ** 3 + 1.5 * f1 ** 2 * f2 / f0 ** 2
                   - 0.375 * f2 ** 2 / f0 - 0.5 * f1 * f3 / f0 + 0.125 * f4)
    out = np.where(f0 > 0, out, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def coeff(family: str, j: int, t, model: TWModel | None = None):
    """Evaluate the correction term of the given family and order at t."""
    model = model or default_model()
    if family in ("FS", "FS_tilde"):
        if check_int("j", j, lo=2, hi=2) != 2:
            raise DomainError("only j = 2 is available for the Stirling families")
        return _fs(t, model, tilde=family == "FS_tilde")
    return fform(family, j)(t, model)


def relation_identities() -> dict:
    """Exact identities linking the families, as (lhs, rhs) linear forms."""
    F1, F2 = fform("F", 1), fform("F", 2)
    P1, P2 = fform("FP", 1), fform("FP", 2)
    D1, D2 = fform("FD", 1), fform("FD", 2)
    d = LinearForm.deriv
    t, t2, t3, t4 = (0, 1), (0, 0, 1), (0, 0, 0, 1), (0, 0, 0, 0, 1)
    Fr = Fraction
    return {
        "FD1 = FP1 - F''/2": (D1, P1 - d(2).times(Fr(1, 2))),
        "FD2 = FP2 - FP1''/2 - 5F'/12 - tF''/6 + F''''/8": (
            D2, P2 - P1.derivative().derivative().times(Fr(1, 2)) - d(1).times(Fr(5, 12))
            - d(2).times((0, Fr(1, 6))) + d(4).times(Fr(1, 8))),
        "F1 = F~1 + 3t^2 F'/10": (F1, fform("F_tilde", 1) + d(1).times((0, 0, Fr(3, 10)))),
        "FP1 = F1/2 - t^2 F'/6": (P1, F1.times(Fr(1, 2)) - d(1).times(t2).times(Fr(1, 6))),
        "FP2 = F2/4 - tF1/6 - t^2F1'/12 + t^3F'/18 + t^4F''/72": (
            P2, F2.times(Fr(1, 4)) - F1.times(t).times(Fr(1, 6))
            - F1.derivative().times(t2).times(Fr(1, 12)) + d(1).times(t3).times(Fr(1, 18))
            + d(2).times(t4).times(Fr(1, 72))),
    }


def relation_checks(t: float, model: TWModel | None = None, tol: float = 1e-10) -> dict:
    """Evaluate the linking identities at t; raise ToleranceExceeded on a mismatch."""
    t = check_real("t", t, lo=-8.0, hi=4.0)
    model = model or default_model()
    report = {}
    for name, (lhs, rhs) in relation_identities().items():
        diff = abs(lhs(t, model) - rhs(t, model))
        report[name] = diff
        if diff > tol:
            raise ToleranceExceeded(f"identity {name!r} fails at t={t}: mismatch {diff:.3g}")
    return report


# --------------------------------------------------------------------------
# residual checks

def _partial_sum(family: str, m: int, t, eps, model: TWModel):
    return sum(coeff(family, j, t, model) * eps ** j for j in range(m))


def hard_to_soft_residual(nu: int, t: float, m: int, model: TWModel | None = None,
                          scaled: bool = True) -> float:
    """h^(-m) (E2hard(phi_nu(t); nu) - sum_{j<m} F_j(t) h^j); tends to F_m(t)."""
    nu = check_int("nu", nu, lo=1)
    m = check_int("m", m, lo=0, hi=3)
    h = h_nu(nu)
    t = check_real("t", t, lo=-10.0, hi=6.0)
    if t >= 1.0 / h:
        raise DomainError(f"t must stay below 1/h = {1.0 / h:g}")
    model = model or default_model()
    diff = e2_hard(phi_nu(nu, t), nu) - _partial_sum("F", m, t, h, model)
    return diff / h ** m if scaled else diff


def poissonized_residual(r: float, l: int, m: int, model: TWModel | None = None,
                         scaled: bool = True) -> float:
    """r^(m/3) (E2hard(4r; l) - sum_{j<m} F^P_j(t) r^(-j/3)) at t = t_l(r)."""
    r = check_real("r", r, lo=0.0, strict_lo=True)
    l = check_int("l", l, lo=1)
    m = check_int("m", m, lo=0, hi=3)
    t = t_nu(l, r)
    if not -10.0 <= t <= 6.0:
        raise DomainError(f"t_l(r) = {t:g} outside the model window")
    model = model or default_model()
    eps = r ** (-1.0 / 3.0)
    diff = e2_hard(4.0 * r, l) - _partial_sum("FP", m, t, eps, model)
    return diff / eps ** m if scaled else diff


def l_sweep(x: float, t_lo: float, t_hi: float, half: bool = False) -> list[int]:
    """Integers l with t_l(x) (or t_{l-1/2}(x) if half) inside [t_lo, t_hi]."""
    c = x ** (1.0 / 6.0)
    root = 2.0 * math.sqrt(x)
    shift = 0.5 if half else 0.0
    lo = math.ceil(root + t_lo * c + shift)
    hi = math.floor(root + t_hi * c + shift)
    return [l for l in range(max(lo, 1), hi + 1)]


def gauss_bracket_errors(r: float, ts, model: TWModel | None = None):
    """Largest errors of F + F^P_1 r^(-1/3) for the scaled CDF at fixed real t.

    Returns (bracket, smooth): ``bracket`` evaluates the expansion at the
    continuous t although the probability only sees l = floor(2 sqrt(r) + t r^(1/6));
    ``smooth`` evaluates it at t_l(r) for the same l.
    """
    model = model or default_model()
    eps = r ** (-1.0 / 3.0)
    bracket = smooth = 0.0
    for t in np.asarray(ts, dtype=float):
        l = int(math.floor(2.0 * math.sqrt(r) + t * r ** (1.0 / 6.0)))
        exact = e2_hard(4.0 * r, l)
        tl = t_nu(l, r)
        bracket = max(bracket, abs(exact - _partial_sum("FP", 2, t, eps, model)))
        smooth = max(smooth, abs(exact - _partial_sum("FP", 2, tl, eps, model)))
    return bracket, smooth


def cdf_expansion(n: int, l: int, m: int, model: TWModel | None = None) -> float:
    """F(t) + sum_{1<=j<=m} F^D_j(t) n^(-j/3) at t = t_l(n)."""
    n = check_int("n", n, lo=1)
    l = check_int("l", l, lo=0)
    m = check_int("m", m, lo=0, hi=3)
    t = t_nu(l, n)
    if not -8.0 <= t <= 4.0:
        raise DomainError(f"t_l(n) = {t:g} outside [-8, 4]")
    return _partial_sum("FD", m + 1, t, n ** (-1.0 / 3.0), model or default_model())


def pdf_expansion(n: int, l: int, m: int, model: TWModel | None = None) -> float:
    """Approximation of P(L_n = l): n^(-1/6) (F'(t) + sum F*_j(t) n^(-j/3)), t = t_{l-1/2}(n)."""
    n = check_int("n", n, lo=1)
    l = check_int("l", l, lo=1)
    m = check_int("m", m, lo=0, hi=3)
    t = t_nu(l - 0.5, n)
    if not -8.0 <= t <= 4.0:
        raise DomainError(f"t_(l-1/2)(n) = {t:g} outside [-8, 4]")
    return n ** (-1.0 / 6.0) * _partial_sum("Fstar", m + 1, t, n ** (-1.0 / 3.0),
                                            model or default_model())


# --------------------------------------------------------------------------
# figure data

def figure_data(which: int, params=None, model: TWModel | None = None):
    """Columns and rows behind the five validation figures.

    1  hard-to-soft: t, F3, residual for each nu (params: nus, default 100, 800)
    2  Poissonized:  t, F3P, residual for each r (params: rs, default 250, 2000)
    3  CDF:          t, F, expansions m=1..3 at n, plus the scaled exact residual if n <= 80
    4  PDF:          same with F' and the F* terms
    5  Stirling:     t, F2S, F2S_tilde, plus n^(2/3) (exact - S) if n <= 80
    """
    which = check_int("which", which, lo=1, hi=5)
    params = dict(params or {})
    model = model or default_model()
    if which == 1:
        nus = params.get("nus", (100, 800))
        ts = np.linspace(-6.0, 2.0, int(params.get("npts", 33)))
        header = ["t", "F3"] + [f"nu{nu}" for nu in nus]
        rows = [[t, coeff("F", 3, t, model)] + [hard_to_soft_residual(nu, t, 3, model) for nu in nus]
                for t in ts]
        return header, rows
    if which == 2:
        rs = params.get("rs", (250, 2000))
        header = ["r", "l", "t", "F3P", "residual"]
        rows = []
        for r in rs:
            for l in l_sweep(r, -6.0, 2.0):
                t = t_nu(l, r)
                rows.append([r, l, t, coeff("FP", 3, t, model), poissonized_residual(r, l, 3, model)])
        return header, rows
    n = int(params.get("n", 1000))
    if which in (3, 4):
        from .exact_lis import EXACT_MAX_N, exact_dist
        pdf = which == 4
        family = "Fstar" if pdf else "FD"
        header = ["l", "t", "F1" if pdf else "F", "m1", "m2", "m3"]
        exact = exact_dist(n) if n <= EXACT_MAX_N else None
        if exact is not None:
            header += ["exact", "scaled_residual"]
        rows = []
        eps = n ** (-1.0 / 3.0)
        for l in l_sweep(n, -6.0, 3.0, half=pdf):
            t = t_nu(l - 0.5, n) if pdf else t_nu(l, n)
            scale = n ** (-1.0 / 6.0) if pdf else 1.0
            vals = [scale * _partial_sum(family, k + 1, t, eps, model) for k in range(4)]
            row = [l, t] + vals
            if exact is not None:
                ex = float(exact.pdf(l) if pdf else exact.cdf(l))
                row += [ex, (ex - vals[2]) / (scale * eps ** 3)]
            rows.append(row)
        return header, rows
    from .exact_lis import EXACT_MAX_N, exact_dist
    from .stirling import stirling_S, stirling_S_tilde
    exact = exact_dist(n) if n <= EXACT_MAX_N else None
    header = ["l", "t", "FS2", "FS2_tilde"]
    if exact is not None:
        header += ["S_residual", "S_tilde_residual"]
    rows = []
    for l in l_sweep(n, -5.0, 3.0):
        t = t_nu(l, n)
        row = [l, t, coeff("FS", 2, t, model), coeff("FS_tilde", 2, t, model)]
        if exact is not None:
            ex = float(exact.cdf(l))
            scale = n ** (2.0 / 3.0)
            row += [scale * (ex - stirling_S(n, l)), scale * (ex - stirling_S_tilde(n, l))]
        rows.append(row)
    return header, rows
