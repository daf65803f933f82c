"""Exact linear F-forms of the resolvent traces u_jk.

Everything lives in Q[s][q, q'] where q is the Hastings-McLeod solution of
q'' = s q + 2 q^3, and F'/F = q'^2 - s q^2 - q^4.  Higher F^(n)/F, the
functions q_n and the derivatives u_jk' = -q_j q_k are all elements of this
ring.  A candidate representation u = sum_k p_k F^(k)/F is found by comparing
coefficients of the q-monomials, which gives an overdetermined linear system
over Q[s]; it is solved by fraction-free elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import numpy as np

from ._validate import check_int
from .errors import DomainError, LisdistError, SingularSystem, ToleranceExceeded

Rat = Fraction

MAX_ORDER = 12
MAX_TABLE_SUM = 10


# --------------------------------------------------------------------------
# Q[s]

class PolyS:
    """Dense polynomial in s with rational coefficients (ascending powers)."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def const(cls, x):
        return cls((x,))

    @classmethod
    def s(cls):
        return cls((0, 1))

    def __bool__(self):
        return bool(self.c)

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def __eq__(self, other):
        if not isinstance(other, PolyS):
            other = PolyS.const(other)
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __add__(self, other):
        if not isinstance(other, PolyS):
            other = PolyS.const(other)
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        return PolyS([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self):
        return PolyS([-x for x in self.c])

    def __sub__(self, other):
        return self + (-other if isinstance(other, PolyS) else PolyS.const(-Fraction(other)))

    def __mul__(self, other):
        if not isinstance(other, PolyS):
            other = Fraction(other)
            return PolyS([x * other for x in self.c])
        if not self.c or not other.c:
            return PolyS()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    out[i + j] += x * y
        return PolyS(out)

    __rmul__ = __mul__

    def deriv(self):
        return PolyS([k * x for k, x in enumerate(self.c)][1:])

    def __call__(self, s):
        total = 0.0 * s
        for x in reversed(self.c):
            total = total * s + float(x)
        return total

    def shift(self, k: int):
        # multiply by s^k
        return PolyS([0] * k + list(self.c)) if self.c else self

    def divmod(self, other: "PolyS"):
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        r = list(self.c)
        q = [Fraction(0)] * max(len(r) - len(other.c) + 1, 0)
        lead = other.c[-1]
        for k in range(len(q) - 1, -1, -1):
            f = r[k + len(other.c) - 1] / lead
            q[k] = f
            if f:
                for i, y in enumerate(other.c):
                    r[k + i] -= f * y
        return PolyS(q), PolyS(r)

    def __repr__(self):
        return f"PolyS({[str(x) for x in self.c]})"

    def text(self) -> str:
        return "[" + ", ".join(str(x) for x in self.c) + "]" if self.c else "[0]"


ZERO = PolyS()
ONE = PolyS.const(1)
S = PolyS.s()


# --------------------------------------------------------------------------
# Q[s][q, q']

class QQPoly:
    """Map (alpha, beta) -> PolyS for the monomial q^alpha q'^beta."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def mono(cls, alpha: int, beta: int, coeff=ONE):
        if not isinstance(coeff, PolyS):
            coeff = PolyS.const(coeff)
        return cls({(alpha, beta): coeff})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, QQPoly) and self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return QQPoly(out)

    def __neg__(self):
        return QQPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QQPoly):
            return QQPoly({k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                out[key] = out.get(key, ZERO) + c1 * c2
        return QQPoly(out)

    __rmul__ = __mul__

    @property
    def deg_q(self) -> int:
        return max((a + b for a, b in self.terms), default=-1)

    def monomials(self) -> list:
        return sorted(self.terms, key=_mono_key)

    def __repr__(self):
        body = " + ".join(f"{self.terms[k].text()}*q^{k[0]}*q'^{k[1]}" for k in self.monomials())
        return f"QQPoly({body or '0'})"

    def evaluate(self, s, q, qp):
        return sum(c(s) * q ** a * qp ** b for (a, b), c in self.terms.items())


def _mono_key(m):
    # graded lexicographic order in (alpha, beta)
    return (m[0] + m[1], m[0], m[1])


Q = QQPoly.mono(1, 0)
QP = QQPoly.mono(0, 1)


def pii_diff(T: QQPoly) -> QQPoly:
    """d/ds with q'' replaced by s q + 2 q^3."""
    out: dict = {}

    def put(key, c):
        if c:
            out[key] = out.get(key, ZERO) + c

    for (a, b), c in T.terms.items():
        put((a, b), c.deriv())
        if a:
            put((a - 1, b + 1), c * a)
        if b:
            put((a + 1, b - 1), c.shift(1) * b)
            put((a + 3, b - 1), c * (2 * b))
    return QQPoly(out)


@lru_cache(maxsize=None)
def F_over_F(n: int) -> QQPoly:
    """F^(n)/F as an element of Q[s][q, q']."""
    n = check_int("n", n, lo=0, hi=4 * MAX_ORDER)
    if n == 0:
        return QQPoly.mono(0, 0)
    if n == 1:
        return QQPoly({(0, 2): ONE, (2, 0): -S, (4, 0): PolyS.const(-1)})
    prev = F_over_F(n - 1)
    return pii_diff(prev) + F_over_F(1) * prev


# --------------------------------------------------------------------------
# F-forms and the solver

class NoSolution(LisdistError):
    """No linear F-form of the requested order; ``reason`` is one of REASONS."""

    REASONS = ("inconsistent", "non-polynomial", "derivative-mismatch")

    def __init__(self, reason: str, detail: str = ""):
        if reason not in self.REASONS:
            raise ValueError(reason)
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass(frozen=True)
class FForm:
    """T = sum_{k=1..order} p[k-1](s) F^(k)(s)/F(s)."""

    order: int
    p: tuple
    label: tuple = ()

    def as_qq(self) -> QQPoly:
        total = QQPoly()
        for k, pk in enumerate(self.p, start=1):
            if pk:
                total = total + F_over_F(k) * pk
        return total

    def coeff_lists(self) -> list:
        return [[str(x) for x in pk.c] or ["0"] for pk in self.p]

    def text(self) -> str:
        parts = []
        for k, pk in enumerate(self.p):
            parts.append(pk.text() + ("" if k == 0 else "*D" if k == 1 else f"*D^{k}"))
        return " + ".join(parts)

    def evaluate(self, t, model) -> float:
        F0 = model(t)
        return sum(pk(t) * model(t, k) for k, pk in enumerate(self.p, start=1)) / F0


# integer polynomials (tuples of ints, ascending) for the elimination

def _iz(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def _isub(a, b):
    if len(a) < len(b):
        a = a + (0,) * (len(b) - len(a))
    return _iz([x - (b[i] if i < len(b) else 0) for i, x in enumerate(a)])


def _imul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _idiv_exact(a, b):
    if not a:
        return ()
    r = list(a)
    nb = len(b)
    q = [0] * (len(r) - nb + 1)
    lead = b[-1]
    for k in range(len(q) - 1, -1, -1):
        num = r[k + nb - 1]
        if num:
            f, rem = divmod(num, lead)
            if rem:
                raise ArithmeticError("inexact division in fraction-free elimination")
            q[k] = f
            for i, y in enumerate(b):
                r[k + i] -= f * y
    if any(r):
        raise ArithmeticError("inexact division in fraction-free elimination")
    return _iz(q)


def _integer_row(row):
    den = 1
    for p in row:
        for x in p.c:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return [_iz(int(x * den) for x in p.c) for p in row]


def _size(p):
    return (len(p), sum(abs(x).bit_length() for x in p))


def solve_over_Qs(A, b):
    """Unique solution x in Q(s)^N of A x = b (A is M x N with M >= N).

    Returns (numerators, denominator) as integer polynomials with
    x_i = num_i / den.  Raises NoSolution('inconsistent') if the system has no
    solution and SingularSystem if the columns are dependent.
    """
    M, N = len(A), len(A[0]) if A else 0
    rows = [_integer_row(list(A[i]) + [b[i]]) for i in range(M)]
    prev = (1,)
    r = 0
    pivcols = []
    for col in range(N):
        cand = [i for i in range(r, M) if rows[i][col]]
        if not cand:
            continue
        piv = min(cand, key=lambda i: _size(rows[i][col]))
        rows[r], rows[piv] = rows[piv], rows[r]
        P = rows[r][col]
        for i in range(r + 1, M):
            ri, a = rows[i], rows[i][col]
            rows[i] = [() if j <= col else
                       _idiv_exact(_isub(_imul(P, ri[j]), _imul(a, rows[r][j])), prev)
                       for j in range(N + 1)]
        prev = P
        pivcols.append(col)
        r += 1
    for i in range(r, M):
        if rows[i][N]:
            raise NoSolution("inconsistent", f"row {i} reduces to 0 = nonzero")
    if r < N:
        raise SingularSystem(f"system has rank {r} < {N} unknowns")
    # Cramer-style back substitution: x_i = y_i / D with D the last pivot
    D = rows[N - 1][N - 1]
    y = [()] * N
    for i in range(N - 1, -1, -1):
        acc = _imul(D, rows[i][N])
        for j in range(i + 1, N):
            acc = _isub(acc, _imul(rows[i][j], y[j]))
        y[i] = _idiv_exact(acc, rows[i][i])
    return y, D


def _to_polys(nums, den, what: str):
    Dp = PolyS(den)
    out = []
    for i, num in enumerate(nums):
        q, rem = PolyS(num).divmod(Dp)
        if rem:
            raise NoSolution("non-polynomial", f"{what} component {i + 1} is not a polynomial")
        out.append(q)
    return out


def _system(columns, rhs: QQPoly):
    monos = set(rhs.terms)
    for c in columns:
        monos.update(c.terms)
    monos = sorted(monos, key=_mono_key)
    A = [[c.terms.get(m, ZERO) for c in columns] for m in monos]
    b = [rhs.terms.get(m, ZERO) for m in monos]
    return A, b


def lform_system(T_prime: QQPoly, n: int):
    """Coefficient system for T' = sum p_k (F^(k)/F)' + r_k F^(k)/F, unknowns (p, r)."""
    cols = [pii_diff(F_over_F(k)) for k in range(1, n + 1)] + [F_over_F(k) for k in range(1, n + 1)]
    return _system(cols, T_prime)


def lform_solve(T_prime: QQPoly, n: int, label: tuple = ()) -> FForm:
    """Linear F-form of order n for a quantity T vanishing at +infinity, given T'."""
    n = check_int("n", n, lo=1, hi=MAX_ORDER)
    A, b = lform_system(T_prime, n)
    nums, den = solve_over_Qs(A, b)
    x = _to_polys(nums, den, "solution")
    p, r = x[:n], x[n:]
    for k in range(n):
        if p[k].deriv() != r[k]:
            raise NoSolution("derivative-mismatch", f"r_{k + 1} differs from p_{k + 1}'")
    form = FForm(n, tuple(p), label)
    _verify(form, T_prime, derivative=True)
    return form


def lform_solve_direct(T: QQPoly, n: int, label: tuple = ()) -> FForm:
    """Linear F-form of order n for T itself (no differentiation)."""
    n = check_int("n", n, lo=1, hi=MAX_ORDER)
    A, b = _system([F_over_F(k) for k in range(1, n + 1)], T)
    nums, den = solve_over_Qs(A, b)
    form = FForm(n, tuple(_to_polys(nums, den, "solution")), label)
    _verify(form, T, derivative=False)
    return form


def _verify(form: FForm, target: QQPoly, derivative: bool):
    got = form.as_qq()
    if derivative:
        got = pii_diff(got)
    if got != target:
        raise ArithmeticError("back-substitution does not reproduce the target")


# --------------------------------------------------------------------------
# the table

class _Table:
    def __init__(self):
        self.forms: dict = {}
        self.qq: dict = {}
        self.q: dict = {0: Q}

    def u_qq(self, j: int, k: int) -> QQPoly:
        key = (max(j, k), min(j, k))
        if key not in self.qq:
            self.form(*key)
        return self.qq[key]

    def q_n(self, n: int) -> QQPoly:
        if n in self.q:
            return self.q[n]
        if n == 1:
            val = QP + self.u_qq(0, 0) * Q
        else:
            val = self.q_n(n - 2) * S - self.u_qq(n - 2, 1) * Q + self.u_qq(n - 2, 0) * self.q_n(1)
            if n >= 3:
                val = val + self.q_n(n - 3) * (n - 2)
        self.q[n] = val
        return val

    def form(self, j: int, k: int) -> FForm:
        key = (max(j, k), min(j, k))
        if key not in self.forms:
            Tp = -(self.q_n(key[0]) * self.q_n(key[1]))
            f = lform_solve(Tp, key[0] + key[1] + 1, label=("u",) + key)
            self.forms[key] = f
            self.qq[key] = f.as_qq()
        return self.forms[key]


_TABLE = _Table()


def st_q(n: int) -> QQPoly:
    """q_n in Q[s][q, q']."""
    return _TABLE.q_n(check_int("n", n, lo=0, hi=MAX_TABLE_SUM + 1))


def st_u_prime(j: int, k: int) -> QQPoly:
    """u_jk' = -q_j q_k."""
    j = check_int("j", j, lo=0, hi=MAX_TABLE_SUM)
    k = check_int("k", k, lo=0, hi=MAX_TABLE_SUM)
    return -(st_q(j) * st_q(k))


def st_form(j: int, k: int) -> FForm:
    if j + k > MAX_TABLE_SUM:
        raise DomainError(f"j + k must be <= {MAX_TABLE_SUM}")
    return _TABLE.form(check_int("j", j, lo=0), check_int("k", k, lo=0))


def st_table(max_sum: int = 8) -> dict:
    """{(j, k): FForm} for k <= j and j + k <= max_sum; u_kj = u_jk."""
    max_sum = check_int("max_sum", max_sum, lo=0, hi=MAX_TABLE_SUM)
    out = {}
    for total in range(max_sum + 1):
        for k in range(total // 2 + 1):
            j = total - k
            out[j, k] = st_form(j, k)
    return out


def u_qq(j: int, k: int) -> QQPoly:
    return _TABLE.u_qq(j, k)


def _det_qq(rows, cols) -> QQPoly:
    m = len(rows)
    total = QQPoly()
    for perm in permutations(range(m)):
        sign = 1
        for i in range(m):
            for l in range(i + 1, m):
                if perm[i] > perm[l]:
                    sign = -sign
        term = QQPoly.mono(0, 0, sign)
        for i in range(m):
            term = term * u_qq(rows[i], cols[perm[i]])
        total = total + term
    return total


def minor_order(rows, cols) -> int:
    return sum(rows) + sum(cols) + len(rows)


def minor_fform(rows, cols, order: int | None = None) -> FForm:
    """Linear F-form of det(u_{rows[a], cols[b]}) at the conjectured order."""
    rows, cols = tuple(int(r) for r in rows), tuple(int(c) for c in cols)
    if len(rows) != len(cols) or not rows:
        raise DomainError("rows and cols must be non-empty and of equal length")
    n = minor_order(rows, cols) if order is None else order
    if n > MAX_ORDER:
        raise DomainError(f"order {n} exceeds the cap {MAX_ORDER}")
    return lform_solve_direct(_det_qq(rows, cols), n, label=("minor", rows, cols))


def no_form_up_to(T: QQPoly, max_order: int = MAX_ORDER) -> dict:
    """{order: reason} for every order up to max_order that has no F-form."""
    out = {}
    for n in range(1, max_order + 1):
        try:
            lform_solve_direct(T, n)
        except NoSolution as exc:
            out[n] = exc.reason
    return out


# --------------------------------------------------------------------------
# numeric cross-check

@lru_cache(maxsize=None)
def crosscheck_model():
    from .tracy_widom import build_tw_model
    return build_tw_model(320, domain=(-12.0, 9.0), deriv_limit=MAX_ORDER + 1, window=(-12.0, 9.0))


def trace_matrix(t: float, jmax: int) -> np.ndarray:
    """U[j, k] = u_jk(t) by Nystrom quadrature."""
    from .specfun import airy_derivs
    from .tracy_widom import DEFAULT_M, _resolvent
    R = _resolvent(float(t), DEFAULT_M)
    x, w = R.rule.nodes, R.rule.weights
    A = np.array(airy_derivs(x, jmax))
    Sx = np.array([R.solve(a) for a in A])
    return (A * w) @ Sx.T


def trace_value(label: tuple, t: float) -> float:
    if not label:
        raise DomainError("F-form carries no label to compare against")
    if label[0] == "u":
        _, j, k = label
        return float(trace_matrix(t, max(j, k))[j, k])
    if label[0] == "minor":
        _, rows, cols = label
        U = trace_matrix(t, max(rows + cols))
        return float(np.linalg.det(U[np.ix_(rows, cols)]))
    raise DomainError(f"unknown label {label!r}")


def numeric_crosscheck(form: FForm, targets=(-2.0, 0.0, 1.0), tol: float = 1e-6, model=None) -> float:
    """max |sum p_k F^(k)/F - trace value| over targets; raises above tol."""
    model = model or crosscheck_model()
    dev = max(abs(form.evaluate(t, model) - trace_value(form.label, t)) for t in targets)
    if dev > tol:
        raise ToleranceExceeded(f"F-form {form.label} deviates by {dev:.3g} > {tol:g}")
    return dev
