"""Symbolic re-derivation of coefficient families from one another.

The Poissonized terms follow from the hard-to-soft terms by the change of
variables nu = l, s = 4r; the de-Poissonized terms follow from the
Poissonized ones through the Jasz expansion.  Both are redone in sympy
with truncated power series and compared with the stored tables.
"""

import pytest

sp = pytest.importorskip("sympy")

from lisdist.expansions import fform  # noqa: E402

J = 6
t, e, x = sp.symbols("t e x")
D = sp.symbols("D0:16")


def rat(c):
    return sp.Rational(c.numerator, c.denominator)


def tmul(a, b):
    out = [0] * (J + 1)
    for i, u in enumerate(a):
        if u == 0:
            continue
        for j in range(J + 1 - i):
            if b[j] != 0:
                out[i + j] += u * b[j]
    return [sp.expand(c) for c in out]


def binom_series(alpha):
    c, out = sp.Integer(1), []
    for k in range(J + 1):
        out.append(c)
        c = c * (alpha - k) / (k + 1)
    return out


def as_expr(form):
    return sp.expand(sum(rat(c) * t ** i * D[k] for k, p in form.terms.items() for i, c in enumerate(p)))


def test_poissonized_from_hard_to_soft():
    N = 4

    def Fk(k, var):
        d = sp.expand(var - t)
        return sum(D[k + i] * d ** i / sp.factorial(i) for i in range(N))

    def lf(form, var):
        return sum(rat(c) * var ** i * Fk(k, var) for k, p in form.terms.items() for i, c in enumerate(p))

    s = sp.series(t * (1 + t * e / 2) ** sp.Rational(-1, 3), e, 0, N).removeO()
    h = sp.series(e / (2 * (1 + t * e / 2) ** sp.Rational(2, 3)), e, 0, N).removeO()
    E = sum(lf(fform("F", j), s) * h ** j for j in range(4))
    E = sp.expand(sp.series(sp.expand(E), e, 0, N).removeO())
    for j in range(4):
        assert sp.expand(E.coeff(e, j) - as_expr(fform("FP", j))) == 0, j


def test_depoissonized_from_poissonized():
    # Charlier weights b_j(n) from (j+1) b_{j+1} = -j b_j - n b_{j-1}, independent of the package
    n = sp.Symbol("n")
    b = [sp.Integer(1), sp.Integer(0)]
    for j in range(1, J):
        b.append(sp.expand(-(j * b[j] + n * b[j - 1]) / (j + 1)))
    # r = n (1 + x), n = e^-3: t_l(r) = t + delta(x)
    sq = binom_series(sp.Rational(1, 2))
    inner = [(2 / e) * (1 - sq[0]) + t] + [-(2 / e) * c for c in sq[1:]]
    T = tmul(inner, binom_series(sp.Rational(-1, 6)))
    delta = [sp.expand(T[0] - t)] + T[1:]
    assert delta[0] == 0
    dpow = [[sp.Integer(1)] + [0] * J]
    for _ in range(J):
        dpow.append(tmul(dpow[-1], delta))

    def shifted(form):
        out = [0] * (J + 1)
        for k, p in form.terms.items():
            poly = [0] * (J + 1)
            for i, c in enumerate(p):
                for m in range(min(i, J) + 1):
                    poly = [a + rat(c) * sp.binomial(i, m) * t ** (i - m) * q for a, q in zip(poly, dpow[m])]
            Fk = [0] * (J + 1)
            for i in range(J + 1):
                Fk = [a + D[k + i] / sp.factorial(i) * q for a, q in zip(Fk, dpow[i])]
            out = [a + q for a, q in zip(out, tmul(poly, Fk))]
        return out

    P = [0] * (J + 1)
    for k in range(4):
        s = tmul(shifted(fform("FP", k)), binom_series(sp.Rational(-k, 3)))
        P = [a + e ** k * q for a, q in zip(P, s)]
    total = sum(b[j].subs(n, e ** -3) * P[j] * sp.factorial(j) * e ** (3 * j) for j in range(J + 1) if j != 1)
    total = sp.expand(total)
    for k in range(4):
        assert sp.expand(total.coeff(e, k) - as_expr(fform("FD", k))) == 0, k
