import math

import pytest

from lisdist.errors import DomainError
from lisdist.exact_lis import exact_dist
from lisdist.expansions import coeff, l_sweep, t_nu
from lisdist.stirling import (_a, _bracket_solve, aux, solve_rn, stirling_eval, stirling_S,
                              stirling_S_tilde, tau_n)


def residual(n: int, tilde: bool = False) -> float:
    d = exact_dist(n)
    S = stirling_S_tilde if tilde else stirling_S
    fam = "FS_tilde" if tilde else "FS"
    return max(abs(float(d.cdf(l)) - S(n, l) - coeff(fam, 2, t_nu(l, n)) * n ** (-2 / 3))
               for l in l_sweep(n, -5.0, 3.0))


@pytest.fixture(scope="module")
def residuals():
    return {n: residual(n) for n in (30, 60)}


def test_residual_bound(residuals):
    assert residuals[60] <= 0.5 / 60


def test_residual_order(residuals):
    assert 1.4 <= residuals[30] / residuals[60] <= 3.5


def test_simplified_formula_order():
    r30, r60 = residual(30, True), residual(60, True)
    assert r60 <= 0.5 / 60
    assert r30 / r60 > 1.4


def test_tau():
    assert tau_n(1) == pytest.approx(math.e / math.sqrt(2 * math.pi), rel=1e-14)
    assert tau_n(100) == pytest.approx(1 + 1 / 1200 + 1 / 288e4, rel=1e-8)


def test_saddle_point_equation():
    for n, l in ((40, 9), (60, 12), (30, 3)):
        r = solve_rn(n, l)
        a, _ = aux(l, r)
        assert abs(a - n) <= 1e-3 * n


def test_bracket_agrees_with_newton():
    assert _bracket_solve(12, 60, 15.0, 64 * 60.0) == pytest.approx(solve_rn(60, 12), rel=1e-4)
    assert _bracket_solve(3, 30, 7.5, 64 * 30.0) == pytest.approx(solve_rn(30, 3), rel=1e-4)


def test_a_increasing():
    vals = [_a(8, r) for r in (10.0, 20.0, 40.0, 80.0)]
    assert all(x < y for x, y in zip(vals, vals[1:]))


def test_large_l():
    assert stirling_S(20, 20) == 1.0
    assert stirling_S_tilde(20, 25) == 1.0
    assert stirling_S(20, 25, with_tau=True) == tau_n(20)
    assert solve_rn(20, 30) == 20.0


def test_eval_summary():
    out = stirling_eval(40, 10)
    assert set(out) == {"S", "r_n", "a", "b"}
    assert out["a"] == pytest.approx(40, rel=1e-3)
    assert stirling_eval(40, 10, simplified=True)["r_n"] == 40.0


def test_domain():
    with pytest.raises(DomainError):
        stirling_S(5, 2)
    with pytest.raises(DomainError):
        solve_rn(1000, 10)
