"""Tracy-Widom moments and the expansions of E(L_n) and Var(L_n).

The expansion coefficients mu_j, nu_j are polynomials in the moments
M_j = int t^j F'(t) dt.  mu_from_integral recomputes mu_j directly as
int t F*_j(t) dt from the density correction terms, which checks the
integration-by-parts reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._validate import check_int
from .errors import DomainError
from .exact_lis import exact_dist
from .expansions import coeff
from .tracy_widom import TW_DOMAIN, TWModel, build_tw_model

MOMENT_NODES = 400
MAX_MOMENT = 5
# the integrands carry up to seven derivatives of F, which are noisy near the
# ends of a Chebyshev domain; integrate well inside a wider model
MOMENT_MODEL_DOMAIN = (-12.0, 9.0)
MU_WINDOW = (-10.0, 7.0)


@lru_cache(maxsize=None)
def moment_model() -> TWModel:
    return build_tw_model(300, domain=MOMENT_MODEL_DOMAIN, window=MOMENT_MODEL_DOMAIN)


def _integrate(g, window, nodes: int = MOMENT_NODES) -> float:
    x, w = np.polynomial.legendre.leggauss(nodes)
    a, b = window
    t = 0.5 * (b - a) * x + 0.5 * (a + b)
    return float(0.5 * (b - a) * np.dot(w, g(t)))


def moment_M(j: int, window=TW_DOMAIN, model: TWModel | None = None) -> float:
    """M_j = int t^j F'(t) dt over the window (tails neglected)."""
    j = check_int("j", j, lo=0, hi=MAX_MOMENT)
    model = model or moment_model()
    return _integrate(lambda t: t ** j * model(t, 1), window)


@lru_cache(maxsize=None)
def _default_moments() -> tuple:
    return tuple(moment_M(j) for j in range(MAX_MOMENT + 1))


def _moments(M):
    return _default_moments() if M is None else M


def coeff_mu(j: int, M=None) -> float:
    """mu_j (j = 0..3) from the moments M_1..M_4."""
    j = check_int("j", j, lo=0, hi=3)
    M = _moments(M)
    if j == 0:
        return M[1]
    if j == 1:
        return M[2] / 60
    if j == 2:
        return 89 / 350 - M[3] / 1400
    return 538 / 7875 * M[1] + 281 / 4536000 * M[4]


def coeff_nu(j: int, M=None) -> float:
    """nu_j (j = 0..3) from the moments M_1..M_5."""
    j = check_int("j", j, lo=0, hi=3)
    M = _moments(M)
    M1, M2, M3, M4, M5 = M[1:6]
    if j == 0:
        return M2 - M1 * M1
    if j == 1:
        return -67 / 60 + (M3 - M1 * M2) / 30
    if j == 2:
        return -57 / 175 * M1 + M1 * M3 / 700 - M2 * M2 / 3600 - 29 / 25200 * M4
    return (-1076 / 7875 * M1 * M1 - 281 / 2268000 * M1 * M4 + 893 / 7875 * M2
            + M2 * M3 / 42000 + 227 / 2268000 * M5)


def mu_from_integral(j: int, window=MU_WINDOW, model: TWModel | None = None) -> float:
    """int t F*_j(t) dt over the window."""
    j = check_int("j", j, lo=1, hi=3)
    model = model or moment_model()
    return _integrate(lambda t: t * coeff("Fstar", j, t, model), window)


@dataclass(frozen=True)
class MomentTable:
    M: tuple
    mu: tuple
    nu: tuple

    def to_dict(self, digits: int = 14) -> dict:
        fmt = lambda v: float(f"{v:.{digits}g}")  # noqa: E731
        out = {f"M{j}": fmt(v) for j, v in enumerate(self.M)}
        out.update({f"mu{j}": fmt(v) for j, v in enumerate(self.mu)})
        out.update({f"nu{j}": fmt(v) for j, v in enumerate(self.nu)})
        return out


def moment_table(model: TWModel | None = None) -> MomentTable:
    M = _default_moments() if model is None else tuple(
        moment_M(j, model=model) for j in range(MAX_MOMENT + 1))
    return MomentTable(M, tuple(coeff_mu(j, M) for j in range(4)),
                       tuple(coeff_nu(j, M) for j in range(4)))


def expected_value(n: float, m: int = 3, M=None) -> float:
    """2 sqrt(n) + 1/2 + sum_{j<=m} mu_j n^(1/6 - j/3)."""
    m = check_int("m", m, lo=0, hi=3)
    if n < 4:
        raise DomainError("expected_value needs n >= 4")
    return 2 * math.sqrt(n) + 0.5 + sum(coeff_mu(j, M) * n ** (1 / 6 - j / 3) for j in range(m + 1))


def variance(n: float, m: int = 3, M=None) -> float:
    """sum_{j<=m} nu_j n^(1/3 - j/3)."""
    m = check_int("m", m, lo=0, hi=3)
    if n < 4:
        raise DomainError("variance needs n >= 4")
    return sum(coeff_nu(j, M) * n ** (1 / 3 - j / 3) for j in range(m + 1))


def exact_mean_variance(n: int):
    d = exact_dist(n)
    return float(d.mean()), float(d.variance())
