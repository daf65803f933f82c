"""Gauss-Legendre quadrature and Nystrom discretisation of Fredholm determinants.

An integral operator with kernel K on (a, b) is replaced by the matrix
``I - W^(1/2) K W^(1/2)`` built on an m-point Gauss-Legendre rule.  For
analytic kernels the determinant and the resolvent solves converge
spectrally in m.  Semi-infinite intervals (a, inf) are truncated at
``max(a, 0) + L`` which is harmless for kernels with (super)exponential
decay such as the Airy kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.linalg.lapack import dgecon

from ._validate import check_int
from .errors import DomainError, NonFinite, SingularSystem

DEFAULT_M = 80
DEFAULT_L = 14.0
COND_LIMIT = 1e14


@dataclass(frozen=True)
class QuadRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]


@dataclass(frozen=True)
class KernelSpec:
    """A kernel K(x, y) together with its diagonal limit.

    ``eval`` and ``diag`` must accept numpy arrays (broadcasting).
    ``decay_scale`` is the constant M of a bound |K(x,y)| <= M exp(-(x+y));
    kernels without it cannot be used on semi-infinite intervals.
    ``nodal`` optionally builds the full matrix K(x_i, x_j) on distinct
    nodes in one go (integrable kernels factor through a few functions).
    """

    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    diag: Callable[[np.ndarray], np.ndarray]
    decay_scale: float | None = None
    symmetric: bool = True
    name: str = ""
    nodal: Callable[[np.ndarray], np.ndarray] | None = None

    def matrix(self, x: np.ndarray, y: np.ndarray | None = None) -> np.ndarray:
        if y is None:
            if self.nodal is not None:
                return self.nodal(np.asarray(x, dtype=float))
            X, Y = np.meshgrid(x, x, indexing="ij")
            off = ~np.eye(len(x), dtype=bool)
            out = np.empty(X.shape)
            out[off] = self.eval(X[off], Y[off])
            out[~off] = self.diag(x)
            return out
        X, Y = np.meshgrid(x, y, indexing="ij")
        out = np.asarray(self.eval(X, Y), dtype=float)
        same = X == Y
        if same.any():
            out[same] = self.diag(X[same])
        return out


@dataclass(frozen=True)
class FiniteRankKernel:
    """K(x, y) = sum_a c_a u_a(x) v_a(y); ``terms`` holds (c_a, u_a, v_a)."""

    terms: tuple = field(default_factory=tuple)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for c, u, v in self.terms:
            out = out + c * u(x) * v(y)
        return out


@dataclass(frozen=True)
class NystromSystem:
    matrix: np.ndarray
    rule: QuadRule


@lru_cache(maxsize=64)
def _legendre_reference(m: int) -> tuple[np.ndarray, np.ndarray]:
    # Newton iteration on P_m from asymptotic initial guesses; nodes returned ascending
    k = np.arange(1, m + 1)
    x = np.cos(np.pi * (k - 0.25) / (m + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(2, m + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        dp = m * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    else:
        raise RuntimeError(f"Legendre node iteration did not converge for m={m}")
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(2, m + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = m * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


def gauss_legendre(m: int, a: float = -1.0, b: float = 1.0) -> QuadRule:
    """m-point Gauss-Legendre rule on (a, b), exact for degree <= 2m-1."""
    m = check_int("m", m, lo=1)
    if not a < b:
        raise DomainError(f"need a < b, got ({a}, {b})")
    x, w = _legendre_reference(m)
    half = 0.5 * (b - a)
    return QuadRule(half * x + 0.5 * (a + b), half * w, (float(a), float(b)))


def _finite_interval(K: KernelSpec | None, interval: Sequence[float], L: float):
    a, b = float(interval[0]), float(interval[1])
    if np.isinf(b):
        if K is not None and K.decay_scale is None:
            raise DomainError(f"kernel {K.name!r} has no decay bound; cannot truncate ({a}, inf)")
        b = max(a, 0.0) + L
    if not a < b:
        raise DomainError(f"empty interval ({a}, {b})")
    return a, b


def nystrom(K: KernelSpec, interval, m: int = DEFAULT_M, L: float = DEFAULT_L) -> NystromSystem:
    a, b = _finite_interval(K, interval, L)
    return nystrom_rule(K, gauss_legendre(m, a, b))


def nystrom_rule(K: KernelSpec, rule: QuadRule) -> NystromSystem:
    """Nystrom matrix for an arbitrary positive-weight rule (e.g. a substituted one)."""
    sw = np.sqrt(rule.weights)
    Kmat = K.matrix(rule.nodes)
    if not np.all(np.isfinite(Kmat)):
        a, b = rule.interval
        raise NonFinite(f"kernel {K.name!r} produced non-finite values on ({a}, {b})")
    A = np.eye(len(sw)) - sw[:, None] * Kmat * sw[None, :]
    return NystromSystem(A, rule)


def _lu_det(lu: np.ndarray, piv: np.ndarray) -> float:
    d = np.diag(lu)
    sign = -1.0 if np.count_nonzero(piv != np.arange(len(piv))) % 2 else 1.0
    return float(sign * np.prod(d))


def fredholm_det(K: KernelSpec, interval, m: int = DEFAULT_M, L: float = DEFAULT_L) -> float:
    """det(I - K) on L^2(interval) by the Nystrom method."""
    return _system_det(nystrom(K, interval, m, L))


def fredholm_det_rule(K: KernelSpec, rule: QuadRule) -> float:
    return _system_det(nystrom_rule(K, rule))


def _system_det(system: NystromSystem) -> float:
    lu, piv = lu_factor(system.matrix, check_finite=False)
    return _lu_det(lu, piv)


def _values(f, x):
    if callable(f):
        return np.asarray(f(x), dtype=float)
    arr = np.asarray(f, dtype=float)
    if arr.shape != x.shape:
        raise DomainError("node values have the wrong shape")
    return arr


class Resolvent:
    """Factorised Nystrom system; reused for many solves on one interval."""

    def __init__(self, K: KernelSpec, interval=None, m: int = DEFAULT_M, L: float = DEFAULT_L,
                 rule: QuadRule | None = None):
        self.kernel = K
        if rule is not None:
            self.system = nystrom_rule(K, rule)
        elif interval is not None:
            self.system = nystrom(K, interval, m, L)
        else:
            raise DomainError("need an interval or a quadrature rule")
        self.rule = self.system.rule
        self._sw = np.sqrt(self.rule.weights)
        A = self.system.matrix
        self._lu = lu_factor(A, check_finite=False)
        anorm = np.max(np.sum(np.abs(A), axis=0))
        rcond, info = dgecon(self._lu[0], anorm, norm="1")
        self.cond = np.inf if rcond == 0 else 1.0 / rcond
        self.det = _lu_det(*self._lu)

    def _check(self):
        if self.cond > COND_LIMIT:
            raise SingularSystem(f"Nystrom matrix is numerically singular (cond ~ {self.cond:.3g})")

    def solve(self, g) -> np.ndarray:
        """Node values of (I - K)^{-1} g."""
        self._check()
        x = self.rule.nodes
        z = lu_solve(self._lu, self._sw * _values(g, x), check_finite=False)
        return z / self._sw

    def inner(self, u, v) -> float:
        """<v, (I - K)^{-1} u> = tr((I - K)^{-1} u (x) v)."""
        x = self.rule.nodes
        return float(np.sum(self.rule.weights * _values(v, x) * self.solve(u)))

    def kernel_at(self, x: float, y: float) -> float:
        """Resolvent kernel R(x, y) of K(I - K)^{-1}."""
        nodes = self.rule.nodes
        col = self.kernel.matrix(nodes, np.array([y]))[:, 0]
        row = self.kernel.matrix(np.array([x]), nodes)[0]
        kxy = self.kernel.matrix(np.array([x]), np.array([y]))[0, 0]
        f = self.solve(col)
        return float(kxy + np.sum(self.rule.weights * row * f))


def resolvent_solve(K: KernelSpec, interval, m: int, g) -> np.ndarray:
    return Resolvent(K, interval, m).solve(g)


def trace_u(K: KernelSpec, interval, u, v, m: int = DEFAULT_M) -> float:
    return Resolvent(K, interval, m).inner(u, v)


def _gram(R: Resolvent, Ki: FiniteRankKernel, Kj: FiniteRankKernel) -> np.ndarray:
    # G[a, b] = c_a <v_a, R u_b> for terms a of Ki and b of Kj
    G = np.zeros((len(Ki.terms), len(Kj.terms)))
    solved = [R.solve(u) for _, u, _ in Kj.terms]
    x, w = R.rule.nodes, R.rule.weights
    for a, (c, _, v) in enumerate(Ki.terms):
        va = w * _values(v, x)
        for b in range(len(Kj.terms)):
            G[a, b] = c * np.dot(va, solved[b])
    return G


def plemelj_corrections(base: KernelSpec, E1, E2, E3, interval, m: int = DEFAULT_M):
    """Coefficients d1, d2, d3 of det(I - K0 - h K1 - h^2 K2 - h^3 K3) / det(I - K0).

    ``E1..E3`` are finite-rank perturbations (or None for zero) and
    ``base`` is K0.
    """
    Ks = [E if E is not None else FiniteRankKernel(()) for E in (E1, E2, E3)]
    if all(len(E.terms) == 0 for E in Ks):
        return 0.0, 0.0, 0.0
    R = Resolvent(base, interval, m)
    G = {}

    def gram(i, j):
        if (i, j) not in G:
            G[i, j] = _gram(R, Ks[i], Ks[j])
        return G[i, j]

    def tr(*idx):
        mats = [gram(idx[k], idx[(k + 1) % len(idx)]) for k in range(len(idx))]
        out = mats[0]
        for M in mats[1:]:
            out = out @ M
        return float(np.trace(out)) if out.size else 0.0

    t1, t2, t3 = tr(0), tr(1), tr(2)
    t11 = tr(0, 0)
    t12 = tr(0, 1)
    t111 = tr(0, 0, 0)
    d1 = -t1
    d2 = 0.5 * t1 * t1 - 0.5 * t11 - t2
    d3 = -t1 ** 3 / 6 + 0.5 * t1 * t11 - t12 - t111 / 3 + t1 * t2 - t3
    return d1, d2, d3
