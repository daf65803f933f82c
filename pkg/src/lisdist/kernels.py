"""Airy, Bessel and expansion kernels used by the determinant formulas."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validate import check_int
from .errors import DomainError
from .quad_fredholm import FiniteRankKernel, KernelSpec
from .specfun import airy, bessel_jv

BAND = 1e-6
BAND_OFFSET = 1e-3


@dataclass(frozen=True)
class NamedKernel:
    spec: KernelSpec
    name: str
    params: dict = field(default_factory=dict)
    finite_rank: FiniteRankKernel | None = None

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = np.asarray(self.spec.eval(x, y), dtype=float).copy()
        same = x == y
        if np.any(same):
            out[same] = self.spec.diag(x[same])
        return float(out) if out.ndim == 0 else out


def _banded(offdiag, diag):
    """Wrap an off-diagonal formula so that near-diagonal points avoid cancellation.

    Inside |x - y| < BAND (1 + |x| + |y|) the kernel is taken as
    diag(mid) + c d^2, with c from the even interpolant through d = +-BAND_OFFSET.
    """

    def ev(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        d = x - y
        near = np.abs(d) < BAND * (1 + np.abs(x) + np.abs(y))
        out = np.empty(x.shape)
        far = ~near
        if np.any(far):
            with np.errstate(divide="ignore", invalid="ignore"):
                out[far] = offdiag(x[far], y[far])
        if np.any(near):
            mid = 0.5 * (x[near] + y[near])
            k0 = diag(mid)
            h = BAND_OFFSET
            kh = offdiag(mid + h / 2, mid - h / 2)
            out[near] = k0 + (kh - k0) * (d[near] / h) ** 2
        return out

    return ev


# --------------------------------------------------------------------------
# Airy kernel

def _airy_off(x, y):
    ax, apx = airy(x, 0), airy(x, 1)
    ay, apy = airy(y, 0), airy(y, 1)
    return (ax * apy - apx * ay) / (x - y)


def _airy_diag(x):
    x = np.asarray(x, dtype=float)
    return airy(x, 1) ** 2 - x * airy(x, 0) ** 2


def _integrable_matrix(x, f, g, diag):
    # (f(x)g(y) - g(x)f(y)) / (x - y) on distinct nodes, analytic diagonal
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, 1.0)
    out = (np.outer(f, g) - np.outer(g, f)) / d
    np.fill_diagonal(out, diag)
    return out


def _airy_nodal(x):
    ai, aip = airy(x, 0), airy(x, 1)
    return _integrable_matrix(x, ai, aip, aip * aip - x * ai * ai)


def airy_kernel() -> NamedKernel:
    """K0(x,y) = (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y)."""
    spec = KernelSpec(_banded(_airy_off, _airy_diag), _airy_diag, decay_scale=1.0, name="airy",
                      nodal=_airy_nodal)
    return NamedKernel(spec, "airy")


# --------------------------------------------------------------------------
# Bessel kernels

def bessel_kernel(nu: int) -> NamedKernel:
    """Bessel kernel K_nu on (0, s) in the hard-edge variable."""
    nu = check_int("nu", nu, lo=1)

    def parts(x):
        if np.any(np.asarray(x) < 0):
            raise DomainError("Bessel kernel needs nonnegative arguments")
        r = np.sqrt(x)
        j = bessel_jv(nu, r)
        jp = 0.5 * (bessel_jv(nu - 1, r) - bessel_jv(nu + 1, r))
        return r, j, jp

    def off(x, y):
        rx, jx, jpx = parts(x)
        ry, jy, jpy = parts(y)
        return (jx * ry * jpy - jy * rx * jpx) / (2.0 * (x - y))

    def diag(x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("Bessel kernel needs nonnegative arguments")
        r = np.sqrt(x)
        return 0.25 * (bessel_jv(nu, r) ** 2 - bessel_jv(nu + 1, r) * bessel_jv(nu - 1, r))

    def nodal(x):
        r, j, jp = parts(x)
        # K = (j(x) * r(y) jp(y) - r(x) jp(x) * j(y)) / (2 (x - y))
        dg = 0.25 * (j * j - bessel_jv(nu + 1, r) * bessel_jv(nu - 1, r))
        return _integrable_matrix(x, j, 0.5 * r * jp, dg)

    spec = KernelSpec(_banded(off, diag), diag, decay_scale=None, name=f"bessel[{nu}]",
                      nodal=nodal)
    return NamedKernel(spec, "bessel", {"nu": nu})


def h_nu(nu) -> float:
    return 2.0 ** (-1.0 / 3.0) * float(nu) ** (-2.0 / 3.0)


def phi_nu(nu, t):
    h = h_nu(nu)
    return nu * nu * (1.0 - h * np.asarray(t, dtype=float)) ** 2


def transformed_bessel_kernel(nu: int) -> NamedKernel:
    """sqrt(|phi'(x) phi'(y)|) K_nu(phi(x), phi(y)) with phi(t) = nu^2 (1 - h t)^2."""
    nu = check_int("nu", nu, lo=1)
    h = h_nu(nu)
    base = bessel_kernel(nu).spec

    def check(x):
        if np.any(np.asarray(x) >= 1.0 / h):
            raise DomainError(f"transformed Bessel kernel needs arguments < {1.0 / h:g}")

    def dphi(t):
        return 2.0 * nu * nu * h * (1.0 - h * t)

    def ev(x, y):
        check(x)
        check(y)
        return np.sqrt(dphi(x) * dphi(y)) * base.eval(phi_nu(nu, x), phi_nu(nu, y))

    def diag(x):
        check(x)
        return dphi(x) * base.diag(phi_nu(nu, x))

    def nodal(x):
        check(x)
        s = np.sqrt(dphi(x))
        return s[:, None] * base.nodal(phi_nu(nu, x)) * s[None, :]

    spec = KernelSpec(ev, diag, decay_scale=None, name=f"bessel_hat[{nu}]", nodal=nodal)
    return NamedKernel(spec, "bessel_hat", {"nu": nu, "h": h})


# --------------------------------------------------------------------------
# expansion kernels

def K1(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ax, apx = airy(x, 0), airy(x, 1)
    ay, apy = airy(y, 0), airy(y, 1)
    return 0.1 * (-3 * (x * x + x * y + y * y) * ax * ay + 2 * (ax * apy + apx * ay)
                  + 3 * (x + y) * apx * apy)


def K2(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ax, apx = airy(x, 0), airy(x, 1)
    ay, apy = airy(y, 0), airy(y, 1)
    x2, y2 = x * x, y * y
    c00 = -235 * (x2 * x + y2 * y) - 319 * x * y * (x + y) + 56
    c01 = 63 * (x2 * x2 + x2 * x * y - x2 * y2 - x * y2 * y - y2 * y2) - 55 * x + 239 * y
    c10 = 63 * (-x2 * x2 - x2 * x * y - x2 * y2 + x * y2 * y + y2 * y2) + 239 * x - 55 * y
    c11 = 340 * (x2 + y2) + 256 * x * y
    return (c00 * ax * ay + c01 * ax * apy + c10 * apx * ay + c11 * apx * apy) / 1400.0


def _ai(k):
    return lambda x: airy(x, k)


def _finite_rank_kernel(fr: FiniteRankKernel, name: str) -> NamedKernel:
    spec = KernelSpec(fr, lambda x: fr(x, x), decay_scale=1.0, name=name)
    return NamedKernel(spec, name, finite_rank=fr)


def K1_tilde() -> NamedKernel:
    """(1/5)(Ai (x) Ai' + Ai' (x) Ai)."""
    fr = FiniteRankKernel(((0.2, _ai(0), _ai(1)), (0.2, _ai(1), _ai(0))))
    return _finite_rank_kernel(fr, "K1_tilde")


def K2_tilde() -> NamedKernel:
    """(1/350)(55(Ai (x) Ai''' + Ai''' (x) Ai) - 51(Ai' (x) Ai'' + Ai'' (x) Ai') - 96 Ai (x) Ai)."""
    c = 1.0 / 350.0
    fr = FiniteRankKernel((
        (55 * c, _ai(0), _ai(3)), (55 * c, _ai(3), _ai(0)),
        (-51 * c, _ai(1), _ai(2)), (-51 * c, _ai(2), _ai(1)),
        (-96 * c, _ai(0), _ai(0)),
    ))
    return _finite_rank_kernel(fr, "K2_tilde")


def choup_L(x, y):
    """L(x,y) = (x^2 + xy + y^2) Ai(x)Ai(y) - (x + y) Ai'(x)Ai'(y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return (x * x + x * y + y * y) * airy(x, 0) * airy(y, 0) - (x + y) * airy(x, 1) * airy(y, 1)


def choup_finite_rank() -> FiniteRankKernel:
    """L written as a sum of rank-one terms, for resolvent traces."""
    def xk(k, j):
        return lambda x: np.asarray(x, dtype=float) ** j * airy(x, k)

    return FiniteRankKernel((
        (1.0, xk(0, 2), xk(0, 0)), (1.0, xk(0, 1), xk(0, 1)), (1.0, xk(0, 0), xk(0, 2)),
        (-1.0, xk(1, 1), xk(1, 0)), (-1.0, xk(1, 0), xk(1, 1)),
    ))


def default_grid() -> np.ndarray:
    return np.linspace(-4.0, 4.0, 9)


def kernel_expansion_residual(nu: int, grid=None, m: int = 2) -> float:
    """max |K_hat_nu - sum_{j<=m} h^j K_j| over grid x grid."""
    m = check_int("m", m, lo=0, hi=2)
    g = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any(np.abs(g) > 4):
        raise DomainError("grid must lie in [-4, 4]")
    X, Y = np.meshgrid(g, g, indexing="ij")
    return float(np.max(np.abs(kernel_expansion_grid(nu, X, Y, m))))


def kernel_expansion_grid(nu: int, X, Y, m: int):
    Kh = transformed_bessel_kernel(nu)
    h = h_nu(nu)
    approx = airy_kernel()(X, Y)
    if m >= 1:
        approx = approx + h * K1(X, Y)
    if m >= 2:
        approx = approx + h * h * K2(X, Y)
    return Kh(X, Y) - approx


__all__ = [
    "NamedKernel", "airy_kernel", "bessel_kernel", "transformed_bessel_kernel", "K1", "K2",
    "K1_tilde", "K2_tilde", "choup_L", "choup_finite_rank", "kernel_expansion_residual",
    "h_nu", "phi_nu",
]
