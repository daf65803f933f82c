"""Exact and sampled distributions of the longest increasing subsequence.

By the RSK correspondence the number of permutations of n with
L_n <= l is the sum of (f^lam)^2 over partitions lam of n with first part
at most l, where f^lam is the number of standard Young tableaux given by
the hook-length formula.  The partitions are grown row by row from the
bottom; adding a new top row leaves all hooks below it unchanged, so the
hook product is updated in O(row length).
"""

from __future__ import annotations

import cmath
import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from operator import add

import numba
import numpy as np

from ._validate import check_int
from .errors import DomainError, ResourceLimit, TruncationWarning

EXACT_MAX_N = 80
BRUTE_MAX_N = 10
EGF_MAX_STATES = 12_000_000
MC_ALGORITHM = "PCG64 permutation (numpy Generator) + patience sorting"


@dataclass(frozen=True)
class Partition:
    parts: tuple

    def __post_init__(self):
        p = tuple(int(x) for x in self.parts)
        if any(x <= 0 for x in p) or any(a < b for a, b in zip(p, p[1:])):
            raise DomainError(f"not a partition: {self.parts!r}")
        object.__setattr__(self, "parts", p)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))

    def hook_product(self) -> int:
        conj = self.conjugate().parts
        return math.prod((lam - j) + (conj[j] - i) - 1
                         for i, lam in enumerate(self.parts) for j in range(lam))

    def num_tableaux(self) -> int:
        """f^lam by the hook-length formula."""
        return math.factorial(self.size) // self.hook_product()


@dataclass(frozen=True)
class ExactDist:
    """counts[l] = #{sigma in S_n : L_n(sigma) = l}, l = 0..n."""

    n: int
    counts: tuple

    @property
    def total(self) -> int:
        return math.factorial(self.n)

    def pdf(self, l: int) -> Fraction:
        if l < 0 or l > self.n:
            return Fraction(0)
        return Fraction(self.counts[l], self.total)

    def cdf(self, l: int) -> Fraction:
        if l < 0:
            return Fraction(0)
        return Fraction(sum(self.counts[: min(l, self.n) + 1]), self.total)

    def cdf_numerators(self) -> list[int]:
        return list(itertools.accumulate(self.counts))

    def mean(self) -> Fraction:
        return Fraction(sum(l * c for l, c in enumerate(self.counts)), self.total)

    def variance(self) -> Fraction:
        m2 = Fraction(sum(l * l * c for l, c in enumerate(self.counts)), self.total)
        return m2 - self.mean() ** 2

    def mode(self) -> int:
        return max(range(self.n + 1), key=lambda l: self.counts[l])


def _tableaux_histogram(n: int) -> list[int]:
    # hist[a] = sum of (f^lam)^2 over lam |- n with lam_1 = a.  Only partitions
    # with at least as many columns as rows are visited; a partition with
    # lam_1 > ell(lam) also accounts for its conjugate (first part ell(lam)).
    hist = [0] * (n + 1)
    colh = [0] * (n + 1)
    nf = math.factorial(n)
    prod = math.prod

    def grow(rem, minpart, H, rows):
        if rem >= rows + 1:
            h = H * prod(map(add, range(rem, 0, -1), colh[:rem]))
            f = nf // h
            f *= f
            hist[rem] += f
            if rem > rows + 1:
                hist[rows + 1] += f
        for a in range(minpart, min(rem // 2, rem - rows - 2) + 1):
            seg = colh[:a]
            h = H * prod(map(add, range(a, 0, -1), seg))
            colh[:a] = [c + 1 for c in seg]
            grow(rem - a, a, h, rows + 1)
            colh[:a] = seg

    grow(n, 1, 1, 0)
    return hist


@lru_cache(maxsize=None)
def exact_dist(n: int) -> ExactDist:
    """Exact distribution of L_n for 0 <= n <= 80."""
    n = check_int("n", n, lo=0)
    if n > EXACT_MAX_N:
        raise ResourceLimit(f"exact enumeration is capped at n = {EXACT_MAX_N}")
    if n == 0:
        return ExactDist(0, (1,))
    return ExactDist(n, tuple(_tableaux_histogram(n)))


# --------------------------------------------------------------------------
# longest increasing subsequence of one permutation

def lis_length(perm) -> int:
    """Patience sorting, O(n log n)."""
    import bisect
    tops: list = []
    for x in perm:
        k = bisect.bisect_left(tops, x)
        if k == len(tops):
            tops.append(x)
        else:
            tops[k] = x
    return len(tops)


def lis_length_dp(perm) -> int:
    """Quadratic dynamic programme; reference for lis_length."""
    perm = list(perm)
    best = [1] * len(perm)
    for i in range(len(perm)):
        for j in range(i):
            if perm[j] < perm[i] and best[j] + 1 > best[i]:
                best[i] = best[j] + 1
    return max(best, default=0)


def brute_force_dist(n: int) -> ExactDist:
    """Tally L_n over all n! permutations (n <= 10)."""
    n = check_int("n", n, lo=0, hi=BRUTE_MAX_N)
    counts = [0] * (n + 1)
    for p in itertools.permutations(range(n)):
        counts[lis_length(p)] += 1
    return ExactDist(n, tuple(counts))


# --------------------------------------------------------------------------
# Poisson generating function

@dataclass(frozen=True)
class EgfSeries:
    """coeffs[k] = P(L_k <= l), k = 0..K."""

    l: int
    coeffs: tuple

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z: complex) -> complex:
        """e^(-z) sum_k a_k z^k / k!, summed in floating point."""
        term = complex(1.0)
        total = complex(0.0)
        for k, a in enumerate(self.coeffs):
            if k:
                term *= z / k
            total += float(a) * term
        return cmath.exp(-z) * total


def _count_states(l: int, K: int) -> int:
    # partitions with at most l parts and size <= K
    p = [1] + [0] * K
    for part in range(1, l + 1):
        for s in range(part, K + 1):
            p[s] += p[s - part]
    return sum(p)


def _bounded_rows_counts(l: int, K: int) -> list[int]:
    # u[k] = sum of (f^lam)^2 over lam |- k with at most l rows, via the
    # branching rule f^lam = sum over removable boxes, one layer per size.
    # Partitions are packed into int64 codes with base K + 1.
    B = K + 1
    pw = np.array([B ** (l - 1 - i) for i in range(l)], dtype=np.int64)
    codes = np.zeros(1, dtype=np.int64)
    vals = np.array([1], dtype=object)
    out = [1]
    for _ in range(K):
        digits = [(codes // pw[i]) % B for i in range(l)]
        new_codes, new_vals = [], []
        for i in range(l):
            ok = np.ones(len(codes), bool) if i == 0 else digits[i - 1] > digits[i]
            new_codes.append(codes[ok] + pw[i])
            new_vals.append(vals[ok])
        nc = np.concatenate(new_codes)
        nv = np.concatenate(new_vals)
        order = np.argsort(nc, kind="stable")
        nc, nv = nc[order], nv[order]
        starts = np.flatnonzero(np.r_[True, nc[1:] != nc[:-1]])
        codes = nc[starts]
        vals = np.add.reduceat(nv, starts)
        out.append(int(np.dot(vals, vals)))
    return out


@lru_cache(maxsize=None)
def egf_series(l: int, K: int = EXACT_MAX_N) -> EgfSeries:
    """a_k = P(L_k <= l) for k <= K as exact rationals."""
    l = check_int("l", l, lo=0)
    K = check_int("K", K, lo=0, hi=EXACT_MAX_N)
    if l == 0:
        return EgfSeries(0, (Fraction(1),) + (Fraction(0),) * K)
    if l >= K:
        return EgfSeries(l, (Fraction(1),) * (K + 1))
    if _count_states(l, K) > EGF_MAX_STATES or (K + 1) ** l >= 2 ** 62:
        # few distinct l per K: fall back to the full tables where affordable
        if K > 40:
            raise ResourceLimit(f"generating function for l={l}, K={K} is too large")
        return EgfSeries(l, tuple(exact_dist(k).cdf(l) for k in range(K + 1)))
    u = _bounded_rows_counts(l, K)
    return EgfSeries(l, tuple(Fraction(u[k], math.factorial(k)) for k in range(K + 1)))


def poisson_gf(l: int, z: complex, K: int = EXACT_MAX_N) -> complex:
    """P(z; l) = e^(-z) sum_{k<=K} P(L_k <= l) z^k / k!."""
    series = egf_series(l, K)
    if abs(z) > series.K / 3:
        warnings.warn(f"|z| = {abs(z):.3g} exceeds K/3 = {series.K / 3:.3g}; "
                      "the truncated series may be inaccurate", TruncationWarning, stacklevel=2)
    return series(complex(z))


# --------------------------------------------------------------------------
# Monte Carlo

@numba.njit(cache=True)
def _patience(p):
    n = p.shape[0]
    tops = np.empty(n, p.dtype)
    L = 0
    for i in range(n):
        x = p[i]
        lo = 0
        hi = L
        while lo < hi:
            mid = (lo + hi) >> 1
            if tops[mid] < x:
                lo = mid + 1
            else:
                hi = mid
        tops[lo] = x
        if lo == L:
            L += 1
    return L


@dataclass(frozen=True)
class MCSummary:
    n: int
    samples: int
    seed: int
    algorithm: str
    mean: float
    variance: float
    histogram: dict

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.samples)

    def to_dict(self) -> dict:
        return {"n": self.n, "samples": self.samples, "seed": self.seed,
                "algorithm": self.algorithm, "mean": self.mean, "variance": self.variance,
                "stderr": self.stderr, "histogram": {str(k): v for k, v in self.histogram.items()}}


def sample_lengths(n: int, samples: int, seed: int) -> np.ndarray:
    """L_n of ``samples`` uniformly random permutations, reproducible from ``seed``."""
    n = check_int("n", n, lo=1, hi=10 ** 8)
    samples = check_int("samples", samples, lo=1)
    rng = np.random.Generator(np.random.PCG64(seed))
    dtype = np.int32 if n < 2 ** 31 else np.int64
    out = np.empty(samples, dtype=np.int64)
    for s in range(samples):
        out[s] = _patience(rng.permutation(n).astype(dtype, copy=False))
    return out


def monte_carlo(n: int, samples: int, seed: int = 0) -> MCSummary:
    L = sample_lengths(n, samples, seed)
    values, counts = np.unique(L, return_counts=True)
    var = float(L.var(ddof=1)) if samples > 1 else 0.0
    return MCSummary(n, samples, int(seed), MC_ALGORITHM, float(L.mean()), var,
                     {int(v): int(c) for v, c in zip(values, counts)})


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)
