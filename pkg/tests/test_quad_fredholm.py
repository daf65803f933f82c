import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lisdist.errors import DomainError, NonFinite, SingularSystem
from lisdist.kernels import K1_tilde, airy_kernel
from lisdist.quad_fredholm import (FiniteRankKernel, KernelSpec, Resolvent, fredholm_det,
                                   gauss_legendre, nystrom, plemelj_corrections,
                                   resolvent_solve, trace_u)
from lisdist.tracy_widom import default_model, u

ZERO = KernelSpec(lambda x, y: 0.0 * x * y, lambda x: 0.0 * x, decay_scale=1.0, name="zero")
ONE = KernelSpec(lambda x, y: 1.0 + 0.0 * x * y, lambda x: 1.0 + 0.0 * x, name="one")


def test_one_point_rule():
    r = gauss_legendre(1)
    assert r.nodes.tolist() == [0.0]
    assert r.weights[0] == pytest.approx(2.0, abs=1e-15)


def test_two_point_rule():
    r = gauss_legendre(2)
    assert np.allclose(r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    assert np.allclose(r.weights, [1.0, 1.0], atol=1e-15)


def test_five_point_rule_x8():
    r = gauss_legendre(5, 0.0, 1.0)
    assert abs(np.dot(r.weights, r.nodes ** 8) - 1 / 9) <= 1e-15


def test_rule_rejects_bad_input():
    with pytest.raises(DomainError):
        gauss_legendre(0)
    with pytest.raises(DomainError):
        gauss_legendre(3, 1.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 120), st.floats(-50, 50), st.floats(0.01, 100))
def test_rule_invariants(m, a, width):
    b = a + width
    r = gauss_legendre(m, a, b)
    assert abs(r.weights.sum() - (b - a)) <= 1e-13 * (b - a)
    assert np.all(np.diff(r.nodes) > 0)
    assert r.nodes[0] > a and r.nodes[-1] < b
    assert np.allclose(r.nodes - a, (b - r.nodes)[::-1], atol=1e-12 * (1 + abs(a) + abs(b)))
    assert np.all(r.weights > 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 30), st.data())
def test_rule_polynomial_exactness(m, data):
    deg = data.draw(st.integers(0, 2 * m - 1))
    r = gauss_legendre(m, 0.0, 1.0)
    assert np.dot(r.weights, r.nodes ** deg) == pytest.approx(1 / (deg + 1), rel=1e-12)


def test_zero_kernel_det():
    for m in (1, 7, 40):
        assert fredholm_det(ZERO, (0, 1), m) == 1.0


def test_rank_one_det():
    assert abs(fredholm_det(ONE, (0, 1), 20)) <= 1e-13


def test_airy_det_stagnates():
    K = airy_kernel().spec
    for t in (-8.0, -3.0, 0.0, 4.0):
        d60 = fredholm_det(K, (t, math.inf), 60)
        d120 = fredholm_det(K, (t, math.inf), 120)
        assert 0 < d120 <= 1
        assert abs(d60 - d120) <= 1e-11


def test_airy_det_truncation_length():
    K = airy_kernel().spec
    for t in (-6.0, 0.0, 3.0):
        assert abs(fredholm_det(K, (t, math.inf), 80, 14.0) - fredholm_det(K, (t, math.inf), 80, 20.0)) <= 1e-11


def test_semi_infinite_needs_decay():
    with pytest.raises(DomainError):
        fredholm_det(ONE, (0, math.inf))


def test_nonfinite_kernel():
    bad = KernelSpec(lambda x, y: np.full(np.shape(x), np.nan), lambda x: np.full(np.shape(x), np.nan))
    with pytest.raises(NonFinite):
        fredholm_det(bad, (0, 1), 4)


def test_nystrom_matrix_symmetric():
    A = nystrom(airy_kernel().spec, (-2.0, math.inf), 30).matrix
    assert np.allclose(A, A.T, atol=1e-15)


def test_resolvent_zero_kernel():
    r = gauss_legendre(10, 0, 1)
    vals = resolvent_solve(ZERO, (0, 1), 10, np.cos)
    assert np.allclose(vals, np.cos(r.nodes), atol=1e-15)


def test_resolvent_geometric_series():
    c = 0.3
    half = KernelSpec(lambda x, y: c + 0.0 * x * y, lambda x: c + 0.0 * x)
    vals = resolvent_solve(half, (0, 1), 12, lambda x: np.ones_like(x))
    assert np.allclose(vals, 1 / (1 - c), atol=1e-14)


def test_resolvent_singular():
    with pytest.raises(SingularSystem):
        resolvent_solve(ONE, (0, 1), 8, np.cos)


def test_trace_zero_kernel_inner_product():
    one = lambda x: np.ones_like(x)  # noqa: E731
    assert trace_u(ZERO, (0, 1), one, one, 10) == pytest.approx(1.0, abs=1e-14)


def test_trace_u00_is_log_derivative():
    model = default_model()
    for t in (-2.0, 0.0, 2.0):
        assert abs(u(t, 0, 0) - model(t, 1) / model(t)) <= 1e-8


def test_trace_u30_at_zero():
    # the tabulated form at t = 0: u30 = (7/12) F'/F + (1/24) F''''/F
    model = default_model()
    rhs = (7 / 12 * model(0.0, 1) + model(0.0, 4) / 24) / model(0.0)
    assert abs(u(0.0, 3, 0) - rhs) <= 1e-8


def test_trace_symmetric_and_bilinear():
    from lisdist.specfun import airy
    R = Resolvent(airy_kernel().spec, (-1.0, math.inf), 80)
    f = lambda x: airy(x, 0)  # noqa: E731
    g = lambda x: airy(x, 2)  # noqa: E731
    a = R.inner(f, g)
    assert abs(a - R.inner(g, f)) <= 1e-12 * (1 + abs(a))
    combo = R.inner(lambda x: 2 * f(x) + 3 * g(x), g)
    assert combo == pytest.approx(2 * R.inner(f, g) + 3 * R.inner(g, g), rel=1e-12)


def test_plemelj_zero():
    assert plemelj_corrections(airy_kernel().spec, None, None, None, (0.0, math.inf)) == (0.0, 0.0, 0.0)


def test_plemelj_first_correction():
    model = default_model()
    fr = K1_tilde().finite_rank
    for t in (-2.0, 0.0, 1.5):
        d1, _, _ = plemelj_corrections(airy_kernel().spec, fr, None, None, (t, math.inf))
        assert abs(d1 + model(t, 2) / (5 * model(t))) <= 1e-8


def test_plemelj_second_correction():
    # d2 reproduces F~_2 / F with F~_2 taken from the coefficient table
    from lisdist.expansions import coeff
    from lisdist.kernels import K2_tilde
    model = default_model()
    for t in (-1.0, 1.0):
        _, d2, _ = plemelj_corrections(airy_kernel().spec, K1_tilde().finite_rank,
                                       K2_tilde().finite_rank, None, (t, math.inf))
        assert abs(d2 - coeff("F_tilde", 2, t, model) / model(t)) <= 1e-7


def test_finite_rank_kernel_call():
    fr = FiniteRankKernel(((2.0, np.sin, np.cos),))
    assert fr(0.5, 0.25) == pytest.approx(2 * math.sin(0.5) * math.cos(0.25))
