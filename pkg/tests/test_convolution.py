import math

import numpy as np
import pytest

from dualconv.convolution import (
    bochner_h_grid,
    bochner_h_support,
    bochner_term_at,
    check_associative,
    check_bochner_norm_sum,
    check_commutative,
    dc_bochner_terms,
    dc_kernel,
    dc_kernel_hform,
    triple_product_direct,
    u_support,
)
from dualconv.errors import ModeMismatch
from dualconv.families import generate_tensors, sample_points
from dualconv.functions import indicator
from dualconv.kernels import RankOneTensor, rank_one
from dualconv.quadrature import DEFAULT_QUADRATURE as Q


def box_kernel():
    return rank_one(indicator(1.0, 2.0), indicator(1.0, 2.0))


def test_exact_point_value_2ln2():
    K = dc_kernel(box_kernel(), box_kernel(), Q)
    assert abs(K.eval(3.0, 3.0) - 2.0 * math.log(2.0)) < 1e-12


def test_u_support_exact_interval():
    T = box_kernel()
    (iv,) = u_support(T, T, 3.0, 3.0)
    assert abs(iv[0] - 1.0 / 3.0) < 1e-12
    assert abs(iv[1] - 2.0 / 3.0) < 1e-12
    assert u_support(T, T, 100.0, 3.0) == []


def test_point_value_vs_trapezoid_oracle():
    # same u-integral, brute-forced on a dense flat grid
    T = box_kernel()
    s = t = 3.0
    u = np.linspace(1.0 / 3.0, 2.0 / 3.0, 2_000_001)
    f = np.ones_like(u) / ((1.0 - u) * u)
    oracle = np.trapezoid(f, u)
    K = dc_kernel(T, T, Q)
    assert abs(K.eval(s, t) - oracle) < 1e-10


def test_u_and_h_forms_agree():
    T1, T2 = generate_tensors(101, 2, parity="+")
    Ku = dc_kernel(T1, T2, Q)
    Kh = dc_kernel_hform(T1, T2, Q)
    pts = sample_points(102, 12, Ku.s_support, Ku.t_support)
    for s, t in pts:
        assert abs(Ku.eval(s, t) - Kh.eval(s, t)) < 1e-9


def test_product_supports_are_minkowski_sums():
    K = dc_kernel(box_kernel(), rank_one(indicator(3.0, 4.0), indicator(5.0, 6.0)), Q)
    assert K.s_support.intervals == ((4.0, 6.0),)
    assert K.t_support.intervals == ((6.0, 8.0),)
    assert K.eval(3.9, 7.0) == 0.0


def test_mode_mismatch_rejected():
    a = box_kernel()
    b = rank_one(indicator(1.0, 2.0), indicator(1.0, 2.0), "bilinear")
    with pytest.raises(ModeMismatch):
        dc_kernel(a, b, Q)


def test_pole_distance_positive():
    T = box_kernel()
    K = dc_kernel(T, T, Q)
    d = K.pole_distance(3.0, 3.0)
    assert abs(d - 1.0 / 3.0) < 1e-12


def test_bochner_h_support_quotients():
    t = box_kernel().terms[0]
    H, breaks = bochner_h_support(t, t)
    assert H.intervals == ((0.5, 2.0),)
    assert -1.0 in breaks and 1.0 in breaks


def test_bochner_discretization_matches_lazy_kernel():
    from dualconv.quadrature import log_panels

    t = box_kernel().terms[0]
    K = dc_kernel(box_kernel(), box_kernel(), Q)
    s0, t0 = 2.5, 3.5
    # At a fixed evaluation point the h-integrand jumps where one of the
    # dilated arguments crosses a factor endpoint: v/(1+h) = x gives
    # h = v/x - 1 and v*h/(1+h) = x gives h = x/(v - x).
    H, breaks = bochner_h_support(t, t)
    for v in (s0, t0):
        for x in (1.0, 2.0):
            breaks.append(v / x - 1.0)
            if v != x:
                breaks.append(x / (v - x))
    grid = [
        tuple(sorted((sign * math.exp(x0), sign * math.exp(x1))))
        for sign, x0, x1 in log_panels(H, breaks)
    ]
    terms = dc_bochner_terms(t, t, grid)
    total = sum(w * term.eval(s0, t0) for w, term in terms)
    assert abs(total - K.eval(s0, t0)) < 1e-9


def test_bochner_term_at_is_dilated_product():
    t = box_kernel().terms[0]
    term = bochner_term_at(t, t, 1.0)
    # at h=1 both legs are the square of the dilation by 2
    assert term.left.support.intervals == ((2.0, 4.0),)
    assert term.eval(3.0, 3.0) == 1.0


def test_commutative_check():
    T1, T2 = generate_tensors(7, 2, parity="+")
    K = dc_kernel(T1, T2, Q)
    pts = sample_points(8, 20, K.s_support, K.t_support)
    r = check_commutative(T1, T2, pts, 1e-7, Q, seed=7)
    assert r.passed
    assert r.n_samples == 20
    assert r.pole_distance_min is None or r.pole_distance_min > 0


def test_associative_check_includes_direct_form():
    T1, T2, T3 = generate_tensors(9, 3, parity="+")
    K = dc_kernel(dc_kernel(T1, T2, Q), T3, Q)
    pts = sample_points(10, 8, K.s_support, K.t_support)
    r = check_associative(T1, T2, T3, pts, 1e-6, Q, seed=9)
    assert r.passed


def test_direct_triple_nonzero_somewhere():
    T1, T2, T3 = generate_tensors(9, 3, parity="+")
    K = dc_kernel(dc_kernel(T1, T2, Q), T3, Q)
    ev = triple_product_direct(T1, T2, T3, Q)
    pts = sample_points(10, 30, K.s_support, K.t_support)
    vals = [abs(ev(s, t)) for s, t in pts]
    assert max(vals) > 0.0


def test_bochner_norm_sum_inequality():
    pairs = []
    for i in range(3):
        T1, T2 = generate_tensors(200 + i, 2)
        pairs.append((T1.terms[0], T2.terms[0]))
    r = check_bochner_norm_sum(pairs, 1e-9, Q)
    assert r.passed
