import math

import numpy as np
import pytest

from dualconv.errors import ConfigError, ModeMismatch
from dualconv.functions import glue_sides, hat, indicator
from dualconv.kernels import (
    FiniteRankKernel,
    RankOneTensor,
    finite_rank,
    kernel_eval,
    l2_kernel_norm,
    parity_compress,
    parse_kernel,
    rank_one,
    s_breakpoints,
    support_s,
    support_t,
    t_breakpoints,
    transpose_predual,
)
from dualconv.quadrature import DEFAULT_QUADRATURE as Q


def test_rank_one_eval_hilbert_conjugates_right():
    xi = indicator(1.0, 2.0, 2.0)
    eta = indicator(1.0, 3.0, 1.0 + 1.0j)
    t = RankOneTensor(xi, eta, "hilbert")
    assert t.eval(1.5, 2.0) == 2.0 * (1.0 - 1.0j)
    tb = RankOneTensor(xi, eta, "bilinear")
    assert tb.eval(1.5, 2.0) == 2.0 * (1.0 + 1.0j)


def test_finite_rank_bound_and_mode():
    xi = indicator(1.0, math.e)
    K = finite_rank([RankOneTensor(xi, xi)], Q)
    assert abs(K.projective_bound - 1.0) < 1e-12
    with pytest.raises(ModeMismatch):
        finite_rank(
            [RankOneTensor(xi, xi, "hilbert"), RankOneTensor(xi, xi, "bilinear")], Q
        )


def test_supports_and_breakpoints():
    K = finite_rank(
        [
            RankOneTensor(indicator(1.0, 2.0), hat(1.0, 3.0)),
            RankOneTensor(indicator(-4.0, -3.0), indicator(1.0, 2.0)),
        ],
        Q,
    )
    assert support_s(K).intervals == ((-4.0, -3.0), (1.0, 2.0))
    assert support_t(K).intervals == ((1.0, 3.0),)
    assert 2.0 in t_breakpoints(K)  # hat midpoint
    assert -4.0 in s_breakpoints(K)


def test_kernel_eval_vectorized():
    K = rank_one(indicator(1.0, 2.0), indicator(1.0, 2.0))
    s = np.array([1.5, 3.0])
    t = np.array([1.5, 1.5])
    out = kernel_eval(K, s, t)
    assert out.tolist() == [1.0, 0.0]


def test_transpose_predual():
    xi = indicator(1.0, 2.0, 2.0j)
    eta = indicator(3.0, 4.0)
    K = rank_one(xi, eta)
    Kt = transpose_predual(K)
    # kernel of the transpose at (s,t) equals the kernel at (t,s)
    assert kernel_eval(Kt, 3.5, 1.5) == kernel_eval(K, 1.5, 3.5)
    with pytest.raises(ModeMismatch):
        transpose_predual(rank_one(xi, eta, "bilinear"))


def test_parity_compress_blocks():
    left = glue_sides(indicator(1.0, 2.0), indicator(-2.0, -1.0))
    right = glue_sides(indicator(1.0, 3.0), indicator(-3.0, -1.0))
    K = rank_one(left, right)
    Kc = parity_compress(K, Q)
    assert len(Kc.terms) == 2
    # diagonal blocks survive, off-diagonal values vanish
    assert kernel_eval(Kc, 1.5, 2.0) == kernel_eval(K, 1.5, 2.0)
    assert kernel_eval(Kc, 1.5, -2.0) == 0.0
    assert kernel_eval(K, 1.5, -2.0) != 0.0


def test_l2_norm_matches_rank_one_closed_form():
    xi = indicator(1.0, math.e**2, 1.5)
    eta = hat(1.0, 4.0)
    K = rank_one(xi, eta)
    from dualconv.functions import lp_norm

    exact = lp_norm(xi, 2.0, Q) * lp_norm(eta, 2.0, Q)
    assert abs(l2_kernel_norm(K, Q) - exact) < 1e-9


def test_parse_kernel():
    K = parse_kernel("rank1:mode=hilbert;xi=ind:1,2;eta=ind:1,3")
    assert len(K.terms) == 1
    assert kernel_eval(K, 1.5, 2.0) == 1.0
    K2 = parse_kernel(
        "rank1:mode=bilinear;xi=ind:1,2;eta=ind:1,3 + rank1:mode=bilinear;xi=hat:1,2;eta=ind:1,3"
    )
    assert len(K2.terms) == 2
    for bad in ("rank2:xi=ind:1,2", "rank1:xi=ind:1,2", "rank1:mode=x;xi=ind:1,2;eta=ind:1,2"):
        with pytest.raises(ConfigError):
            parse_kernel(bad)
