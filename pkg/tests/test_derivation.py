import math

import numpy as np
import pytest

from dualconv.convolution import dc_kernel
from dualconv.derivation import (
    check_derivation_identity,
    check_phi_antisymmetry,
    check_phi_l2_bound,
    phi_kernel_2d,
    phi_pairing,
    phi_rank_one,
)
from dualconv.errors import ModeMismatch
from dualconv.families import generate_tensors
from dualconv.functions import hat, indicator
from dualconv.kernels import rank_one
from dualconv.quadrature import DEFAULT_QUADRATURE as Q


def witness_pair():
    alpha = indicator(1.0, math.e)
    beta = indicator(-math.e, -1.0)
    return rank_one(alpha, alpha), rank_one(beta, beta)


def test_phi_witness_value_one():
    T1, T0 = witness_pair()
    v = phi_pairing(T1, T0, Q)
    assert v.route == "separable"
    assert abs(v.value - 1.0) < 1e-12


def test_phi_separable_matches_2d_oracle():
    T1 = rank_one(hat(1.0, 3.0), indicator(1.0, 2.0, 1.0 + 0.5j))
    T0 = rank_one(indicator(-2.5, -1.5), hat(-3.0, -1.0))
    sep = phi_pairing(T1, T0, Q).value
    twod = phi_kernel_2d(T1, T0, Q)
    assert abs(sep - twod.value) < 1e-9


def test_phi_antisymmetry_check():
    pairs = []
    for i in range(4):
        T1, = generate_tensors(300 + i, 1, parity="two-sided")
        T0, = generate_tensors(400 + i, 1, parity="two-sided")
        pairs.append((T1, T0))
    r = check_phi_antisymmetry(pairs, 1e-10, Q)
    assert r.passed
    # and at least one pair is nontrivially nonzero
    vals = [abs(phi_pairing(a, b, Q).value) for a, b in pairs]
    assert max(vals) > 1e-6


def test_phi_lazy_left_matches_bochner_oracle():
    from dualconv.convolution import bochner_h_grid, dc_bochner_terms

    T1 = rank_one(indicator(1.0, 2.0), indicator(1.0, 2.0))
    T2 = rank_one(indicator(1.0, 3.0), hat(1.0, 2.0))
    T0 = rank_one(indicator(-6.0, -1.0), indicator(-5.0, -1.0))
    K = dc_kernel(T1, T2, Q)
    lazy = phi_pairing(K, T0, Q)
    assert lazy.route == "fubini-left"

    # independent route: discretize K into rank-one terms and sum the
    # separable pairing values
    grid = bochner_h_grid(T1.terms[0], T2.terms[0])
    terms = dc_bochner_terms(T1.terms[0], T2.terms[0], grid)
    oracle = sum(
        w * phi_rank_one(term, T0.terms[0], Q) for w, term in terms
    )
    assert abs(lazy.value) > 1e-6
    assert abs(lazy.value - oracle) < 1e-7


def test_phi_lazy_right_is_antisymmetric_partner():
    T1 = rank_one(indicator(1.0, 2.0), indicator(1.0, 2.0))
    T2 = rank_one(indicator(1.0, 3.0), hat(1.0, 2.0))
    T0 = rank_one(indicator(-6.0, -1.0), indicator(-5.0, -1.0))
    K = dc_kernel(T1, T2, Q)
    a = phi_pairing(K, T0, Q).value
    b = phi_pairing(T0, K, Q).value
    assert abs(a) > 1e-6
    assert abs(a + b) < 1e-9


def test_phi_rejects_double_lazy_and_mode_mismatch():
    T1 = rank_one(indicator(1.0, 2.0), indicator(1.0, 2.0))
    K = dc_kernel(T1, T1, Q)
    with pytest.raises(ValueError):
        phi_pairing(K, K, Q)
    with pytest.raises(ModeMismatch):
        phi_rank_one(
            T1.terms[0],
            rank_one(indicator(1.0, 2.0), indicator(1.0, 2.0), "bilinear").terms[0],
        )


def test_derivation_identity_single_triple():
    T1, T2 = generate_tensors(501, 2, parity="two-sided")
    T0, = generate_tensors(100501, 1, parity="two-sided")
    r = check_derivation_identity([(T1, T2, T0)], 1e-5, Q, seed=501)
    assert r.passed


def test_phi_l2_bound():
    pairs = []
    for i in range(3):
        T1, = generate_tensors(600 + i, 1, parity="two-sided")
        T0, = generate_tensors(700 + i, 1, parity="two-sided")
        pairs.append((T1, T0))
    r = check_phi_l2_bound(pairs, Q)
    assert r.passed
