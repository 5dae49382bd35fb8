import math

import pytest

from dualconv.errors import InvalidExponent
from dualconv.functions import hat, indicator, lp_norm
from dualconv.lp import (
    CSV_HEADER,
    check_gamma_ratios,
    conjugate_exponent,
    dc_bilinear_smoke,
    gamma_function,
    gamma_ratio_table,
    row_to_csv,
    vp_isometry_check,
)
from dualconv.quadrature import DEFAULT_QUADRATURE as Q


def test_gamma_norms_are_2n_to_the_1_over_p():
    for n in (1, 4, 16):
        g = gamma_function(n)
        for p in (4.0 / 3.0, 2.0, 4.0):
            assert abs(lp_norm(g, p, Q) ** p - 2.0 * n) < 1e-10
    with pytest.raises(ValueError):
        gamma_function(0)


def test_conjugate_exponent():
    assert abs(conjugate_exponent(4.0) - 4.0 / 3.0) < 1e-15
    assert conjugate_exponent(2.0) == 2.0


@pytest.mark.parametrize("p", [4.0 / 3.0, 4.0])
def test_gamma_ratio_table_matches_closed_form(p):
    rows = gamma_ratio_table(p, (1, 2, 4, 8, 16), Q)
    assert len(rows) == 5
    for r in rows:
        assert r.residual < 1e-12
        if p < 2.0:
            assert abs(r.closed_form - r.n ** (0.5 - 1.0 / p)) < 1e-15
        else:
            assert abs(r.closed_form - r.n ** (0.5 - 1.0 / r.q)) < 1e-15
    # ratios shrink with n: the 2-norm bound is genuinely not attained in Lp
    assert rows[-1].ratio < rows[0].ratio if p < 2.0 else rows[-1].ratio < 1.0


def test_invalid_exponents_rejected():
    for p in (2.0, 1.0, 0.5, math.inf):
        with pytest.raises(InvalidExponent):
            gamma_ratio_table(p, (1, 2), Q)
    with pytest.raises(InvalidExponent):
        vp_isometry_check(indicator(1.0, 2.0), indicator(1.0, 2.0), math.inf, 1e-8, Q)


def test_check_gamma_ratios_report():
    r = check_gamma_ratios(4.0, (1, 2, 4), 1e-9, Q, seed=3)
    assert r.passed
    assert r.n_cases == 3
    assert r.seed == 3


def test_vp_isometry():
    f = indicator(1.0, math.e)
    g = hat(1.0, 4.0)
    for p in (1.5, 3.0):
        assert vp_isometry_check(f, g, p, 1e-8, Q).passed


def test_dc_bilinear_smoke():
    assert dc_bilinear_smoke(1e-6, Q).passed


def test_row_to_csv_field_count():
    rows = gamma_ratio_table(4.0, (2,), Q)
    line = row_to_csv(rows[0])
    assert len(line.split(",")) == len(CSV_HEADER.split(","))
    assert line.split(",")[0] == "2"
