import math

import numpy as np
import pytest

from dualconv.errors import ConfigError, DegenerateDilation
from dualconv.functions import (
    conjugate,
    dilate,
    gauss_log,
    glue_sides,
    haar_integral,
    hat,
    indicator,
    invert_variable,
    lp_norm,
    pairing,
    parity_project,
    parse_function,
    pointwise_product,
    reflect,
    right_dilate,
    scaled_product_integral,
    sign_multiply,
    zero_function,
)
from dualconv.quadrature import DEFAULT_QUADRATURE as Q


def test_indicator_eval_and_support():
    f = indicator(1.0, 2.0, 3.0)
    assert f(1.5) == 3.0
    assert f(2.5) == 0.0
    assert f.support.intervals == ((1.0, 2.0),)
    g = indicator(-2.0, -1.0)
    assert g(-1.5) == 1.0 and g(1.5) == 0.0


def test_support_must_avoid_zero():
    with pytest.raises(ValueError):
        indicator(-1.0, 1.0)


def test_hat_shape():
    f = hat(1.0, 3.0, 2.0)
    assert f(2.0) == 2.0
    assert abs(f(1.5) - 1.0) < 1e-14
    assert f(0.99) == 0.0
    assert f.breakpoints == (2.0,)


def test_dilate_exact():
    f = indicator(1.0, 2.0)
    g = dilate(f, 3.0)
    assert g.support.intervals == ((3.0, 6.0),)
    assert g(4.0) == 1.0 and g(2.0) == 0.0
    with pytest.raises(DegenerateDilation):
        dilate(f, 0.0)


def test_right_dilate_is_inverse_scaling():
    f = hat(1.0, 2.0)
    g = right_dilate(f, 2.0)
    assert abs(g(0.75) - f(1.5)) < 1e-14
    assert g.support.intervals == ((0.5, 1.0),)


def test_reflect_and_sign_multiply():
    f = indicator(1.0, 2.0)
    r = reflect(f)
    assert r(-1.5) == 1.0
    s = sign_multiply(reflect(f))
    assert s(-1.5) == -1.0


def test_invert_variable():
    f = indicator(2.0, 4.0)
    j = invert_variable(f)
    assert j.support.intervals == ((0.25, 0.5),)
    assert j(0.3) == 1.0


def test_conjugate():
    f = indicator(1.0, 2.0, 1.0 + 2.0j)
    assert conjugate(f)(1.5) == 1.0 - 2.0j


def test_parity_project():
    f = glue_sides(indicator(1.0, 2.0), indicator(-3.0, -2.0))
    p = parity_project(f, "+")
    m = parity_project(f, "-")
    assert p(-2.5) == 0.0 and p(1.5) == 1.0
    assert m(-2.5) == 1.0 and m(1.5) == 0.0


def test_pointwise_product():
    f = indicator(1.0, 3.0, 2.0)
    g = hat(2.0, 4.0)
    h = pointwise_product(f, g)
    assert h.support.intervals == ((2.0, 3.0),)
    assert abs(h(3.0) - 2.0 * g(3.0)) < 1e-14
    assert pointwise_product(f, indicator(5.0, 6.0)).is_zero


def test_haar_integral_closed_forms():
    assert abs(haar_integral(indicator(1.0, math.e), Q) - 1.0) < 1e-12
    # hat on [1,3]: integral of hat(t) dt/t has the closed form below
    val = haar_integral(hat(1.0, 3.0), Q)
    exact = 3 * math.log(3.0) - 4 * math.log(2.0)  # piecewise-linear oracle
    assert abs(val - exact) < 1e-11


def test_lp_norm_indicator_any_p():
    f = indicator(1.0, math.e)
    for p in (1.0, 1.5, 2.0, 4.0):
        assert abs(lp_norm(f, p, Q) - 1.0) < 1e-12


def test_pairing_modes():
    f = indicator(1.0, math.e, 1.0j)
    g = indicator(1.0, math.e, 1.0j)
    assert abs(pairing(f, g, True, Q) - 1.0) < 1e-12  # sesquilinear
    assert abs(pairing(f, g, False, Q) + 1.0) < 1e-12  # bilinear


def test_scaled_product_integral_matches_manual():
    import scipy.integrate as si

    f = hat(1.0, 2.0)
    g = indicator(0.5, 3.0)
    b = 3.0
    val = scaled_product_integral([(f, 2.0), (g, 1.0)], Q, osc_freq=b)
    fn = lambda t: (f(2 * t) * g(t) * np.exp(2j * np.pi * b * t)).real / t
    fn_i = lambda t: (f(2 * t) * g(t) * np.exp(2j * np.pi * b * t)).imag / t
    re, _ = si.quad(fn, 0.5, 1.0, limit=400)
    im, _ = si.quad(fn_i, 0.5, 1.0, limit=400)
    assert abs(val - (re + 1j * im)) < 1e-9


def test_scaled_product_signed_and_conjugate():
    f = indicator(-2.0, -1.0, 2.0j)
    val = scaled_product_integral([(f, 1.0)], Q, signed=True)
    assert abs(val - (-2.0j * math.log(2.0))) < 1e-12
    valc = scaled_product_integral([(f, 1.0)], Q, signed=True, conjugate_result=True)
    assert abs(valc - (2.0j * math.log(2.0))) < 1e-12


def test_glue_sides_validation():
    with pytest.raises(ValueError):
        glue_sides(indicator(-2.0, -1.0), indicator(-2.0, -1.0))


def test_zero_function():
    z = zero_function()
    assert z.is_zero
    assert haar_integral(z, Q) == 0.0
    assert dilate(z, 5.0).is_zero


def test_gauss_log_smooth():
    f = gauss_log(0.0, 1.0, 0.5, 2.0)
    assert f.smoothness_hint == "smooth"
    assert abs(f(1.0) - 1.0) < 1e-14


def test_parse_function():
    f = parse_function("ind:1,2*0.5")
    assert f(1.5) == 0.5
    g = parse_function("hat:-3,-1")
    assert g(-2.0) == 1.0
    h = parse_function("glog:0,1,0.5,2")
    assert abs(h(1.0) - 1.0) < 1e-14
    for bad in ("nope:1,2", "ind:1", "ind:1,2*x", "hat"):
        with pytest.raises(ConfigError):
            parse_function(bad)
