"""Compactly supported functions on the multiplicative group.

A HaarFunction is an evaluator plus declared per-sign compact support
intervals.  All group actions (left/right dilation, sign multiplication,
reflection, variable inversion, half-line projection) are exact symbolic
wrappers: they compose closures and map support sets algebraically, so
no transform ever introduces grid or interpolation error.  Quadrature
only happens in haar_integral / lp_norm / pairing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Optional, Tuple

import numpy as np

from ._intervals import Interval, IntervalSet, interval
from .errors import ConfigError, DegenerateDilation
from .quadrature import QuadratureSpec, integrate_log

Smoothness = Literal["indicator", "piecewise-smooth", "smooth"]


@dataclass(frozen=True)
class HaarFunction:
    """A function on R-minus-zero with compact support off 0.

    evaluator must be vectorized over numpy arrays of nonzero reals; it
    is only ever called at points inside the declared support, so it may
    behave arbitrarily outside.  osc_hint is an upper bound on embedded
    oscillation frequency in t (cycles per unit), used for panel caps.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    support_pos: Optional[Interval]
    support_neg: Optional[Interval]
    smoothness_hint: Smoothness = "piecewise-smooth"
    breakpoints: Tuple[float, ...] = ()
    osc_hint: float = 0.0

    def __post_init__(self):
        if self.support_pos is not None:
            lo, hi = self.support_pos
            if not (0.0 < lo <= hi) or not math.isfinite(hi):
                raise ValueError("support_pos must be a compact interval in (0, inf)")
        if self.support_neg is not None:
            lo, hi = self.support_neg
            if not (lo <= hi < 0.0) or not math.isfinite(lo):
                raise ValueError("support_neg must be a compact interval in (-inf, 0)")
        ivs = []
        if self.support_neg is not None:
            ivs.append(self.support_neg)
        if self.support_pos is not None:
            ivs.append(self.support_pos)
        object.__setattr__(self, "_support_cache", IntervalSet(ivs))

    # -- support ------------------------------------------------------

    @property
    def support(self) -> IntervalSet:
        return self._support_cache

    @property
    def is_zero(self) -> bool:
        return self.support_pos is None and self.support_neg is None

    # -- evaluation ---------------------------------------------------

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        out = np.zeros(arr.shape, dtype=complex)
        if not self.is_zero:
            m = self.support.mask(arr)
            if m.any():
                out[m] = self.evaluator(arr[m])
        return complex(out[0]) if scalar else out


def zero_function() -> HaarFunction:
    return HaarFunction(lambda t: np.zeros(t.shape, dtype=complex), None, None, "indicator")


def _one_sided(a: float, b: float) -> tuple[Optional[Interval], Optional[Interval]]:
    if a > b:
        a, b = b, a
    if a > 0:
        return (a, b), None
    if b < 0:
        return None, (a, b)
    raise ValueError("support interval must avoid 0")


def indicator(a: float, b: float, amplitude: complex = 1.0) -> HaarFunction:
    """amplitude * 1_[a,b] on either half-line."""
    pos, neg = _one_sided(a, b)
    amp = complex(amplitude)
    return HaarFunction(
        lambda t: np.full(t.shape, amp), pos, neg, "indicator", ()
    )


def hat(a: float, b: float, amplitude: complex = 1.0) -> HaarFunction:
    """Piecewise-linear bump on [a,b]: 0 at the ends, amplitude at the middle."""
    pos, neg = _one_sided(a, b)
    lo, hi = (pos or neg)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    amp = complex(amplitude)

    def ev(t: np.ndarray) -> np.ndarray:
        return amp * np.maximum(0.0, 1.0 - np.abs(t - mid) / half)

    return HaarFunction(ev, pos, neg, "piecewise-smooth", (mid,))


def gauss_log(c: float, w: float, a: float, b: float, amplitude: complex = 1.0) -> HaarFunction:
    """Gaussian in log|t| (center c, width w), truncated to [a,b]."""
    if w <= 0:
        raise ValueError("width must be positive")
    pos, neg = _one_sided(a, b)
    amp = complex(amplitude)

    def ev(t: np.ndarray) -> np.ndarray:
        return amp * np.exp(-(((np.log(np.abs(t)) - c) / w) ** 2))

    return HaarFunction(ev, pos, neg, "smooth", ())


# -- exact transforms -------------------------------------------------


def _pack_support(s: IntervalSet) -> tuple[Optional[Interval], Optional[Interval]]:
    pos = neg = None
    for lo, hi in s.intervals:
        if lo > 0:
            pos = (lo, hi) if pos is None else (min(pos[0], lo), max(pos[1], hi))
        elif hi < 0:
            neg = (lo, hi) if neg is None else (min(neg[0], lo), max(neg[1], hi))
        else:
            raise ValueError("support interval touching 0")
    return pos, neg


def _with_support(f: HaarFunction, ev, s: IntervalSet, breaks, osc: float) -> HaarFunction:
    pos, neg = _pack_support(s)
    if pos is None and neg is None:
        return zero_function()
    return HaarFunction(ev, pos, neg, f.smoothness_hint, tuple(sorted(breaks)), osc)


def dilate(f: HaarFunction, r: float) -> HaarFunction:
    """lambda(r): t -> f(t/r); support scaled by r."""
    if r == 0.0:
        raise DegenerateDilation("dilation factor must be nonzero")
    if f.is_zero:
        return f
    if r == 1.0:
        return f
    ev = lambda t: f.evaluator(t / r)
    return _with_support(
        f, ev, f.support.scale(r), (r * b for b in f.breakpoints), f.osc_hint / abs(r)
    )


def right_dilate(f: HaarFunction, r: float) -> HaarFunction:
    """rho(r): t -> f(t r); equals dilate(f, 1/r) on the abelian group."""
    if r == 0.0:
        raise DegenerateDilation("dilation factor must be nonzero")
    return dilate(f, 1.0 / r)


def sign_multiply(f: HaarFunction) -> HaarFunction:
    """S: t -> sign(t) f(t)."""
    if f.is_zero:
        return f
    ev = lambda t: np.sign(t) * f.evaluator(t)
    return replace(f, evaluator=ev)


def reflect(f: HaarFunction) -> HaarFunction:
    """R: t -> f(-t)."""
    if f.is_zero:
        return f
    ev = lambda t: f.evaluator(-t)
    return _with_support(
        f, ev, f.support.scale(-1.0), (-b for b in f.breakpoints), f.osc_hint
    )


def invert_variable(f: HaarFunction) -> HaarFunction:
    """J: t -> f(1/t); support inverted endpoint-wise."""
    if f.is_zero:
        return f
    ev = lambda t: f.evaluator(1.0 / t)
    sup = f.support
    inner = sup.min_abs()
    osc = f.osc_hint / (inner * inner) if f.osc_hint else 0.0
    return _with_support(
        f, ev, sup.reciprocal(), (1.0 / b for b in f.breakpoints), osc
    )


def conjugate(f: HaarFunction) -> HaarFunction:
    """Complex conjugate, pointwise."""
    if f.is_zero:
        return f
    ev = lambda t: np.conj(f.evaluator(t))
    return replace(f, evaluator=ev)


def parity_project(f: HaarFunction, sign: str) -> HaarFunction:
    """P+ / P-: truncate to the requested half-line."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if f.is_zero:
        return f
    if sign == "+":
        if f.support_pos is None:
            return zero_function()
        keep = IntervalSet([f.support_pos])
    else:
        if f.support_neg is None:
            return zero_function()
        keep = IntervalSet([f.support_neg])
    breaks = [b for b in f.breakpoints if keep.contains(b)]
    return _with_support(f, f.evaluator, keep, breaks, f.osc_hint)


def pointwise_product(f: HaarFunction, g: HaarFunction) -> HaarFunction:
    """f * g with supports intersected per sign component."""
    if f.is_zero or g.is_zero:
        return zero_function()
    sup = f.support.intersect(g.support)
    if sup.empty:
        return zero_function()
    ev = lambda t: f.evaluator(t) * g.evaluator(t)
    breaks = [b for b in (*f.breakpoints, *g.breakpoints) if sup.contains(b)]
    pos, neg = _pack_support(sup)
    hint = "indicator" if (f.smoothness_hint == g.smoothness_hint == "indicator") else "piecewise-smooth"
    if "smooth" == f.smoothness_hint == g.smoothness_hint:
        hint = "smooth"
    return HaarFunction(ev, pos, neg, hint, tuple(sorted(set(breaks))), f.osc_hint + g.osc_hint)


def glue_sides(pos_part: HaarFunction, neg_part: HaarFunction) -> HaarFunction:
    """Combine a positive-half-line function and a negative-half-line
    function into one two-sided function (their pointwise sum; the
    supports are disjoint, so evaluation just dispatches on the sign)."""
    if pos_part.support_neg is not None or pos_part.support_pos is None:
        raise ValueError("first argument must live on the positive half-line")
    if neg_part.support_pos is not None or neg_part.support_neg is None:
        raise ValueError("second argument must live on the negative half-line")

    def ev(t: np.ndarray) -> np.ndarray:
        out = np.zeros(t.shape, dtype=complex)
        mp = t > 0
        if mp.any():
            out[mp] = pos_part.evaluator(t[mp])
        mn = ~mp
        if mn.any():
            out[mn] = neg_part.evaluator(t[mn])
        return out

    hints = {pos_part.smoothness_hint, neg_part.smoothness_hint}
    hint = "indicator" if hints == {"indicator"} else (
        "smooth" if hints == {"smooth"} else "piecewise-smooth"
    )
    return HaarFunction(
        ev,
        pos_part.support_pos,
        neg_part.support_neg,
        hint,
        tuple(sorted({*pos_part.breakpoints, *neg_part.breakpoints})),
        max(pos_part.osc_hint, neg_part.osc_hint),
    )


# -- integrals --------------------------------------------------------


def haar_integral(f: HaarFunction, q: QuadratureSpec, osc_freq: float = 0.0) -> complex:
    """Integral of f(t) dt/|t| over the group."""
    if f.is_zero:
        return 0.0 + 0.0j
    value, _ = integrate_log(
        f.evaluator,
        f.support,
        q,
        breakpoints=f.breakpoints,
        osc_freq=f.osc_hint + osc_freq,
    )
    return value


def lp_norm(f: HaarFunction, p: float, q: QuadratureSpec) -> float:
    """(integral of |f|^p dt/|t|)^(1/p)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if f.is_zero:
        return 0.0
    integrand = lambda t: np.abs(f.evaluator(t)) ** p
    value, _ = integrate_log(
        integrand, f.support, q, breakpoints=f.breakpoints, osc_freq=f.osc_hint
    )
    return float(value.real) ** (1.0 / p)


def pairing(
    f: HaarFunction, g: HaarFunction, conjugate_second: bool, q: QuadratureSpec
) -> complex:
    """Bilinear pairing (or Hilbert inner product when conjugating g)."""
    if f.is_zero or g.is_zero:
        return 0.0 + 0.0j
    h = pointwise_product(f, conjugate(g) if conjugate_second else g)
    return haar_integral(h, q)


def scaled_product_integral(
    factors,
    q: QuadratureSpec,
    signed: bool = False,
    osc_freq: float = 0.0,
    conjugate_result: bool = False,
):
    """Haar integral of a product of rescaled factors.

    factors is a sequence of (f, c) pairs; the integrand is
    prod_i f_i(c_i * t), optionally times sign(t) and e^{2 pi i b t}.
    Support and breakpoints are assembled exactly, so each smooth piece
    is panel-aligned.  Returns the integral (conjugated on request).
    """
    sup: Optional[IntervalSet] = None
    breaks: list[float] = []
    osc = abs(osc_freq)
    for f, c in factors:
        if f.is_zero or c == 0.0:
            return 0.0 + 0.0j
        fs = f.support.scale(1.0 / c)
        sup = fs if sup is None else sup.intersect(fs)
        if sup.empty:
            return 0.0 + 0.0j
        breaks.extend(b / c for b in f.breakpoints)
        breaks.extend(e / c for e in f.support.endpoints)
        osc += f.osc_hint * abs(c)

    facs = list(factors)

    def integrand(t: np.ndarray) -> np.ndarray:
        out = np.ones(t.shape, dtype=complex)
        for f, c in facs:
            ct = c * t
            vals = np.zeros(t.shape, dtype=complex)
            m = f.support.mask(ct)
            if m.any():
                vals[m] = f.evaluator(ct[m])
            out *= vals
        if signed:
            out *= np.sign(t)
        if osc_freq:
            out *= np.exp(2j * np.pi * osc_freq * t)
        return out

    value, _ = integrate_log(integrand, sup, q, breakpoints=breaks, osc_freq=osc)
    return np.conj(value) if conjugate_result else value


# -- named-family registry --------------------------------------------


def parse_function(text: str) -> HaarFunction:
    """Build a HaarFunction from a config string.

    Grammar: "ind:a,b" | "hat:a,b" | "glog:c,w,a,b", with an optional
    "*amp" suffix scaling the amplitude.
    """
    text = text.strip()
    amp = 1.0
    if "*" in text:
        text, amp_s = text.rsplit("*", 1)
        try:
            amp = float(amp_s)
        except ValueError as exc:
            raise ConfigError(f"bad amplitude in function spec: {amp_s!r}") from exc
    try:
        name, args_s = text.split(":", 1)
        args = [float(x) for x in args_s.split(",")]
    except ValueError as exc:
        raise ConfigError(f"malformed function spec: {text!r}") from exc
    try:
        if name == "ind" and len(args) == 2:
            return indicator(args[0], args[1], amp)
        if name == "hat" and len(args) == 2:
            return hat(args[0], args[1], amp)
        if name == "glog" and len(args) == 4:
            return gauss_log(args[0], args[1], args[2], args[3], amp)
    except ValueError as exc:
        raise ConfigError(f"invalid function parameters: {text!r} ({exc})") from exc
    raise ConfigError(f"unknown function family: {text!r}")
