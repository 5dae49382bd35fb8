"""The affine group, its representation on the multiplicative group, and
coefficient-function machinery.

coeff of a rank-one tensor xi (x) eta at x = (b, a):

    int e^{2 pi i b t} xi(t a) eta~(t) dt/|t|

with eta~ = conj(eta) in hilbert mode, eta in bilinear mode.  The
coefficient of a lazy dual-convolution kernel K is defined through the
kernel convention as int e^{2 pi i b t} K(t a, t) dt/|t|; this identity
is itself cross-validated against the discretized Bochner route inside
check_fusion rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ._intervals import IntervalSet, interval
from .convolution import (
    LazyDCKernel,
    bochner_h_support,
    bochner_term_at,
    dc_kernel,
)
from .errors import ConfigError, NonConvergence, ParityUndefined
from .functions import (
    HaarFunction,
    conjugate,
    lp_norm,
    scaled_product_integral,
)
from .kernels import (
    FiniteRankKernel,
    RankOneTensor,
    parity_compress,
    s_breakpoints,
    support_s,
    support_t,
    t_breakpoints,
)
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    integrate_adaptive,
    integrate_log,
    log_panels,
)
from .report import Report, make_report


@dataclass(frozen=True)
class GroupElement:
    """(b, a) acting as t -> at + b; a must be nonzero."""

    b: float
    a: float

    def __post_init__(self):
        if self.a == 0.0:
            raise ValueError("dilation part must be nonzero")


IDENTITY = GroupElement(0.0, 1.0)


def group_mul(x: GroupElement, y: GroupElement) -> GroupElement:
    return GroupElement(x.a * y.b + x.b, x.a * y.a)


def group_inv(x: GroupElement) -> GroupElement:
    return GroupElement(-x.b / x.a, 1.0 / x.a)


def pi_act(x: GroupElement, f: HaarFunction) -> HaarFunction:
    """pi(b,a) f : t -> e^{2 pi i b t} f(t a)."""
    if f.is_zero:
        return f
    b, a = x.b, x.a

    def ev(t: np.ndarray) -> np.ndarray:
        phase = np.exp(2j * np.pi * b * t) if b != 0.0 else 1.0
        return phase * f.evaluator(t * a)

    sup = f.support.scale(1.0 / a)
    from .functions import _with_support  # shared support packer

    hint = f.smoothness_hint
    out = _with_support(
        f, ev, sup, (p / a for p in f.breakpoints), abs(b) + f.osc_hint * abs(a)
    )
    if b != 0.0 and hint == "smooth":
        out = out.__class__(
            out.evaluator, out.support_pos, out.support_neg,
            "piecewise-smooth", out.breakpoints, out.osc_hint,
        )
    return out


@dataclass(frozen=True)
class CoefficientFunction:
    kernel: Union[FiniteRankKernel, LazyDCKernel]
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE

    @property
    def pairing_mode(self) -> str:
        return self.kernel.pairing_mode


def _coeff_rank_one(
    term: RankOneTensor, x: GroupElement, q: QuadratureSpec
) -> complex:
    if term.is_zero:
        return 0.0 + 0.0j
    eta = conjugate(term.right) if term.pairing_mode == "hilbert" else term.right
    return scaled_product_integral(
        [(term.left, x.a), (eta, 1.0)], q, osc_freq=x.b
    )


def coeff_eval(
    c: Union[CoefficientFunction, FiniteRankKernel, LazyDCKernel, RankOneTensor],
    x: GroupElement,
    q: Optional[QuadratureSpec] = None,
) -> complex:
    """Evaluate the coefficient function of a kernel at a group element."""
    if isinstance(c, CoefficientFunction):
        q = q or c.quadrature
        c = c.kernel
    q = q or DEFAULT_QUADRATURE
    if isinstance(c, RankOneTensor):
        return _coeff_rank_one(c, x, q)
    if isinstance(c, FiniteRankKernel):
        return sum((_coeff_rank_one(t, x, q) for t in c.terms), 0.0 + 0.0j)
    # lazy kernel: direct t-integral against the kernel diagonal section
    K = c
    t_sup = support_s(K).scale(1.0 / x.a).intersect(support_t(K))
    if t_sup.empty:
        return 0.0 + 0.0j
    breaks = [p / x.a for p in s_breakpoints(K)] + list(t_breakpoints(K))
    # along t -> K(ta, t) the u-window also loses smoothness where an
    # s-side constraint endpoint crosses a t-side one: t = alpha/a + delta
    # with alpha an s-endpoint of one factor, delta a t-endpoint of the other
    f1, f2 = K.factor_left, K.factor_right
    breaks += [
        p / x.a + r
        for (F, G) in ((f1, f2), (f2, f1))
        for p in s_breakpoints(F)
        for r in t_breakpoints(G)
    ]
    b = x.b

    def integrand(t: np.ndarray) -> np.ndarray:
        vals = K.eval(t * x.a, t)
        if b != 0.0:
            vals = vals * np.exp(2j * np.pi * b * t)
        return vals

    value, _ = integrate_log(integrand, t_sup, q, breakpoints=breaks, osc_freq=abs(b))
    return value


# -- fusion ------------------------------------------------------------


def _fusion_phase_panels(
    H: IntervalSet,
    breaks: Sequence[float],
    x: GroupElement,
    t1: RankOneTensor,
    t2: RankOneTensor,
) -> list[tuple[float, float, float]]:
    """Log-|h| panels over H whose width keeps the coefficient integrand's
    phase drift under about one oscillation cycle per panel.

    The moving t-endpoints of the inner integral sit inside the product
    support, so their log-h derivative is bounded by
    min(T_max/|1+h|, M1, M2/|h|) * max(1, |h|); panels are bisected until
    they span at most three oscillation periods (well inside what the
    base Gauss-Legendre order resolves to 1e-9).
    """
    a = abs(x.a)
    b = abs(x.b)
    s_box = t1.left.support.minkowski(t2.left.support)
    t_box = t1.right.support.minkowski(t2.right.support)
    T_max = min(s_box.max_abs() / a, t_box.max_abs())
    M1 = min(t1.left.support.max_abs() / a, t1.right.support.max_abs())
    M2 = min(t2.left.support.max_abs() / a, t2.right.support.max_abs())

    def rate(h: float) -> float:
        g = max(1.0, abs(h))
        first = T_max * g / abs(1.0 + h) if h != -1.0 else math.inf
        return min(first, M1 * g, M2 * max(1.0, 1.0 / abs(h)))

    out: list[tuple[float, float, float]] = []

    def push(sign: float, x0: float, x1: float, depth: int) -> None:
        h0, h1 = sign * math.exp(x0), sign * math.exp(x1)
        r = max(rate(h0), rate(0.5 * (h0 + h1)), rate(h1))
        if depth < 40 and b * r * (x1 - x0) > 3.0 and (x1 - x0) > 1e-12:
            xm = 0.5 * (x0 + x1)
            push(sign, x0, xm, depth + 1)
            push(sign, xm, x1, depth + 1)
        else:
            out.append((sign, x0, x1))

    for sign, x0, x1 in log_panels(H, breaks, t_width_cap=math.inf):
        push(sign, x0, x1, 0)
    return out


def fusion_bochner_route(
    t1: RankOneTensor, t2: RankOneTensor, x: GroupElement, q: QuadratureSpec
) -> complex:
    """Route (i): sum of coefficient values of the discretized Bochner
    terms over a phase-aware h-grid."""
    H, breaks = bochner_h_support(t1, t2)
    if H.empty:
        return 0.0 + 0.0j
    # a-scaled endpoint crossings add kinks beyond the intrinsic ones
    g1 = set(t1.left.support.endpoints) | set(t1.left.breakpoints)
    g1 = {p / x.a for p in g1} | set(t1.right.support.endpoints) | set(t1.right.breakpoints)
    g2 = set(t2.left.support.endpoints) | set(t2.left.breakpoints)
    g2 = {p / x.a for p in g2} | set(t2.right.support.endpoints) | set(t2.right.breakpoints)
    extra = {y / p for p in g1 for y in g2 if p != 0.0}
    panels = _fusion_phase_panels(H, sorted(set(breaks) | extra), x, t1, t2)
    nodes, weights = np.polynomial.legendre.leggauss(q.base_order)
    total = 0.0 + 0.0j
    for sign, x0, x1 in panels:
        half = 0.5 * (x1 - x0)
        mid = 0.5 * (x0 + x1)
        for xr, wr in zip(nodes, weights):
            h = sign * math.exp(half * xr + mid)
            term = bochner_term_at(t1, t2, h)
            if term.is_zero:
                continue
            total += half * wr * _coeff_rank_one(term, x, q)
    return total


def check_fusion(
    T1,
    T2,
    samples: Sequence[GroupElement],
    tol: float,
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
) -> Report:
    """Product of two coefficients vs the coefficient of the product,
    computed through both the Bochner-term route and the lazy-kernel
    route."""
    from .convolution import _as_rank_one

    t1 = _as_rank_one(T1)
    t2 = _as_rank_one(T2)
    K = dc_kernel(
        FiniteRankKernel((t1,), 0.0), FiniteRankKernel((t2,), 0.0), q.tightened()
    )
    H, _ = bochner_h_support(t1, t2)
    pole_min = H.distance_to([0.0, -1.0]) if not H.empty else math.inf
    residuals = []
    failed = False
    for x in samples:
        try:
            lhs = _coeff_rank_one(t1, x, q) * _coeff_rank_one(t2, x, q)
            r_bochner = fusion_bochner_route(t1, t2, x, q)
            r_kernel = coeff_eval(K, x, q)
        except NonConvergence:
            failed = True
            residuals.append(math.inf)
            continue
        residuals.append(max(abs(lhs - r_bochner), abs(lhs - r_kernel)))
    return make_report(
        "fusion-check", residuals, tol,
        pole_distance_min=pole_min, seed=seed, failed_reason=failed,
    )


# -- parity ------------------------------------------------------------


def _parity_of(f: HaarFunction) -> str:
    if f.support_pos is not None and f.support_neg is not None:
        raise ParityUndefined("function has support on both half-lines")
    return "-" if f.support_neg is not None else "+"


def check_parity_vanishing(
    xi: HaarFunction,
    eta: HaarFunction,
    samples: Sequence[GroupElement],
    tol: float,
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
) -> Report:
    """Coefficient of a fixed-parity pair vanishes on half the group:
    for equal parities at every sample with a < 0, for opposite parities
    at every sample with a > 0."""
    same_parity = _parity_of(xi) == _parity_of(eta)
    term = RankOneTensor(xi, eta, "hilbert")
    residuals = []
    for x in samples:
        vanishing_side = (x.a < 0) if same_parity else (x.a > 0)
        if not vanishing_side:
            continue
        residuals.append(abs(_coeff_rank_one(term, x, q)))
    return make_report("parity-check", residuals, tol, seed=seed)


def check_intertwine_Pe(
    T: FiniteRankKernel,
    samples: Sequence[GroupElement],
    tol: float,
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
) -> Report:
    """Parity compression of the kernel intertwines with restriction of
    the coefficient to the a > 0 half of the group."""
    Tc = parity_compress(T, q)
    residuals = []
    failed = False
    for x in samples:
        try:
            compressed = coeff_eval(Tc, x, q)
            if x.a > 0:
                residuals.append(abs(compressed - coeff_eval(T, x, q)))
            else:
                residuals.append(abs(compressed))
        except NonConvergence:
            failed = True
            residuals.append(math.inf)
    return make_report(
        "intertwine-check", residuals, tol, seed=seed, failed_reason=failed
    )


def check_pdiag_homomorphism(
    T1: FiniteRankKernel,
    T2: FiniteRankKernel,
    samples: Sequence[tuple[float, float]],
    tol: float,
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
) -> Report:
    """Diagonal parity compression is multiplicative for the product:
    compressing the factors equals compressing the product, i.e. the
    product of compressed factors agrees with the full product where
    sign(s) = sign(t) and vanishes where the signs differ."""
    full = dc_kernel(T1, T2, q)
    compressed = dc_kernel(parity_compress(T1, q), parity_compress(T2, q), q)
    residuals = []
    failed = False
    for s, t in samples:
        try:
            c = compressed.eval(s, t)
            if (s > 0) == (t > 0):
                residuals.append(abs(c - full.eval(s, t)))
            else:
                residuals.append(abs(c))
        except NonConvergence:
            failed = True
            residuals.append(math.inf)
    return make_report(
        "pdiag-homomorphism", residuals, tol, seed=seed, failed_reason=failed
    )


# -- W / V isometries --------------------------------------------------


def _quotient_breaks(num: HaarFunction, den: HaarFunction) -> list[float]:
    out = set()
    for y in num.support.endpoints + num.breakpoints:
        for p in den.support.endpoints + den.breakpoints:
            if p != 0.0:
                out.add(y / p)
    return sorted(out)


def _abs_sq(f: HaarFunction, t: np.ndarray) -> np.ndarray:
    vals = np.zeros(t.shape, dtype=float)
    m = f.support.mask(t)
    if m.any():
        vals[m] = np.abs(f.evaluator(t[m])) ** 2
    return vals


def rho_isometry_integral(
    f: HaarFunction, g: HaarFunction, q: QuadratureSpec
) -> float:
    """int ||rho(h) f . g||_2^2 dh/|h| (right-dilation form)."""
    Q = f.support.quotient(g.support)
    if Q.empty:
        return 0.0
    inner_q = q.tightened()
    breaks = _quotient_breaks(f, g)

    def at_h(h: float) -> float:
        sup = f.support.scale(1.0 / h).intersect(g.support)
        if sup.empty:
            return 0.0
        bks = [p / h for p in (*f.breakpoints, *f.support.endpoints)]
        bks += list(g.breakpoints)
        val, _ = integrate_log(
            lambda t: _abs_sq(f, t * h) * _abs_sq(g, t), sup, inner_q, breakpoints=bks
        )
        return val.real

    def outer(h: np.ndarray) -> np.ndarray:
        return np.array([at_h(float(hh)) for hh in h], dtype=complex)

    val, _ = integrate_log(outer, Q, q, breakpoints=breaks)
    return val.real


def lambda_isometry_integral(
    f: HaarFunction, g: HaarFunction, q: QuadratureSpec, p: float = 2.0
) -> float:
    """int || lambda(1+h) f . lambda(1+1/h) g ||_p^p dh/|h|."""
    H = g.support.quotient(f.support)
    if H.empty:
        return 0.0
    inner_q = q.tightened()
    breaks = _quotient_breaks(g, f) + [-1.0, 1.0]

    def at_h(h: float) -> float:
        if h == -1.0:
            return 0.0
        c1 = 1.0 + h
        c2 = 1.0 + 1.0 / h
        sup = f.support.scale(c1).intersect(g.support.scale(c2))
        if sup.empty:
            return 0.0
        bks = [c1 * p_ for p_ in (*f.breakpoints, *f.support.endpoints)]
        bks += [c2 * p_ for p_ in (*g.breakpoints, *g.support.endpoints)]

        def integrand(t: np.ndarray) -> np.ndarray:
            vf = np.zeros(t.shape, dtype=float)
            mf = f.support.mask(t / c1)
            if mf.any():
                vf[mf] = np.abs(f.evaluator(t[mf] / c1))
            vg = np.zeros(t.shape, dtype=float)
            mg = g.support.mask(t / c2)
            if mg.any():
                vg[mg] = np.abs(g.evaluator(t[mg] / c2))
            return (vf * vg) ** p

        val, _ = integrate_log(integrand, sup, inner_q, breakpoints=bks)
        return val.real

    def outer(h: np.ndarray) -> np.ndarray:
        return np.array([at_h(float(hh)) for hh in h], dtype=complex)

    val, _ = integrate_log(outer, H, q, breakpoints=breaks)
    return val.real


def v_isometry_integral(
    f: HaarFunction, g: HaarFunction, q: QuadratureSpec
) -> float:
    """Same double integral as the lambda form, iterated the other way:
    substituting m = t/(1+h) turns it into
    int dt int |f(m)|^2 |g(t-m)|^2 dm/(|m||t-m|), an additive-convolution
    layout that serves as an independent discretization."""
    if f.is_zero or g.is_zero:
        return 0.0
    t_sup = f.support.minkowski(g.support)
    inner_q = q.tightened()
    f_pts = (*f.support.endpoints, *f.breakpoints)
    g_pts = (*g.support.endpoints, *g.breakpoints)
    t_breaks = sorted({a + b for a in f_pts for b in g_pts})

    def at_t(t: float) -> float:
        sup = f.support.intersect(g.support.affine(-1.0, t))
        if sup.empty:
            return 0.0
        bks = list(f_pts) + [t - p for p in g_pts]

        def integrand(m: np.ndarray) -> np.ndarray:
            other = t - m
            vals = _abs_sq(f, m) * _abs_sq(g, other)
            return vals / np.abs(other)

        val, _ = integrate_log(integrand, sup, inner_q, breakpoints=bks)
        return val.real

    # outer integral is flat in t (the 1/|t| weight cancels exactly)
    panels = []
    for lo, hi in t_sup.intervals:
        cuts = [lo] + [b for b in t_breaks if lo < b < hi] + [hi]
        panels.extend(zip(cuts[:-1], cuts[1:]))

    def outer(t: np.ndarray) -> np.ndarray:
        return np.array([at_t(float(tt)) for tt in t], dtype=complex)

    val, _ = integrate_adaptive(outer, panels, q)
    return val.real


def check_W_isometry(
    f: HaarFunction,
    g: HaarFunction,
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    tol: float = 1e-8,
    seed: Optional[int] = None,
) -> Report:
    """Isometry of the direct-integral decomposition on f (x) g, checked
    through three independent quadrature layouts (rho-form, lambda-form,
    and the additive-convolution V-form)."""
    target = (lp_norm(f, 2.0, q) * lp_norm(g, 2.0, q)) ** 2
    scale = max(target, 1e-30)
    residuals = [
        abs(rho_isometry_integral(f, g, q) - target) / scale,
        abs(lambda_isometry_integral(f, g, q) - target) / scale,
        abs(v_isometry_integral(f, g, q) - target) / scale,
    ]
    return make_report("w-isometry", residuals, tol, seed=seed)


# -- sample-grid parsing ----------------------------------------------


def parse_samples(text: str) -> list[GroupElement]:
    """Parse a grid like "b=lin:-10,10,21;a=log:0.25,4,7,both-signs"."""
    bs: list[float] = []
    a_vals: list[float] = []
    for part in text.split(";"):
        part = part.strip()
        if "=" not in part:
            raise ConfigError(f"malformed sample grid field: {part!r}")
        key, spec = part.split("=", 1)
        key = key.strip()
        pieces = spec.split(":")
        if len(pieces) != 2:
            raise ConfigError(f"malformed sample grid spec: {spec!r}")
        kind, args_s = pieces
        args = [s.strip() for s in args_s.split(",")]
        both = "both-signs" in args
        args = [a for a in args if a != "both-signs"]
        try:
            lo, hi, n = float(args[0]), float(args[1]), int(args[2])
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"malformed grid arguments: {args_s!r}") from exc
        if kind == "lin":
            vals = list(np.linspace(lo, hi, n))
        elif kind == "log":
            if lo <= 0 or hi <= 0:
                raise ConfigError("log grids need positive bounds")
            vals = list(np.geomspace(lo, hi, n))
        else:
            raise ConfigError(f"unknown grid kind: {kind!r}")
        if both:
            vals = vals + [-v for v in vals]
        if key == "b":
            bs = vals
        elif key == "a":
            a_vals = vals
        else:
            raise ConfigError(f"unknown grid variable: {key!r}")
    if not bs or not a_vals:
        raise ConfigError("sample grid must define both b and a")
    return [GroupElement(b, a) for b in bs for a in a_vals]
