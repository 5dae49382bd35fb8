"""The dual-convolution product on trace-class kernels.

Two pointwise forms are implemented:

  u-form:  (T1 ** T2)(s,t) = int T1((1-u)s, (1-u)t) T2(us, ut) du / (|1-u||u|)
  h-form:  (T1 ** T2)(s,t) = int T1(s/(1+h), t/(1+h)) T2(hs/(1+h), ht/(1+h)) dh/|h|

related by the substitution 1 - u = (1+h)^(-1).  Products are lazy
kernels: evaluation at (s,t) first solves the four support constraints
for the exact u-interval(s), so the singular weights are never sampled
near their poles, then integrates adaptively with panels split at every
point where the integrand can lose smoothness.

A discretized Bochner form (rank-one terms at quadrature nodes in h)
exists as an independent cross-check, together with the direct
double-integral form of the triple product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ._intervals import EMPTY, IntervalSet
from .errors import ModeMismatch, NonConvergence
from .functions import HaarFunction, dilate, pointwise_product
from .kernels import (
    FiniteRankKernel,
    RankOneTensor,
    kernel_eval,
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

KernelLike = Union[FiniteRankKernel, "LazyDCKernel"]


def _mode_of(K: KernelLike) -> str:
    return K.pairing_mode


@dataclass(frozen=True)
class LazyDCKernel:
    """Unevaluated dual-convolution product of two kernels."""

    factor_left: KernelLike
    factor_right: KernelLike
    quadrature: QuadratureSpec
    variable: str  # "u" or "h" integration variable
    s_support: IntervalSet
    t_support: IntervalSet
    s_breaks: Tuple[float, ...]
    t_breaks: Tuple[float, ...]

    @property
    def pairing_mode(self) -> str:
        return _mode_of(self.factor_left)

    @property
    def is_zero(self) -> bool:
        return self.s_support.empty or self.t_support.empty

    # -- evaluation ---------------------------------------------------

    def eval(self, s, t):
        s_arr = np.asarray(s, dtype=float)
        t_arr = np.asarray(t, dtype=float)
        if s_arr.ndim == 0 and t_arr.ndim == 0:
            return self._eval_point(float(s_arr), float(t_arr))
        s_b, t_b = np.broadcast_arrays(s_arr, t_arr)
        out = np.empty(s_b.shape, dtype=complex)
        flat_s = s_b.ravel()
        flat_t = t_b.ravel()
        flat_o = out.ravel()
        for i in range(flat_s.size):
            flat_o[i] = self._eval_point(float(flat_s[i]), float(flat_t[i]))
        return out

    def _constraint_data(self):
        try:
            return self._cdata
        except AttributeError:
            T1, T2 = self.factor_left, self.factor_right
            data = (
                support_s(T1).intervals,
                support_s(T2).intervals,
                support_t(T1).intervals,
                support_t(T2).intervals,
                s_breakpoints(T1),
                s_breakpoints(T2),
                t_breakpoints(T1),
                t_breakpoints(T2),
            )
            object.__setattr__(self, "_cdata", data)
            return data

    def _u_intervals(self, s: float, t: float) -> tuple[list, list]:
        """Fast per-point version of the u-support constraints, on plain
        interval tuples (no IntervalSet churn in the inner loop)."""
        A, B, C, D, sb1, sb2, tb1, tb2 = self._constraint_data()
        u_ivs = _ivs_isect(
            _ivs_one_minus(_ivs_scale(A, 1.0 / s)),
            _ivs_scale(B, 1.0 / s),
        )
        if u_ivs:
            u_ivs = _ivs_isect(u_ivs, _ivs_one_minus(_ivs_scale(C, 1.0 / t)))
        if u_ivs:
            u_ivs = _ivs_isect(u_ivs, _ivs_scale(D, 1.0 / t))
        if not u_ivs:
            return [], []
        breaks = [1.0 - b / s for b in sb1]
        breaks += [b / s for b in sb2]
        breaks += [1.0 - b / t for b in tb1]
        breaks += [b / t for b in tb2]
        return u_ivs, breaks

    def _eval_point(self, s: float, t: float) -> complex:
        if s == 0.0 or t == 0.0:
            return 0.0 + 0.0j
        if not (self.s_support.contains(s) and self.t_support.contains(t)):
            return 0.0 + 0.0j
        u_ivs, breaks = self._u_intervals(s, t)
        if not u_ivs:
            return 0.0 + 0.0j
        T1, T2 = self.factor_left, self.factor_right
        if self.variable == "u":

            def g(u: np.ndarray) -> np.ndarray:
                w = 1.0 / (np.abs(1.0 - u) * np.abs(u))
                return (
                    kernel_eval(T1, (1.0 - u) * s, (1.0 - u) * t)
                    * kernel_eval(T2, u * s, u * t)
                    * w
                )

            panels = _split_ivs(u_ivs, breaks)
            value, _ = integrate_adaptive(g, panels, self.quadrature)
            return value
        u_set = IntervalSet(u_ivs)

        # h-form: substitute u = h/(1+h), flat measure in log|h|
        h_set = _u_to_h(u_set)
        h_breaks = [_u_to_h_point(b) for b in breaks if b not in (0.0, 1.0)]

        def gh(h: np.ndarray) -> np.ndarray:
            c = 1.0 / (1.0 + h)
            return kernel_eval(T1, s * c, t * c) * kernel_eval(T2, h * s * c, h * t * c)

        value, _ = integrate_log(gh, h_set, self.quadrature, breakpoints=h_breaks)
        return value

    def pole_distance(self, s: float, t: float) -> float:
        """Distance from the u-integration region to the poles {0, 1}."""
        u_set, _ = _u_constraints(self.factor_left, self.factor_right, s, t)
        if u_set.empty:
            return math.inf
        return u_set.distance_to([0.0, 1.0])


# -- support constraint solving ---------------------------------------


def _u_constraints(T1, T2, s: float, t: float) -> tuple[IntervalSet, list]:
    """Exact u-interval set where the product integrand can be nonzero,
    plus every u where it can lose smoothness."""
    A = support_s(T1)
    B = support_s(T2)
    C = support_t(T1)
    D = support_t(T2)
    if A.empty or B.empty or C.empty or D.empty:
        return EMPTY, []
    # (1-u)s in A  <=>  u in 1 - A/s, etc.
    u_set = (
        A.scale(1.0 / s)
        .affine(-1.0, 1.0)
        .intersect(B.scale(1.0 / s))
        .intersect(C.scale(1.0 / t).affine(-1.0, 1.0))
        .intersect(D.scale(1.0 / t))
    )
    if u_set.empty:
        return u_set, []
    breaks = [1.0 - b / s for b in s_breakpoints(T1)]
    breaks += [b / s for b in s_breakpoints(T2)]
    breaks += [1.0 - b / t for b in t_breakpoints(T1)]
    breaks += [b / t for b in t_breakpoints(T2)]
    return u_set, breaks


def u_support(T1, T2, s: float, t: float) -> list[tuple[float, float]]:
    """Intervals of u with (1-u)s, us, (1-u)t, ut inside the factor supports.

    Measure-zero contact is dropped, so an empty list certifies that the
    product kernel vanishes at (s, t).
    """
    u_set, _ = _u_constraints(T1, T2, s, t)
    return list(u_set.intervals)


_IVS_EPS = 1e-13


def _ivs_scale(ivs, r: float) -> list:
    if r > 0:
        return [(lo * r, hi * r) for lo, hi in ivs]
    return [(hi * r, lo * r) for lo, hi in reversed(ivs)]


def _ivs_one_minus(ivs) -> list:
    return [(1.0 - hi, 1.0 - lo) for lo, hi in reversed(ivs)]


def _ivs_isect(a, b) -> list:
    """Intersection of two sorted disjoint interval lists, with the
    measure-zero-contact convention (point overlaps dropped)."""
    out = []
    for a_lo, a_hi in a:
        for b_lo, b_hi in b:
            lo = max(a_lo, b_lo)
            hi = min(a_hi, b_hi)
            if hi - lo > _IVS_EPS * max(1.0, abs(lo), abs(hi)):
                out.append((lo, hi))
    out.sort()
    return out


def _split_ivs(ivs, breaks: Sequence[float]) -> list:
    panels = []
    bs = sorted(set(breaks))
    for lo, hi in ivs:
        cuts = [lo] + [b for b in bs if lo < b < hi] + [hi]
        panels.extend(zip(cuts[:-1], cuts[1:]))
    return panels


def _split_panels(u_set: IntervalSet, breaks: Sequence[float]) -> list:
    panels = []
    bs = sorted(set(breaks))
    for lo, hi in u_set.intervals:
        cuts = [lo] + [b for b in bs if lo < b < hi] + [hi]
        panels.extend(zip(cuts[:-1], cuts[1:]))
    return panels


def _u_to_h_point(u: float) -> float:
    return u / (1.0 - u)


def _u_to_h(u_set: IntervalSet) -> IntervalSet:
    """Image of the u-set under h = u/(1-u) (monotone off u = 1)."""
    out = []
    for lo, hi in u_set.intervals:
        out.append((_u_to_h_point(lo), _u_to_h_point(hi)))
    return IntervalSet(out)


# -- constructors -----------------------------------------------------


def _product_supports(T1, T2):
    """Support box of the product: s in A+B, t in C+D (Minkowski sums --
    exact per axis, since s = (1-u)s + us splits over the factors)."""
    A, B = support_s(T1), support_s(T2)
    C, D = support_t(T1), support_t(T2)
    if A.empty or B.empty or C.empty or D.empty:
        return EMPTY, EMPTY
    return A.minkowski(B), C.minkowski(D)


def _sum_breaks(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, ...]:
    return tuple(sorted({x + y for x in xs for y in ys}))


def _make_lazy(T1, T2, q: QuadratureSpec, variable: str) -> LazyDCKernel:
    if _mode_of(T1) != _mode_of(T2):
        raise ModeMismatch("dual convolution requires matching pairing modes")
    s_sup, t_sup = _product_supports(T1, T2)
    return LazyDCKernel(
        factor_left=T1,
        factor_right=T2,
        quadrature=q,
        variable=variable,
        s_support=s_sup,
        t_support=t_sup,
        s_breaks=_sum_breaks(s_breakpoints(T1), s_breakpoints(T2)),
        t_breaks=_sum_breaks(t_breakpoints(T1), t_breakpoints(T2)),
    )


def dc_kernel(T1, T2, q: QuadratureSpec = DEFAULT_QUADRATURE) -> LazyDCKernel:
    """The dual-convolution product, evaluated through the u-form."""
    return _make_lazy(T1, T2, q, "u")


def dc_kernel_hform(T1, T2, q: QuadratureSpec = DEFAULT_QUADRATURE) -> LazyDCKernel:
    """Same product, evaluated through the h-form (independent oracle)."""
    return _make_lazy(T1, T2, q, "h")


# -- Bochner discretization -------------------------------------------


def _as_rank_one(T) -> RankOneTensor:
    if isinstance(T, RankOneTensor):
        return T
    if isinstance(T, FiniteRankKernel) and len(T.terms) == 1:
        return T.terms[0]
    raise ValueError("rank-one input required")


def bochner_term_at(T1: RankOneTensor, T2: RankOneTensor, h: float) -> RankOneTensor:
    """The rank-one integrand of the Bochner form at a fixed h."""
    left = pointwise_product(dilate(T1.left, 1.0 + h), dilate(T2.left, 1.0 + 1.0 / h))
    right = pointwise_product(dilate(T1.right, 1.0 + h), dilate(T2.right, 1.0 + 1.0 / h))
    return RankOneTensor(left, right, T1.pairing_mode)


def bochner_h_support(T1: RankOneTensor, T2: RankOneTensor) -> tuple[IntervalSet, list]:
    """The h-set where both dilated-support overlaps are nonempty, plus
    the h-values where the overlap structure can change (endpoint
    quotients y/x, and the degenerate points h = +-1)."""
    if T1.is_zero or T2.is_zero:
        return EMPTY, []
    H = (
        T2.left.support.quotient(T1.left.support)
        .intersect(T2.right.support.quotient(T1.right.support))
    )
    breaks = {-1.0, 1.0}
    for f1, f2 in ((T1.left, T2.left), (T1.right, T2.right)):
        for x in f1.support.endpoints + f1.breakpoints:
            for y in f2.support.endpoints + f2.breakpoints:
                if x != 0.0:
                    breaks.add(y / x)
    return H, sorted(breaks)


def bochner_h_grid(
    T1: RankOneTensor,
    T2: RankOneTensor,
    refine_levels: int = 26,
) -> list[tuple[float, float]]:
    """Default h-panel decomposition: quotient support split at every
    structural breakpoint, with geometric refinement toward the panel
    ends (the term norms have square-root kinks there)."""
    H, breaks = bochner_h_support(T1, T2)
    panels = []
    for sign, x0, x1 in log_panels(H, breaks):
        edges = _geometric_edges(x0, x1, refine_levels)
        for e0, e1 in zip(edges[:-1], edges[1:]):
            h0 = sign * math.exp(e0)
            h1 = sign * math.exp(e1)
            panels.append((min(h0, h1), max(h0, h1)))
    return panels


def _geometric_edges(x0: float, x1: float, levels: int) -> list[float]:
    w = x1 - x0
    if w <= 0:
        return [x0, x1]
    left = [x0 + w * 0.5 ** (levels - k) for k in range(levels)]
    right = [x1 - w * 0.5 ** (levels - k) for k in range(levels)]
    edges = sorted({x0, x1, *left, *right})
    return [e for e in edges if x0 <= e <= x1]


def dc_bochner_terms(
    T1: RankOneTensor,
    T2: RankOneTensor,
    h_grid: Sequence[tuple[float, float]],
    order: int = 15,
) -> list[tuple[float, RankOneTensor]]:
    """Discretized Bochner integral: (weight, rank-one term) pairs at
    Gauss-Legendre nodes in log|h| over the given h-intervals."""
    T1 = _as_rank_one(T1)
    T2 = _as_rank_one(T2)
    if T1.is_zero or T2.is_zero:
        return []
    x_ref, w_ref = np.polynomial.legendre.leggauss(order)
    out: list[tuple[float, RankOneTensor]] = []
    for lo, hi in h_grid:
        if lo <= 0.0 <= hi:
            raise ValueError("h panels must avoid 0")
        if lo >= hi:  # rounded-away geometric sliver
            continue
        sign = 1.0 if lo > 0 else -1.0
        a0, a1 = sorted((math.log(abs(lo)), math.log(abs(hi))))
        half = 0.5 * (a1 - a0)
        mid = 0.5 * (a0 + a1)
        for xr, wr in zip(x_ref, w_ref):
            h = sign * math.exp(half * xr + mid)
            if h == -1.0:
                continue
            term = bochner_term_at(T1, T2, h)
            if term.is_zero:
                continue
            out.append((half * wr, term))
    return out


def check_bochner_norm_sum(
    pairs: Sequence[tuple[RankOneTensor, RankOneTensor]],
    slack: float = 1e-9,
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
    refine_levels: int = 26,
) -> Report:
    """The summed trace norms of the discretized Bochner terms never
    exceed the product of the four factor norms (Cauchy-Schwarz in h);
    the residual is the positive part of the excess."""
    from .functions import lp_norm

    residuals = []
    for T1, T2 in pairs:
        t1, t2 = _as_rank_one(T1), _as_rank_one(T2)
        grid = bochner_h_grid(t1, t2, refine_levels)
        total = 0.0
        for w, term in dc_bochner_terms(t1, t2, grid, q.base_order):
            total += w * lp_norm(term.left, 2.0, q) * lp_norm(term.right, 2.0, q)
        bound = (
            lp_norm(t1.left, 2.0, q)
            * lp_norm(t2.left, 2.0, q)
            * lp_norm(t1.right, 2.0, q)
            * lp_norm(t2.right, 2.0, q)
        )
        residuals.append(max(0.0, total - bound))
    return make_report(
        "bochner-norm-sum", residuals, slack, n_cases=len(pairs), seed=seed
    )


# -- direct triple product --------------------------------------------


def triple_product_direct(T1, T2, T3, q: QuadratureSpec = DEFAULT_QUADRATURE):
    """Evaluator for the symmetric double-integral form of T1**T2**T3.

    At (s,t) integrates over the compact (v,u)-region where all six
    dilated supports meet, outer variable v, inner variable u, with
    weight d(v,u)/(|v| |1-v-u| |u|).
    """
    t1 = _as_rank_one(T1)
    t2 = _as_rank_one(T2)
    t3 = _as_rank_one(T3)
    if t1.pairing_mode != t2.pairing_mode or t2.pairing_mode != t3.pairing_mode:
        raise ModeMismatch("triple product requires one pairing mode")
    hilbert = t1.pairing_mode == "hilbert"
    inner_q = q.tightened()

    def evaluator(s: float, t: float) -> complex:
        if s == 0.0 or t == 0.0:
            return 0.0 + 0.0j
        if any(f.is_zero for f in (t1, t2, t3)):
            return 0.0 + 0.0j
        v_set = t1.left.support.scale(1.0 / s).intersect(
            t1.right.support.scale(1.0 / t)
        )
        if v_set.empty:
            return 0.0 + 0.0j
        v_breaks = [b / s for b in (*t1.left.breakpoints, *t1.left.support.endpoints)]
        v_breaks += [b / t for b in (*t1.right.breakpoints, *t1.right.support.endpoints)]
        u_base = t3.left.support.scale(1.0 / s).intersect(
            t3.right.support.scale(1.0 / t)
        )
        if u_base.empty:
            return 0.0 + 0.0j
        mid_s = t2.left.support.scale(1.0 / s)
        mid_t = t2.right.support.scale(1.0 / t)
        if mid_s.empty or mid_t.empty:
            return 0.0 + 0.0j

        def inner(v: float) -> complex:
            # u must satisfy 1 - v - u in supp(middle factors) / {s,t}
            u_set = u_base.intersect(mid_s.affine(-1.0, 1.0 - v)).intersect(
                mid_t.affine(-1.0, 1.0 - v)
            )
            if u_set.empty:
                return 0.0 + 0.0j
            u_breaks = [b / s for b in (*t3.left.breakpoints, *t3.left.support.endpoints)]
            u_breaks += [b / t for b in (*t3.right.breakpoints, *t3.right.support.endpoints)]
            u_breaks += [1.0 - v - b / s for b in t2.left.breakpoints]
            u_breaks += [1.0 - v - b / t for b in t2.right.breakpoints]

            def g(u: np.ndarray) -> np.ndarray:
                mid = 1.0 - v - u
                left = t1.left(v * s) * t2.left(mid * s) * t3.left(u * s)
                right = t1.right(v * t) * t2.right(mid * t) * t3.right(u * t)
                if hilbert:
                    right = np.conj(right)
                w = 1.0 / (abs(v) * np.abs(mid) * np.abs(u))
                return left * right * w

            val, _ = integrate_adaptive(g, _split_panels(u_set, u_breaks), inner_q)
            return val

        def g_outer(v: np.ndarray) -> np.ndarray:
            return np.array([inner(float(vv)) for vv in v], dtype=complex)

        val, _ = integrate_adaptive(g_outer, _split_panels(v_set, v_breaks), q)
        return val

    return evaluator


# -- checkers ---------------------------------------------------------


def check_commutative(
    T1,
    T2,
    samples: Sequence[tuple[float, float]],
    tol: float,
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
) -> Report:
    """|dc(T1,T2)(s,t) - dc(T2,T1)(s,t)| at each sample point."""
    K12 = dc_kernel(T1, T2, q)
    K21 = dc_kernel(T2, T1, q)
    residuals = []
    pole_min = math.inf
    failed = False
    for s, t in samples:
        try:
            residuals.append(abs(K12.eval(s, t) - K21.eval(s, t)))
        except NonConvergence:
            failed = True
            residuals.append(math.inf)
            continue
        pole_min = min(pole_min, K12.pole_distance(s, t), K21.pole_distance(s, t))
    return make_report(
        "dc-commute", residuals, tol,
        pole_distance_min=pole_min, seed=seed, failed_reason=failed,
    )


def check_associative(
    T1,
    T2,
    T3,
    samples: Sequence[tuple[float, float]],
    tol: float,
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
) -> Report:
    """Pairwise residuals between dc(dc(T1,T2),T3), dc(T1,dc(T2,T3)),
    and the direct double-integral form, at each sample point."""
    inner_q = q.tightened()
    left_nested = dc_kernel(dc_kernel(T1, T2, inner_q), T3, q)
    right_nested = dc_kernel(T1, dc_kernel(T2, T3, inner_q), q)
    direct = triple_product_direct(T1, T2, T3, q)
    residuals = []
    pole_min = math.inf
    failed = False
    for s, t in samples:
        try:
            a = left_nested.eval(s, t)
            b = right_nested.eval(s, t)
            c = direct(s, t)
        except NonConvergence:
            failed = True
            residuals.append(math.inf)
            continue
        residuals.append(max(abs(a - b), abs(a - c), abs(b - c)))
        pole_min = min(
            pole_min,
            left_nested.pole_distance(s, t),
            right_nested.pole_distance(s, t),
        )
    return make_report(
        "dc-assoc", residuals, tol,
        pole_distance_min=pole_min, seed=seed, failed_reason=failed,
    )
