"""The signed bilinear pairing Phi on pairs of kernels and the derivation
identity it satisfies with respect to the dual-convolution product.

Phi(T1 (x) T0) = double Haar integral of sign(s) T1(s,t) T0(-s,-t).

For rank-one inputs it factors into two one-dimensional integrals; for a
lazy dual-convolution kernel in either slot the u-integral is pulled
outside (Fubini) so each evaluation is an outer adaptive u-integral of a
product of two one-dimensional inner integrals, never a nested kernel
quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._intervals import EMPTY, IntervalSet
from .convolution import LazyDCKernel, _split_panels, dc_kernel
from .errors import ModeMismatch, NonConvergence
from .functions import HaarFunction, scaled_product_integral
from .kernels import (
    FiniteRankKernel,
    RankOneTensor,
    l2_kernel_norm,
    support_s,
    support_t,
)
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    integrate_adaptive,
    integrate_log_2d,
)
from .report import Report, make_report


@dataclass(frozen=True)
class BilinearFormValue:
    value: complex
    route: str
    error_estimate: float


# -- rank-one / finite-rank routes ------------------------------------


def phi_rank_one(
    t1: RankOneTensor, t0: RankOneTensor, q: QuadratureSpec = DEFAULT_QUADRATURE
) -> complex:
    """Separable evaluation: the double integral splits into an s-factor
    (with the sign weight) and a t-factor."""
    if t1.pairing_mode != t0.pairing_mode:
        raise ModeMismatch("Phi requires matching pairing modes")
    if t1.is_zero or t0.is_zero:
        return 0.0 + 0.0j
    s_part = scaled_product_integral(
        [(t1.left, 1.0), (t0.left, -1.0)], q, signed=True
    )
    conj_right = t1.pairing_mode == "hilbert"
    t_part = scaled_product_integral(
        [(t1.right, 1.0), (t0.right, -1.0)], q, conjugate_result=conj_right
    )
    return s_part * t_part


def phi_kernel_2d(
    T1: FiniteRankKernel, T0: FiniteRankKernel, q: QuadratureSpec = DEFAULT_QUADRATURE
) -> BilinearFormValue:
    """Honest two-dimensional evaluation, used as an independent oracle
    for the separable route."""
    from .kernels import kernel_eval, s_breakpoints, t_breakpoints

    if T1.pairing_mode != T0.pairing_mode:
        raise ModeMismatch("Phi requires matching pairing modes")
    ss = support_s(T1).intersect(support_s(T0).scale(-1.0))
    ts = support_t(T1).intersect(support_t(T0).scale(-1.0))
    if ss.empty or ts.empty:
        return BilinearFormValue(0.0 + 0.0j, "2d", 0.0)

    def f2(S: np.ndarray, T: np.ndarray) -> np.ndarray:
        return np.sign(S) * kernel_eval(T1, S, T) * kernel_eval(T0, -S, -T)

    s_brk = list(s_breakpoints(T1)) + [-b for b in s_breakpoints(T0)]
    t_brk = list(t_breakpoints(T1)) + [-b for b in t_breakpoints(T0)]
    value, err = integrate_log_2d(f2, ss, ts, q, s_brk, t_brk)
    return BilinearFormValue(value, "2d", err)


# -- u-window machinery for lazy slots --------------------------------


def _pts(f: HaarFunction) -> tuple[float, ...]:
    return (*f.support.endpoints, *f.breakpoints)


def _psi_image(R: IntervalSet, clip_lo: float, clip_hi: float) -> IntervalSet:
    """Image of an r-set under u = r/(1+r), split at the pole r = -1 and
    clipped to [clip_lo, clip_hi] where a branch runs off to infinity."""

    def psi(r: float, fallback: float) -> float:
        if r == -1.0 or not math.isfinite(r):
            return fallback
        return r / (1.0 + r)

    out = []
    for r0, r1 in R.intervals:
        pieces = [(r0, r1)]
        if r0 < -1.0 < r1:
            pieces = [(r0, -1.0), (-1.0, r1)]
        for p0, p1 in pieces:
            u0 = psi(p0, clip_hi if p0 == -1.0 else clip_lo)
            u1 = psi(p1, clip_lo if p1 == -1.0 else clip_hi)
            lo, hi = min(u0, u1), max(u0, u1)
            lo = max(lo, clip_lo)
            hi = min(hi, clip_hi)
            if lo < hi:
                out.append((lo, hi))
    return IntervalSet(out)


def _u_window(
    F: HaarFunction, a: float, G: HaarFunction, b: float, H: HaarFunction, c: float
) -> tuple[IntervalSet, list[float]]:
    """u-values where S_F/(a(1-u)), S_G/(bu) and S_H/c can all meet,
    with the u-breakpoints where endpoint crossings change the overlap.

    Pairwise overlap conditions give a superset of the true window (the
    integrand vanishes on the excess) that stays strictly away from the
    poles u = 0 and u = 1: the F-H condition bounds u away from 1 and
    the G-H condition away from 0, since all supports avoid 0.
    """
    if F.is_zero or G.is_zero or H.is_zero:
        return EMPTY, []
    Hc = H.support.scale(1.0 / c)
    p1 = F.support.quotient(Hc).scale(1.0 / a).affine(-1.0, 1.0)
    p2 = G.support.quotient(Hc).scale(1.0 / b)
    w12 = p1.intersect(p2)
    if w12.empty:
        return EMPTY, []
    lo, hi = w12.bounds()
    r_set = G.support.quotient(F.support).scale(a / b)
    window = w12.intersect(_psi_image(r_set, lo, hi))
    if window.empty:
        return EMPTY, []
    breaks = []
    eH = [e / c for e in _pts(H) if e != 0.0]
    for ef in _pts(F):
        for eh in eH:
            breaks.append(1.0 - ef / (a * eh))
    for eg in _pts(G):
        for eh in eH:
            breaks.append(eg / (b * eh))
    for ef in _pts(F):
        for eg in _pts(G):
            den = b * ef + a * eg
            if den != 0.0:
                breaks.append(a * eg / den)
    return window, breaks


def _phi_lazy_left(
    K: LazyDCKernel, t0: RankOneTensor, q: QuadratureSpec
) -> complex:
    """Phi(K (x) t0) with K a lazy product of finite-rank kernels."""
    hilbert = t0.pairing_mode == "hilbert"
    inner_q = q.tightened()
    total = 0.0 + 0.0j
    for A in K.factor_left.terms:
        for B in K.factor_right.terms:
            if A.is_zero or B.is_zero or t0.is_zero:
                continue
            ws, bs = _u_window(A.left, 1.0, B.left, 1.0, t0.left, -1.0)
            wt, bt = _u_window(A.right, 1.0, B.right, 1.0, t0.right, -1.0)
            window = ws.intersect(wt)
            if window.empty:
                continue

            def at_u(u: float) -> complex:
                s_int = scaled_product_integral(
                    [(A.left, 1.0 - u), (B.left, u), (t0.left, -1.0)],
                    inner_q,
                    signed=True,
                )
                t_int = scaled_product_integral(
                    [(A.right, 1.0 - u), (B.right, u), (t0.right, -1.0)],
                    inner_q,
                    conjugate_result=hilbert,
                )
                return s_int * t_int / (abs(1.0 - u) * abs(u))

            def g(u: np.ndarray) -> np.ndarray:
                return np.array([at_u(float(uu)) for uu in u], dtype=complex)

            val, _ = integrate_adaptive(g, _split_panels(window, bs + bt), q)
            total += val
    return total


def _phi_lazy_right(
    t1: RankOneTensor, K: LazyDCKernel, q: QuadratureSpec
) -> complex:
    """Phi(t1 (x) K) with K a lazy product of finite-rank kernels."""
    hilbert = t1.pairing_mode == "hilbert"
    inner_q = q.tightened()
    total = 0.0 + 0.0j
    for A in K.factor_left.terms:
        for B in K.factor_right.terms:
            if A.is_zero or B.is_zero or t1.is_zero:
                continue
            ws, bs = _u_window(A.left, -1.0, B.left, -1.0, t1.left, 1.0)
            wt, bt = _u_window(A.right, -1.0, B.right, -1.0, t1.right, 1.0)
            window = ws.intersect(wt)
            if window.empty:
                continue

            def at_u(u: float) -> complex:
                s_int = scaled_product_integral(
                    [(t1.left, 1.0), (A.left, -(1.0 - u)), (B.left, -u)],
                    inner_q,
                    signed=True,
                )
                t_int = scaled_product_integral(
                    [(t1.right, 1.0), (A.right, -(1.0 - u)), (B.right, -u)],
                    inner_q,
                    conjugate_result=hilbert,
                )
                return s_int * t_int / (abs(1.0 - u) * abs(u))

            def g(u: np.ndarray) -> np.ndarray:
                return np.array([at_u(float(uu)) for uu in u], dtype=complex)

            val, _ = integrate_adaptive(g, _split_panels(window, bs + bt), q)
            total += val
    return total


def _require_finite_factors(K: LazyDCKernel) -> None:
    if not (
        isinstance(K.factor_left, FiniteRankKernel)
        and isinstance(K.factor_right, FiniteRankKernel)
    ):
        raise ValueError("lazy Phi slots require finite-rank factors")


def phi_pairing(T1, T0, q: QuadratureSpec = DEFAULT_QUADRATURE) -> BilinearFormValue:
    """Phi(T1 (x) T0); dispatches on the slot types."""
    if isinstance(T1, LazyDCKernel) and isinstance(T0, LazyDCKernel):
        raise ValueError("at most one Phi slot may be lazy")
    if isinstance(T1, LazyDCKernel):
        _require_finite_factors(T1)
        total = sum(
            (_phi_lazy_left(T1, t0, q) for t0 in T0.terms), 0.0 + 0.0j
        )
        return BilinearFormValue(total, "fubini-left", 0.0)
    if isinstance(T0, LazyDCKernel):
        _require_finite_factors(T0)
        total = sum(
            (_phi_lazy_right(t1, T0, q) for t1 in T1.terms), 0.0 + 0.0j
        )
        return BilinearFormValue(total, "fubini-right", 0.0)
    total = 0.0 + 0.0j
    for a in T1.terms:
        for b in T0.terms:
            total += phi_rank_one(a, b, q)
    return BilinearFormValue(total, "separable", 0.0)


# -- checkers ---------------------------------------------------------


def check_derivation_identity(
    triples: Sequence[tuple[FiniteRankKernel, FiniteRankKernel, FiniteRankKernel]],
    tol: float,
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
) -> Report:
    """Phi((T1**T2) (x) T0) = Phi(T2 (x) (T0**T1)) + Phi(T1 (x) (T2**T0))."""
    residuals = []
    failed = False
    inner_q = q.tightened()
    for T1, T2, T0 in triples:
        try:
            lhs = phi_pairing(dc_kernel(T1, T2, inner_q), T0, q).value
            r1 = phi_pairing(T2, dc_kernel(T0, T1, inner_q), q).value
            r2 = phi_pairing(T1, dc_kernel(T2, T0, inner_q), q).value
        except NonConvergence:
            failed = True
            residuals.append(math.inf)
            continue
        residuals.append(abs(lhs - r1 - r2))
    return make_report(
        "derivation-check", residuals, tol,
        n_cases=len(triples), seed=seed, failed_reason=failed,
    )


def check_phi_antisymmetry(
    pairs: Sequence[tuple[FiniteRankKernel, FiniteRankKernel]],
    tol: float,
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
) -> Report:
    """Swapping the slots flips the sign of Phi."""
    residuals = []
    for T1, T0 in pairs:
        a = phi_pairing(T1, T0, q).value
        b = phi_pairing(T0, T1, q).value
        residuals.append(abs(a + b))
    return make_report(
        "phi-antisymmetry", residuals, tol, n_cases=len(pairs), seed=seed
    )


def check_phi_l2_bound(
    pairs: Sequence[tuple[FiniteRankKernel, FiniteRankKernel]],
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
    slack: float = 1e-9,
) -> Report:
    """|Phi(T1 (x) T0)| never exceeds the product of Hilbert-Schmidt norms."""
    residuals = []
    for T1, T0 in pairs:
        val = abs(phi_pairing(T1, T0, q).value)
        bound = l2_kernel_norm(T1, q) * l2_kernel_norm(T0, q)
        residuals.append(max(0.0, val - bound))
    return make_report(
        "phi-l2-bound", residuals, slack, n_cases=len(pairs), seed=seed
    )
