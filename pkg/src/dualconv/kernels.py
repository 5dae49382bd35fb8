"""Finite-rank trace-class kernels T(s, t) on the product of two copies
of the multiplicative group.

Conventions: in "hilbert" pairing mode a rank-one tensor xi (x) eta has
kernel T(s,t) = xi(s) * conj(eta(t)); in "bilinear" mode the kernel is
xi(s) * eta(t).  The two conventions never mix silently: every tensor
carries its mode and mixed-mode operations raise ModeMismatch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence, Tuple, Union

import numpy as np

from ._intervals import EMPTY, IntervalSet
from .errors import ModeMismatch
from .functions import (
    HaarFunction,
    conjugate,
    lp_norm,
    parity_project,
    zero_function,
)
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec, integrate_log_2d

PairingMode = Literal["hilbert", "bilinear"]


@dataclass(frozen=True)
class RankOneTensor:
    left: HaarFunction
    right: HaarFunction
    pairing_mode: PairingMode = "hilbert"

    @property
    def is_zero(self) -> bool:
        return self.left.is_zero or self.right.is_zero

    def eval(self, s, t):
        if self.pairing_mode == "hilbert":
            return self.left(s) * np.conj(self.right(t))
        return self.left(s) * self.right(t)


@dataclass(frozen=True)
class FiniteRankKernel:
    terms: Tuple[RankOneTensor, ...]
    projective_bound: float

    @property
    def pairing_mode(self) -> PairingMode:
        return self.terms[0].pairing_mode if self.terms else "hilbert"

    @property
    def is_zero(self) -> bool:
        return all(t.is_zero for t in self.terms)


def finite_rank(
    terms: Sequence[RankOneTensor],
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    p: float = 2.0,
) -> FiniteRankKernel:
    """Assemble a kernel from rank-one terms, tracking the projective bound
    Sum ||xi_i||_p * ||eta_i||_q (p = q = 2 in hilbert mode)."""
    terms = tuple(terms)
    if len({t.pairing_mode for t in terms}) > 1:
        raise ModeMismatch("all terms must share a pairing mode")
    dual = p / (p - 1.0) if p != 2.0 else 2.0
    bound = sum(
        lp_norm(t.left, p, q) * lp_norm(t.right, dual, q) for t in terms
    )
    return FiniteRankKernel(terms, float(bound))


def rank_one(
    left: HaarFunction,
    right: HaarFunction,
    mode: PairingMode = "hilbert",
    q: QuadratureSpec = DEFAULT_QUADRATURE,
) -> FiniteRankKernel:
    return finite_rank([RankOneTensor(left, right, mode)], q)


Kernel = Union[FiniteRankKernel, "LazyDCKernel"]  # LazyDCKernel in convolution.py


# -- support bookkeeping ----------------------------------------------


def support_s(K) -> IntervalSet:
    """Support of the kernel in the first variable."""
    if isinstance(K, RankOneTensor):
        return EMPTY if K.is_zero else K.left.support
    if isinstance(K, FiniteRankKernel):
        out = EMPTY
        for term in K.terms:
            if not term.is_zero:
                out = out.union(term.left.support)
        return out
    return K.s_support  # lazy kernel


def support_t(K) -> IntervalSet:
    if isinstance(K, RankOneTensor):
        return EMPTY if K.is_zero else K.right.support
    if isinstance(K, FiniteRankKernel):
        out = EMPTY
        for term in K.terms:
            if not term.is_zero:
                out = out.union(term.right.support)
        return out
    return K.t_support


def s_breakpoints(K) -> Tuple[float, ...]:
    """Points where the kernel may be non-smooth in s (support endpoints
    and evaluator breakpoints; for lazy kernels, pairwise endpoint sums)."""
    if isinstance(K, RankOneTensor):
        K = FiniteRankKernel((K,), 0.0)
    if isinstance(K, FiniteRankKernel):
        out = set()
        for term in K.terms:
            if term.is_zero:
                continue
            out.update(term.left.support.endpoints)
            out.update(term.left.breakpoints)
        return tuple(sorted(out))
    return K.s_breaks


def t_breakpoints(K) -> Tuple[float, ...]:
    if isinstance(K, RankOneTensor):
        K = FiniteRankKernel((K,), 0.0)
    if isinstance(K, FiniteRankKernel):
        out = set()
        for term in K.terms:
            if term.is_zero:
                continue
            out.update(term.right.support.endpoints)
            out.update(term.right.breakpoints)
        return tuple(sorted(out))
    return K.t_breaks


# -- evaluation -------------------------------------------------------


def kernel_eval(K, s, t):
    """Kernel value; vectorized over same-shape arrays of s and t.

    For lazy dual-convolution kernels this triggers the nested
    quadrature defined in the convolution module.
    """
    if isinstance(K, FiniteRankKernel):
        s_arr = np.asarray(s, dtype=float)
        scalar = s_arr.ndim == 0
        out = np.zeros(np.atleast_1d(s_arr).shape, dtype=complex)
        for term in K.terms:
            out = out + np.atleast_1d(term.eval(s, t))
        return complex(out[0]) if scalar else out
    return K.eval(s, t)


# -- structural maps --------------------------------------------------


def transpose_predual(K: FiniteRankKernel) -> FiniteRankKernel:
    """The predual transpose: xi (x) eta -> conj(eta) (x) conj(xi)."""
    if K.pairing_mode != "hilbert":
        raise ModeMismatch("transpose_predual requires hilbert mode")
    terms = tuple(
        RankOneTensor(conjugate(t.right), conjugate(t.left), "hilbert")
        for t in K.terms
    )
    return FiniteRankKernel(terms, K.projective_bound)


def parity_compress(
    K: FiniteRankKernel, q: QuadratureSpec = DEFAULT_QUADRATURE
) -> FiniteRankKernel:
    """Diagonal parity compression: keep P+ (x) P+ and P- (x) P- blocks."""
    new_terms = []
    for term in K.terms:
        for sign in ("+", "-"):
            left = parity_project(term.left, sign)
            right = parity_project(term.right, sign)
            if not (left.is_zero or right.is_zero):
                new_terms.append(RankOneTensor(left, right, term.pairing_mode))
    return finite_rank(new_terms, q)


def l2_kernel_norm(K, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Hilbert-Schmidt norm: sqrt of the double Haar integral of |K|^2.

    Computed by honest tensor-product log-coordinate quadrature (not the
    separable shortcut), so it serves as an independent oracle for the
    rank-one closed form ||xi||_2 * ||eta||_2.
    """
    ss = support_s(K)
    ts = support_t(K)
    if ss.empty or ts.empty:
        return 0.0

    def f2(S: np.ndarray, T: np.ndarray) -> np.ndarray:
        return np.abs(kernel_eval(K, S, T)) ** 2

    value, _ = integrate_log_2d(
        f2, ss, ts, q, s_breakpoints(K), t_breakpoints(K)
    )
    return float(np.sqrt(value.real))


# -- config parsing ---------------------------------------------------


def parse_kernel(text: str, q: QuadratureSpec = DEFAULT_QUADRATURE) -> FiniteRankKernel:
    """Parse a kernel literal: "rank1:mode=hilbert;xi=ind:1,2;eta=ind:1,3",
    with multiple rank-one blocks joined by '+'."""
    from .errors import ConfigError
    from .functions import parse_function

    terms = []
    for block in text.split("+"):
        block = block.strip()
        if not block.startswith("rank1:"):
            raise ConfigError(f"kernel literal must start with 'rank1:': {block!r}")
        fields = {}
        for part in block[len("rank1:") :].split(";"):
            if "=" not in part:
                raise ConfigError(f"malformed kernel field: {part!r}")
            key, val = part.split("=", 1)
            fields[key.strip()] = val.strip()
        mode = fields.get("mode", "hilbert")
        if mode not in ("hilbert", "bilinear"):
            raise ConfigError(f"unknown pairing mode: {mode!r}")
        try:
            xi = parse_function(fields["xi"])
            eta = parse_function(fields["eta"])
        except KeyError as exc:
            raise ConfigError(f"kernel literal missing field: {exc}") from exc
        terms.append(RankOneTensor(xi, eta, mode))
    return finite_rank(terms, q)
