"""Adaptive Gauss-Legendre quadrature for Haar-measure integrals.

All integrals over the multiplicative group are computed in log
coordinates t = sigma * e^x (sigma = +-1), where the Haar weight dt/|t|
becomes the flat measure dx.  Panels are split at the log-images of the
integrand's breakpoints, so indicator-type integrands are exactly
panel-aligned and a single fixed-order rule is already exact on each
smooth piece.  Oscillatory factors e^{2 pi i b t} are handled by capping
the panel width *in t* at half an oscillation period.

The error estimate on a panel is |GL(n) on the two halves - GL(n) on the
whole panel|; adaptive refinement bisects the offending panels until the
summed estimate meets tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from ._intervals import IntervalSet
from .errors import NonConvergence

# Intervals whose inner edge touches 0 (possible for Minkowski-sum
# support boxes) are clamped at this fraction of the outer edge before
# mapping to log coordinates; the integrands in question vanish linearly
# at 0, so the truncation error is far below every tolerance in use.
_ZERO_FLOOR_RATIO = 1e-12

# Panels narrower than this (relative) are never split further.
_MIN_PANEL = 5e-15


@dataclass(frozen=True)
class QuadratureSpec:
    """Error targets and panel policy for every integral in the package."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 60
    base_order: int = 15

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol < 0:
            raise ValueError("rel_tol must be positive, abs_tol nonnegative")
        if self.max_subdivisions < 1 or self.base_order < 2:
            raise ValueError("max_subdivisions >= 1 and base_order >= 2 required")

    def tightened(self, factor: float = 10.0) -> "QuadratureSpec":
        """Per-nesting-level tolerance tightening for composed integrals."""
        return QuadratureSpec(
            rel_tol=self.rel_tol / factor,
            abs_tol=self.abs_tol / factor,
            max_subdivisions=self.max_subdivisions,
            base_order=self.base_order,
        )


DEFAULT_QUADRATURE = QuadratureSpec()

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(n: int) -> tuple[np.ndarray, np.ndarray]:
    try:
        return _GL_CACHE[n]
    except KeyError:
        nodes, weights = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (nodes, weights)
        return nodes, weights


def _estimate(
    g: Callable[[np.ndarray], np.ndarray], panels: np.ndarray, order: int
) -> tuple[np.ndarray, np.ndarray]:
    """Refined value and error estimate for each panel, in one g call."""
    x, w = _gl(order)
    a = panels[:, 0]
    b = panels[:, 1]
    m = 0.5 * (a + b)

    def nodes(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        return 0.5 * (hi - lo)[:, None] * x[None, :] + 0.5 * (hi + lo)[:, None]

    grid = np.concatenate([nodes(a, b), nodes(a, m), nodes(m, b)], axis=1)
    vals = np.asarray(g(grid.ravel()), dtype=complex).reshape(grid.shape)
    half = 0.5 * (b - a)
    coarse = (vals[:, :order] @ w) * half
    fine = (vals[:, order : 2 * order] @ w + vals[:, 2 * order :] @ w) * (half / 2)
    return fine, np.abs(fine - coarse)


def _fsum_complex(pairs: Sequence[tuple[float, complex]]) -> complex:
    ordered = [v for _, v in sorted(pairs, key=lambda p: p[0])]
    return complex(math.fsum(v.real for v in ordered), math.fsum(v.imag for v in ordered))


def integrate_adaptive(
    g: Callable[[np.ndarray], np.ndarray],
    panels: Sequence[tuple[float, float]],
    spec: QuadratureSpec,
) -> tuple[complex, float]:
    """Integrate the vectorized integrand g over the given panels.

    Returns (value, error_estimate); raises NonConvergence if the
    subdivision budget runs out first.  Summation order is fixed by
    panel position, so results are deterministic for a given spec.
    """
    panels = [(a, b) for a, b in panels if b > a]
    if not panels:
        return 0.0 + 0.0j, 0.0
    arr = np.array(panels, dtype=float)
    vals, errs = _estimate(g, arr, spec.base_order)
    items = list(zip(arr[:, 0], arr[:, 1], vals, errs))

    scale = max(abs(b - a) for a, b in panels)
    for round_no in range(spec.max_subdivisions + 1):
        total = _fsum_complex([(a, v) for a, _, v, _ in items])
        err_total = math.fsum(e for *_, e in items)
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if err_total <= tol:
            return total, err_total
        if round_no == spec.max_subdivisions:
            raise NonConvergence(total, err_total)
        thresh = tol / (2.0 * len(items))
        keep, offender_panels = [], []
        for a, b, v, e in items:
            if e > thresh and (b - a) > _MIN_PANEL * scale:
                m = 0.5 * (a + b)
                offender_panels.append((a, m))
                offender_panels.append((m, b))
            else:
                keep.append((a, b, v, e))
        if not offender_panels:
            raise NonConvergence(total, err_total)
        arr = np.array(offender_panels, dtype=float)
        vals, errs = _estimate(g, arr, spec.base_order)
        items = keep + list(zip(arr[:, 0], arr[:, 1], vals, errs))
    raise NonConvergence(0.0, math.inf)  # pragma: no cover


def log_panels(
    support: IntervalSet,
    breakpoints: Iterable[float] = (),
    t_width_cap: float = math.inf,
) -> list[tuple[float, float, float]]:
    """Panelize a support set in log coordinates.

    Returns (sign, x0, x1) triples with t = sign * e^x.  Panels are cut
    at |breakpoint| images and, when t_width_cap is finite, subdivided
    so no panel spans more than that width in t (oscillation control).
    """
    out: list[tuple[float, float, float]] = []
    abs_breaks = sorted({abs(b) for b in breakpoints if b != 0.0})
    for lo, hi in support.split_at_zero().intervals:
        sign = 1.0 if hi > 0 else -1.0
        m0, m1 = sorted((abs(lo), abs(hi)))
        if m1 <= 0.0:
            continue
        if m0 == 0.0:
            m0 = m1 * _ZERO_FLOOR_RATIO
        cuts = [m0] + [b for b in abs_breaks if m0 < b < m1] + [m1]
        for c0, c1 in zip(cuts[:-1], cuts[1:]):
            if c1 <= c0:
                continue
            if math.isfinite(t_width_cap) and (c1 - c0) > t_width_cap:
                k = int(math.ceil((c1 - c0) / t_width_cap))
                edges = np.linspace(c0, c1, k + 1)
            else:
                edges = (c0, c1)
            for e0, e1 in zip(edges[:-1], edges[1:]):
                if e1 > e0:
                    out.append((sign, math.log(e0), math.log(e1)))
    return out


def integrate_log(
    ft: Callable[[np.ndarray], np.ndarray],
    support: IntervalSet,
    spec: QuadratureSpec,
    breakpoints: Iterable[float] = (),
    osc_freq: float = 0.0,
    t_width_cap: float = math.inf,
) -> tuple[complex, float]:
    """Compute the Haar integral of ft over the support set.

    ft is vectorized over signed t values; osc_freq is an upper bound on
    embedded oscillation frequency (cycles per unit t) and drives the
    half-period panel-width cap.
    """
    cap = t_width_cap
    if osc_freq > 0.0:
        # two oscillation periods per panel: far inside what the base
        # Gauss-Legendre order resolves, and the adaptive error estimate
        # still bisects any panel that disagrees with its halves
        cap = min(cap, 2.0 / osc_freq)
    panels = log_panels(support, breakpoints, cap)
    total = 0.0 + 0.0j
    err = 0.0
    sub_spec = QuadratureSpec(
        rel_tol=spec.rel_tol,
        abs_tol=spec.abs_tol / 2,
        max_subdivisions=spec.max_subdivisions,
        base_order=spec.base_order,
    )
    for sign in (1.0, -1.0):
        side = [(x0, x1) for s, x0, x1 in panels if s == sign]
        if not side:
            continue

        def g(x: np.ndarray, _sign: float = sign) -> np.ndarray:
            return ft(_sign * np.exp(x))

        v, e = integrate_adaptive(g, side, sub_spec)
        total += v
        err += e
    return total, err


def _axis_nodes(
    panels: Sequence[tuple[float, float, float]], order: int, level: int
) -> tuple[np.ndarray, np.ndarray]:
    """Signed t nodes and flat log-measure weights for one axis."""
    x, w = _gl(order)
    ts, ws = [], []
    for sign, x0, x1 in panels:
        edges = np.linspace(x0, x1, 2**level + 1)
        for e0, e1 in zip(edges[:-1], edges[1:]):
            half = 0.5 * (e1 - e0)
            xs = half * x + 0.5 * (e0 + e1)
            ts.append(sign * np.exp(xs))
            ws.append(half * w)
    if not ts:
        return np.empty(0), np.empty(0)
    return np.concatenate(ts), np.concatenate(ws)


def integrate_log_2d(
    f2: Callable[[np.ndarray, np.ndarray], np.ndarray],
    s_support: IntervalSet,
    t_support: IntervalSet,
    spec: QuadratureSpec,
    s_breakpoints: Iterable[float] = (),
    t_breakpoints: Iterable[float] = (),
    max_refine: int = 7,
) -> tuple[complex, float]:
    """Tensor-product log-coordinate quadrature of f2(s, t) d(s,t)/(|s||t|).

    f2 must be vectorized over same-shape arrays of signed s and t.
    Refinement is global (every panel split per round) with the usual
    coarse/fine error estimate.
    """
    sp = log_panels(s_support, s_breakpoints)
    tp = log_panels(t_support, t_breakpoints)
    if not sp or not tp:
        return 0.0 + 0.0j, 0.0

    def value_at(level: int) -> complex:
        s_nodes, s_w = _axis_nodes(sp, spec.base_order, level)
        t_nodes, t_w = _axis_nodes(tp, spec.base_order, level)
        S, T = np.meshgrid(s_nodes, t_nodes, indexing="ij")
        F = np.asarray(f2(S, T), dtype=complex)
        return complex(s_w @ F @ t_w)

    prev = value_at(0)
    for level in range(1, max_refine + 1):
        cur = value_at(level)
        err = abs(cur - prev)
        tol = max(spec.abs_tol, spec.rel_tol * abs(cur))
        if err <= tol:
            return cur, err
        prev = cur
    raise NonConvergence(prev, err)
