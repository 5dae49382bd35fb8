"""Seeded random families of test functions, tensors, and sample points.

All draws go through numpy's Generator seeded explicitly, so any check
is reproducible from its seed alone.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .errors import ConfigError
from .functions import HaarFunction, hat, indicator
from .kernels import FiniteRankKernel, RankOneTensor, finite_rank
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec


def _draw_function(rng: np.random.Generator) -> HaarFunction:
    kind = rng.choice(["indicator", "hat"])
    lo, hi = np.exp(np.sort(rng.uniform(math.log(0.25), math.log(8.0), size=2)))
    while hi - lo < 1e-3:  # avoid near-degenerate supports
        lo, hi = np.exp(np.sort(rng.uniform(math.log(0.25), math.log(8.0), size=2)))
    sign = 1.0 if rng.uniform() < 0.5 else -1.0
    a, b = sign * lo, sign * hi
    amp = rng.uniform(0.5, 2.0)
    return indicator(a, b, amp) if kind == "indicator" else hat(a, b, amp)


def generate_family(seed: int, k: int) -> list[HaarFunction]:
    """k seeded random compactly supported functions (indicator or hat
    shaped, log-uniform endpoints in [1/4, 8] on a uniformly chosen
    half-line, amplitude in [1/2, 2])."""
    if k < 1:
        raise ConfigError("family size must be a positive integer")
    rng = np.random.default_rng(seed)
    return [_draw_function(rng) for _ in range(k)]


def generate_tensors(
    seed: int,
    k: int,
    mode: str = "hilbert",
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    parity: Optional[str] = None,
) -> list[FiniteRankKernel]:
    """k seeded rank-one kernels; parity="+"/"-" pins both legs to one
    half-line, "mixed" puts the left leg on the positive and the right
    leg on the negative half-line ("mixed-" the reverse), "two-sided"
    glues an independent draw onto each half-line of both legs."""
    if k < 1:
        raise ConfigError("family size must be a positive integer")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(k):
        left = _draw_leg(rng, parity)
        right = _draw_leg(rng, parity, right_leg=True)
        out.append(finite_rank([RankOneTensor(left, right, mode)], quad))
    return out


def _draw_leg(
    rng: np.random.Generator, parity: Optional[str], right_leg: bool = False
) -> HaarFunction:
    from .functions import glue_sides

    f = _draw_function(rng)
    if parity is None:
        return f
    if parity == "two-sided":
        g = _draw_function(rng)
        return glue_sides(_force_side(f, False), _force_side(g, True))
    if parity in ("+", "-"):
        return _force_side(f, parity == "-")
    if parity == "mixed":
        return _force_side(f, right_leg)
    if parity == "mixed-":
        return _force_side(f, not right_leg)
    raise ConfigError(f"unknown parity option: {parity!r}")


def _force_side(f: HaarFunction, negative: bool) -> HaarFunction:
    from .functions import reflect

    on_neg = f.support_neg is not None
    return reflect(f) if on_neg != negative else f


def sample_points(
    seed: int,
    n: int,
    s_set,
    t_set,
) -> list[tuple[float, float]]:
    """n (s, t) points drawn log-uniformly inside the given support sets
    (uniform over components weighted by log-measure)."""
    rng = np.random.default_rng(seed)

    def draw(iset) -> float:
        ivs = iset.split_at_zero().intervals
        widths = []
        for lo, hi in ivs:
            m0 = max(min(abs(lo), abs(hi)), 1e-3 * max(abs(lo), abs(hi)))
            widths.append(math.log(max(abs(lo), abs(hi))) - math.log(m0))
        total = sum(widths)
        r = rng.uniform(0.0, total)
        for (lo, hi), w in zip(ivs, widths):
            if r <= w or (lo, hi) == ivs[-1]:
                sign = 1.0 if hi > 0 else -1.0
                m0 = max(min(abs(lo), abs(hi)), 1e-3 * max(abs(lo), abs(hi)))
                x = math.log(m0) + r
                return sign * math.exp(min(x, math.log(max(abs(lo), abs(hi)))))
            r -= w
        raise AssertionError("unreachable")

    return [(draw(s_set), draw(t_set)) for _ in range(n)]


def sample_group_elements(
    seed: int,
    n: int,
    b_max: float = 10.0,
    a_min: float = 0.25,
    a_max: float = 4.0,
) -> list:
    """n seeded group elements with |b| <= b_max and |a| log-uniform in
    [a_min, a_max], both signs of a equally likely."""
    from .coefficients import GroupElement

    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        b = rng.uniform(-b_max, b_max)
        a = math.exp(rng.uniform(math.log(a_min), math.log(a_max)))
        if rng.uniform() < 0.5:
            a = -a
        out.append(GroupElement(b, a))
    return out
