"""L^p experiments on the multiplicative group.

The scale family gamma_n = 1_[e^-n, e^n] has ||gamma_n||_p^p = 2n for
every p, which makes the norm-ratio
    ||xi||_2 ||eta||_2 / (||xi||_p ||eta||_q)
collapse to a pure power of n (all powers of 2 cancel against the
conjugate exponent).  The table below recomputes every norm by
quadrature and pins the ratio against that closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .convolution import dc_kernel
from .errors import InvalidExponent, NonConvergence
from .functions import HaarFunction, indicator, lp_norm
from .kernels import finite_rank, RankOneTensor
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec
from .report import Report, make_report


def gamma_function(n: int) -> HaarFunction:
    """1_[e^-n, e^n]; its p-norm to the p-th power is 2n for every p."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return indicator(math.exp(-n), math.exp(n))


def conjugate_exponent(p: float) -> float:
    return p / (p - 1.0)


@dataclass(frozen=True)
class LpExperimentRow:
    n: int
    p: float
    q: float
    norm_p_xi: float
    norm_q_eta: float
    norm_2_xi: float
    norm_2_eta: float
    ratio: float
    closed_form: float
    residual: float


CSV_HEADER = "n,p,q,norm_p_xi,norm_q_eta,norm_2_xi,norm_2_eta,ratio,closed_form,residual"


def row_to_csv(row: LpExperimentRow) -> str:
    cells = [
        str(row.n),
        *(f"{v:.17g}" for v in (
            row.p, row.q, row.norm_p_xi, row.norm_q_eta,
            row.norm_2_xi, row.norm_2_eta, row.ratio,
            row.closed_form, row.residual,
        )),
    ]
    return ",".join(cells)


def gamma_ratio_table(
    p: float,
    ns: Sequence[int],
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> list[LpExperimentRow]:
    """Norm-ratio rows for the scale family at exponent p.

    For p < 2 the wide function sits in the p-slot (xi = gamma_n,
    eta = gamma_1, ratio -> n^(1/2 - 1/p)); for p > 2 it sits in the
    q-slot (xi = gamma_1, eta = gamma_n, ratio -> n^(1/2 - 1/q)).
    """
    if not (1.0 < p < math.inf) or p == 2.0:
        raise InvalidExponent("p must lie in (1, infinity) and differ from 2")
    q = conjugate_exponent(p)
    rows = []
    for n in ns:
        if p < 2.0:
            xi, eta = gamma_function(n), gamma_function(1)
            closed = float(n) ** (0.5 - 1.0 / p)
        else:
            xi, eta = gamma_function(1), gamma_function(n)
            closed = float(n) ** (0.5 - 1.0 / q)
        np_xi = lp_norm(xi, p, quad)
        nq_eta = lp_norm(eta, q, quad)
        n2_xi = lp_norm(xi, 2.0, quad)
        n2_eta = lp_norm(eta, 2.0, quad)
        ratio = (n2_xi * n2_eta) / (np_xi * nq_eta)
        rows.append(
            LpExperimentRow(
                n=n, p=p, q=q,
                norm_p_xi=np_xi, norm_q_eta=nq_eta,
                norm_2_xi=n2_xi, norm_2_eta=n2_eta,
                ratio=ratio, closed_form=closed,
                residual=abs(ratio - closed),
            )
        )
    return rows


def check_gamma_ratios(
    p: float,
    ns: Sequence[int],
    tol: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
) -> Report:
    rows = gamma_ratio_table(p, ns, quad)
    residuals = [r.residual for r in rows]
    # the p-norm identity ||gamma_n||_p^p = 2n is part of the same pin
    for r in rows:
        n_wide = r.n
        if p < 2.0:
            residuals.append(abs(r.norm_p_xi**p - 2.0 * n_wide))
        else:
            residuals.append(abs(r.norm_q_eta**r.q - 2.0 * n_wide))
    return make_report("lp-table", residuals, tol, n_cases=len(rows), seed=seed)


def vp_isometry_check(
    f: HaarFunction,
    g: HaarFunction,
    p: float,
    tol: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
) -> Report:
    """The p-power version of the direct-integral isometry:
    int ||lambda(1+h) f . lambda(1+1/h) g||_p^p dh/|h| = ||f||_p^p ||g||_p^p."""
    from .coefficients import lambda_isometry_integral

    if not (1.0 <= p < math.inf):
        raise InvalidExponent("p must lie in [1, infinity)")
    lhs = lambda_isometry_integral(f, g, quad, p=p)
    rhs = (lp_norm(f, p, quad) * lp_norm(g, p, quad)) ** p
    scale = max(rhs, 1e-30)
    return make_report("vp-isometry", [abs(lhs - rhs) / scale], tol, seed=seed)


def dc_bilinear_smoke(
    tol: float = 1e-6,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    seed: Optional[int] = None,
) -> Report:
    """Smoke check in bilinear pairing mode: the coefficient of a lazy
    product of two scale-family tensors factors into the product of the
    individual coefficients."""
    from .coefficients import GroupElement, coeff_eval

    xi = gamma_function(1)
    eta = indicator(0.5, 2.0)
    t1 = RankOneTensor(xi, eta, "bilinear")
    t2 = RankOneTensor(indicator(1.0, 3.0), indicator(0.25, 1.0), "bilinear")
    K = dc_kernel(
        finite_rank([t1], quad), finite_rank([t2], quad), quad.tightened()
    )
    residuals = []
    failed = False
    for x in (GroupElement(0.0, 1.0), GroupElement(0.5, 2.0), GroupElement(-1.0, 0.5)):
        try:
            lhs = coeff_eval(t1, x, quad) * coeff_eval(t2, x, quad)
            rhs = coeff_eval(K, x, quad)
        except NonConvergence:
            failed = True
            residuals.append(math.inf)
            continue
        residuals.append(abs(lhs - rhs))
    return make_report(
        "dc-bilinear-smoke", residuals, tol, seed=seed, failed_reason=failed
    )
