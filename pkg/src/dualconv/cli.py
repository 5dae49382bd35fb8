"""Command-line front end: seeded random families, check dispatch,
CSV/JSON report emission, exit codes.

Exit codes: 0 the check passed; 1 it failed (including any quadrature
that refused to converge); 2 the configuration was invalid.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from .coefficients import (
    check_fusion,
    check_intertwine_Pe,
    check_parity_vanishing,
    check_W_isometry,
)
from .convolution import check_associative, check_commutative, dc_kernel
from .derivation import check_derivation_identity
from .errors import ConfigError, InvalidExponent, NonConvergence
from .families import (
    generate_family,
    generate_tensors,
    sample_group_elements,
    sample_points,
)
from .functions import HaarFunction, parse_function
from .lp import CSV_HEADER, check_gamma_ratios, gamma_ratio_table, row_to_csv
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec
from .report import Report, combine_reports

VERBS = (
    "dc-commute",
    "dc-assoc",
    "fusion-check",
    "parity-check",
    "intertwine-check",
    "derivation-check",
    "w-isometry",
    "lp-table",
    "demo-divergence",
)

_DEFAULT_TOL = {
    "dc-commute": 1e-7,
    "dc-assoc": 1e-6,
    "fusion-check": 1e-6,
    "parity-check": 1e-12,
    "intertwine-check": 1e-7,
    "derivation-check": 1e-5,
    "w-isometry": 1e-8,
    "lp-table": 1e-9,
    "demo-divergence": 1e-9,
}

_DEFAULT_SAMPLES = {
    "dc-commute": 50,
    "dc-assoc": 50,
    "fusion-check": 25,
    "parity-check": 50,
    "intertwine-check": 30,
    "derivation-check": 1,
    "w-isometry": 1,
    "lp-table": 1,
    "demo-divergence": 1,
}

_DEFAULT_CASES = {
    "dc-commute": 10,
    "dc-assoc": 10,
    "fusion-check": 20,
    "parity-check": 10,
    "intertwine-check": 5,
    "derivation-check": 10,
    "w-isometry": 10,
    "lp-table": 1,
    "demo-divergence": 1,
}


@dataclass
class RunConfig:
    verb: str
    seed: int = 0
    tolerance: Optional[float] = None
    samples: Optional[int] = None
    cases: Optional[int] = None
    p: float = 4.0
    ns: tuple[int, ...] = (1, 2, 4, 8, 16)
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE
    function_specs: tuple[str, ...] = ()
    output_path: Optional[str] = None
    format: str = "json"
    plot: bool = False

    def __post_init__(self):
        if self.verb not in VERBS:
            raise ConfigError(f"unknown verb: {self.verb!r}")
        if self.tolerance is None:
            self.tolerance = _DEFAULT_TOL[self.verb]
        if self.samples is None:
            self.samples = _DEFAULT_SAMPLES[self.verb]
        if self.cases is None:
            self.cases = _DEFAULT_CASES[self.verb]
        if self.tolerance <= 0:
            raise ConfigError("tolerance must be positive")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.cases < 1:
            raise ConfigError("cases must be >= 1")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format: {self.format!r}")


def _worker_count(n_items: int) -> int:
    cap = os.environ.get("DUALCONV_THREADS")
    workers = os.cpu_count() or 1
    if cap is not None:
        try:
            workers = int(cap)
        except ValueError as exc:
            raise ConfigError(f"DUALCONV_THREADS must be an integer: {cap!r}") from exc
        if workers < 1:
            raise ConfigError("DUALCONV_THREADS must be >= 1")
    return max(1, min(workers, n_items))


def _run_cases(fns: Sequence[Callable[[], Report]]) -> list[Report]:
    workers = _worker_count(len(fns))
    if workers == 1:
        return [fn() for fn in fns]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda fn: fn(), fns))


def _case_functions(cfg: RunConfig, k: int, case: int) -> list[HaarFunction]:
    if cfg.function_specs:
        fns = [parse_function(s) for s in cfg.function_specs]
        if len(fns) < k:
            raise ConfigError(f"verb needs at least {k} --family entries")
        return fns[:k]
    return generate_family(cfg.seed + 7919 * case, k)


def _case_tensors(cfg: RunConfig, k: int, case: int, parity=None):
    return generate_tensors(
        cfg.seed + 7919 * case, k, quad=cfg.quadrature, parity=parity
    )


def _kernel_points(cfg: RunConfig, case: int, *tensors):
    K = dc_kernel(tensors[0], tensors[1], cfg.quadrature)
    for extra in tensors[2:]:
        K = dc_kernel(K, extra, cfg.quadrature)
    return sample_points(
        cfg.seed + 104729 + case, cfg.samples, K.s_support, K.t_support
    )


# -- verbs ------------------------------------------------------------


_CASE_PARITIES = ("+", "-", "two-sided")


def _run_commute(cfg: RunConfig) -> Report:
    def case(i: int) -> Report:
        T1, T2 = _case_tensors(cfg, 2, i, parity=_CASE_PARITIES[i % 3])
        pts = _kernel_points(cfg, i, T1, T2)
        return check_commutative(T1, T2, pts, cfg.tolerance, cfg.quadrature, cfg.seed)

    return combine_reports(
        _run_cases([lambda i=i: case(i) for i in range(cfg.cases)]), "dc-commute"
    )


def _run_assoc(cfg: RunConfig) -> Report:
    def case(i: int) -> Report:
        T1, T2, T3 = _case_tensors(cfg, 3, i, parity=_CASE_PARITIES[i % 3])
        pts = _kernel_points(cfg, i, T1, T2, T3)
        return check_associative(
            T1, T2, T3, pts, cfg.tolerance, cfg.quadrature, cfg.seed
        )

    return combine_reports(
        _run_cases([lambda i=i: case(i) for i in range(cfg.cases)]), "dc-assoc"
    )


def _run_fusion(cfg: RunConfig) -> Report:
    def case(i: int) -> Report:
        T1, T2 = _case_tensors(cfg, 2, i, parity="two-sided")
        xs = sample_group_elements(cfg.seed + 104729 + i, cfg.samples)
        return check_fusion(T1, T2, xs, cfg.tolerance, cfg.quadrature, cfg.seed)

    return combine_reports(
        _run_cases([lambda i=i: case(i) for i in range(cfg.cases)]), "fusion-check"
    )


def _run_parity(cfg: RunConfig) -> Report:
    def case(i: int) -> Report:
        parity = ("+", "-", "mixed")[i % 3]
        (T,) = _case_tensors(cfg, 1, i, parity=parity)
        term = T.terms[0]
        xs = sample_group_elements(cfg.seed + 104729 + i, cfg.samples)
        return check_parity_vanishing(
            term.left, term.right, xs, cfg.tolerance, cfg.quadrature, cfg.seed
        )

    return combine_reports(
        _run_cases([lambda i=i: case(i) for i in range(cfg.cases)]), "parity-check"
    )


def _run_intertwine(cfg: RunConfig) -> Report:
    def case(i: int) -> Report:
        (T,) = _case_tensors(cfg, 1, i)
        xs = sample_group_elements(cfg.seed + 104729 + i, cfg.samples)
        return check_intertwine_Pe(T, xs, cfg.tolerance, cfg.quadrature, cfg.seed)

    return combine_reports(
        _run_cases([lambda i=i: case(i) for i in range(cfg.cases)]),
        "intertwine-check",
    )


def _run_derivation(cfg: RunConfig) -> Report:
    triples = []
    for i in range(cfg.cases):
        T1, T2 = _case_tensors(cfg, 2, i, parity="two-sided")
        (T0,) = _case_tensors(cfg, 1, 100000 + i, parity="two-sided")
        triples.append((T1, T2, T0))
    return check_derivation_identity(
        triples, cfg.tolerance, cfg.quadrature, cfg.seed
    )


def _run_w_isometry(cfg: RunConfig) -> Report:
    def case(i: int) -> Report:
        f, g = _case_functions(cfg, 2, i)
        return check_W_isometry(f, g, cfg.quadrature, cfg.tolerance, cfg.seed)

    return combine_reports(
        _run_cases([lambda i=i: case(i) for i in range(cfg.cases)]), "w-isometry"
    )


def _run_lp_table(cfg: RunConfig) -> tuple[Report, str]:
    rows = gamma_ratio_table(cfg.p, cfg.ns, cfg.quadrature)
    report = check_gamma_ratios(cfg.p, cfg.ns, cfg.tolerance, cfg.quadrature, cfg.seed)
    table = CSV_HEADER + "\n" + "\n".join(row_to_csv(r) for r in rows) + "\n"
    return report, table


def demo_divergence(quad: QuadratureSpec = DEFAULT_QUADRATURE) -> str:
    """Growth of the squared norm of the pointwise square of
    xi(t) = (t-1)^(-1/3) on (1+eps, 10] as eps shrinks: the integral
    of (t-1)^(-4/3) dt/t behaves like 3 eps^(-1/3), so the compactly
    supported bounded class is genuinely needed.  Informational only."""
    import numpy as np

    from ._intervals import interval
    from .quadrature import integrate_log

    lines = ["eps,norm_sq,predicted_order"]
    for eps in (1e-2, 1e-4, 1e-6):
        sup = interval(1.0 + eps, 10.0)
        # geometric refinement toward the 1+eps edge keeps the adaptive
        # pass from chasing the near-singularity from a standing start
        edge = [1.0 + eps * (2.0**k) for k in range(0, 40) if eps * 2.0**k < 9.0]

        def integrand(t: np.ndarray) -> np.ndarray:
            return (t - 1.0) ** (-4.0 / 3.0)

        val, _ = integrate_log(integrand, sup, quad, breakpoints=edge)
        lines.append(f"{eps:.17g},{val.real:.17g},{3.0 * eps ** (-1.0 / 3.0):.17g}")
    return "\n".join(lines) + "\n"


# -- plumbing ---------------------------------------------------------


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path:
        Path(cfg.output_path).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _maybe_plot(cfg: RunConfig, report: Report, table: Optional[str] = None) -> None:
    if not cfg.plot:
        return
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(cfg.output_path) if cfg.output_path else Path(f"{cfg.verb}.out")
    png = out.with_suffix(".png")
    fig, ax = plt.subplots(figsize=(6, 4))
    if table:
        rows = [line.split(",") for line in table.strip().splitlines()[1:]]
        ns = [float(r[0]) for r in rows]
        ratios = [float(r[7]) for r in rows]
        closed = [float(r[8]) for r in rows]
        ax.plot(ns, ratios, "o", label="computed ratio")
        ax.plot(ns, closed, "-", label="closed form")
        ax.set_xlabel("n")
        ax.set_ylabel("ratio")
        ax.set_xscale("log", base=2)
    else:
        ax.bar(
            ["max", "mean", "tolerance"],
            [report.max_residual, report.mean_residual, report.tolerance],
        )
        ax.set_yscale("log")
        ax.set_ylabel("residual")
    ax.set_title(report.check_name)
    if table:
        ax.legend()
    fig.tight_layout()
    fig.savefig(png, dpi=120)
    plt.close(fig)


def _finalize(report: Report, elapsed_ms: int) -> Report:
    d = report.to_dict()
    return Report(
        check_name=d["check_name"],
        n_cases=d["n_cases"],
        n_samples=d["n_samples"],
        max_residual=d["max_residual"],
        mean_residual=d["mean_residual"],
        tolerance=d["tolerance"],
        passed=d["pass"],
        pole_distance_min=d["pole_distance_min"],
        wall_time_ms=elapsed_ms,
        seed=d["seed"],
    )


def _parse_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno} is not key=value: {line!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dualconv",
        description="Numerical verification suite for the dual-convolution "
        "algebra of trace-class kernels over the multiplicative group.",
    )
    p.add_argument("--verb", choices=VERBS, help="which check to run")
    p.add_argument("--config", help="flat key=value config file (flags override)")
    p.add_argument("--seed", type=int, help="base RNG seed (default 0)")
    p.add_argument("--samples", type=int, help="sample points per case")
    p.add_argument("--cases", type=int, help="number of seeded random cases")
    p.add_argument("--tol", type=float, help="pass/fail residual tolerance")
    p.add_argument("--p", type=float, help="Lp exponent (lp-table)")
    p.add_argument("--n", help="comma-separated n values (lp-table)")
    p.add_argument(
        "--family",
        action="append",
        help="function spec like ind:1,2 or hat:-3,-1*0.5 (repeatable)",
    )
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), help="report format")
    p.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
    p.add_argument("--abs-tol", type=float, help="quadrature absolute tolerance")
    p.add_argument("--max-subdiv", type=int, help="quadrature refinement budget")
    p.add_argument(
        "--plot",
        action="store_true",
        default=None,
        help="also render a figure next to the output file",
    )
    return p


def _config_from_args(argv: Optional[Sequence[str]]) -> RunConfig:
    args = _build_parser().parse_args(argv)
    raw: dict[str, str] = {}
    if args.config:
        raw = _parse_config_file(args.config)

    def pick(flag_val, key: str, cast):
        if flag_val is not None:
            return flag_val
        if key in raw:
            try:
                return cast(raw[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad config value for {key}: {raw[key]!r}") from exc
        return None

    verb = pick(args.verb, "verb", str)
    if verb is None:
        raise ConfigError("no verb given (use --verb or a config file)")

    def parse_ns(text: str) -> tuple[int, ...]:
        try:
            ns = tuple(int(x) for x in str(text).split(","))
        except ValueError as exc:
            raise ConfigError(f"bad n list: {text!r}") from exc
        if not ns or any(n < 1 for n in ns):
            raise ConfigError("n values must be positive integers")
        return ns

    def parse_bool(text: str) -> bool:
        if str(text).lower() in ("1", "true", "yes"):
            return True
        if str(text).lower() in ("0", "false", "no"):
            return False
        raise ConfigError(f"bad boolean: {text!r}")

    quad_kwargs = {}
    rel = pick(args.rel_tol, "rel-tol", float)
    ab = pick(args.abs_tol, "abs-tol", float)
    sub = pick(args.max_subdiv, "max-subdiv", int)
    if rel is not None:
        quad_kwargs["rel_tol"] = rel
    if ab is not None:
        quad_kwargs["abs_tol"] = ab
    if sub is not None:
        quad_kwargs["max_subdivisions"] = sub
    try:
        quad = QuadratureSpec(**quad_kwargs) if quad_kwargs else DEFAULT_QUADRATURE
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    fams = args.family
    if fams is None and "family" in raw:
        fams = [s.strip() for s in raw["family"].split("|") if s.strip()]

    return RunConfig(
        verb=verb,
        seed=pick(args.seed, "seed", int) or 0,
        tolerance=pick(args.tol, "tol", float),
        samples=pick(args.samples, "samples", int),
        cases=pick(args.cases, "cases", int),
        p=pick(args.p, "p", float) or 4.0,
        ns=parse_ns(pick(args.n, "n", str) or "1,2,4,8,16"),
        quadrature=quad,
        function_specs=tuple(fams or ()),
        output_path=pick(args.out, "out", str),
        format=pick(args.format, "format", str) or "json",
        plot=bool(pick(args.plot, "plot", parse_bool)),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = _config_from_args(argv)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2

    start = time.monotonic()
    table: Optional[str] = None
    try:
        if cfg.verb == "demo-divergence":
            _emit(cfg, demo_divergence(cfg.quadrature))
            return 0
        if cfg.verb == "lp-table":
            report, table = _run_lp_table(cfg)
        else:
            runner = {
                "dc-commute": _run_commute,
                "dc-assoc": _run_assoc,
                "fusion-check": _run_fusion,
                "parity-check": _run_parity,
                "intertwine-check": _run_intertwine,
                "derivation-check": _run_derivation,
                "w-isometry": _run_w_isometry,
            }[cfg.verb]
            report = runner(cfg)
    except (ConfigError, InvalidExponent) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except NonConvergence as exc:
        sys.stderr.write(
            f"quadrature failed to converge (estimate {exc.estimate}, "
            f"error {exc.error_estimate})\n"
        )
        return 1

    report = _finalize(report, int(round(1000 * (time.monotonic() - start))))
    if cfg.verb == "lp-table" and cfg.format == "csv" and table is not None:
        _emit(cfg, table)
    elif cfg.format == "csv":
        _emit(cfg, report.to_csv())
    else:
        _emit(cfg, report.to_json())
    _maybe_plot(cfg, report, table if cfg.verb == "lp-table" else None)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
