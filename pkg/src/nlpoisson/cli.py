"""Configuration-driven command line: solve, converge, and diagnose runs.

Configs are plain sectioned key = value files (INI syntax).  Every run
writes a ``manifest.cfg`` echoing the fully resolved configuration, so a
run can be reproduced with ``--config <out>/manifest.cfg``.

Exit codes: 0 success, 2 config error, 3 solver non-convergence,
4 asserted order band violated, 5 maximum-principle audit failure.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import analysis, report
from .cases import CATALOG, ManufacturedCase, get_case
from .geometry import Disk, Domain, Interval, build_quadrature
from .kernels import PROFILES
from .model import NonlocalProblem, PenaltyMode, PointSources, energy
from .solver import (
    NonConvergenceError,
    ResolutionError,
    assemble_system,
    default_resolution,
    residual_norm,
    solve_cg,
    solve_jacobi,
)

OUT_ENV_VAR = "NLPOISSON_OUT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3
EXIT_ORDER_BAND = 4
EXIT_AUDIT = 5

ORDER_BANDS = {
    PenaltyMode.FIRST_ORDER: (0.85, 1.3),
    PenaltyMode.SECOND_ORDER_GRADED: (1.7, 2.3),
}
MIN_R2 = 0.98
MIN_H1_ORDER = 0.4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Fully resolved run configuration."""

    shape: str = "interval"
    a: float = 0.0
    b: float = 1.0
    center_x: float = 0.0
    center_y: float = 0.0
    radius: float = 1.0
    profile: str = "poly2"
    variant: PenaltyMode = PenaltyMode.FIRST_ORDER
    deltas: list[float] = field(default_factory=lambda: [0.1])
    case: str | None = "sin"
    point_sources: list[tuple[list[float], float]] | None = None
    resolution_policy: str = "auto"
    h: float | None = None
    method: str = "auto"
    tol: float = 1e-10
    max_iters: int = 200_000
    out_dir: str = "out"
    seed: int = 0
    assert_orders: bool = False
    trials: int = 100
    threads: int = 1

    def domain(self) -> Domain:
        if self.shape == "interval":
            return Interval(self.a, self.b)
        return Disk((self.center_x, self.center_y), self.radius)

    def manufactured_case(self) -> ManufacturedCase | None:
        return get_case(self.case) if self.case is not None else None


def _getfloat(cp, section, key, default):
    try:
        return cp.getfloat(section, key, fallback=default)
    except ValueError as exc:
        raise ConfigError(f"invalid value for [{section}] {key}: {exc}") from None


def _parse_point_sources(text: str):
    sources = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            loc_part, charge_part = chunk.rsplit(":", 1)
            loc = [float(v) for v in loc_part.split(",")]
            sources.append((loc, float(charge_part)))
        except ValueError:
            raise ConfigError(
                f"invalid value for [model] point_sources entry {chunk!r}: "
                "expected 'x[,y]:charge'"
            ) from None
    if not sources:
        raise ConfigError("invalid value for [model] point_sources: empty list")
    return sources


def load_config(path: str) -> RunConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    cfg = RunConfig()

    cfg.shape = cp.get("domain", "shape", fallback=cfg.shape).lower()
    if cfg.shape not in ("interval", "disk"):
        raise ConfigError(f"invalid value for [domain] shape: {cfg.shape!r}")
    cfg.a = _getfloat(cp, "domain", "a", cfg.a)
    cfg.b = _getfloat(cp, "domain", "b", cfg.b)
    cfg.center_x = _getfloat(cp, "domain", "center_x", cfg.center_x)
    cfg.center_y = _getfloat(cp, "domain", "center_y", cfg.center_y)
    cfg.radius = _getfloat(cp, "domain", "radius", cfg.radius)
    if cfg.shape == "interval" and cfg.a >= cfg.b:
        raise ConfigError(f"invalid values for [domain] a/b: need a < b, got {cfg.a}, {cfg.b}")
    if cfg.shape == "disk" and cfg.radius <= 0:
        raise ConfigError(f"invalid value for [domain] radius: {cfg.radius}")

    cfg.profile = cp.get("kernel", "profile", fallback=cfg.profile)
    if cfg.profile not in PROFILES:
        raise ConfigError(f"invalid value for [kernel] profile: {cfg.profile!r}")

    variant = cp.get("model", "variant", fallback=cfg.variant.value)
    try:
        cfg.variant = PenaltyMode(variant)
    except ValueError:
        raise ConfigError(f"invalid value for [model] variant: {variant!r}") from None

    if cp.has_option("model", "deltas"):
        raw = cp.get("model", "deltas").replace(",", " ").split()
        try:
            cfg.deltas = [float(v) for v in raw]
        except ValueError:
            raise ConfigError(f"invalid value for [model] deltas: {raw}") from None
    elif cp.has_option("model", "delta"):
        cfg.deltas = [_getfloat(cp, "model", "delta", 0.1)]
    if any(d <= 0 for d in cfg.deltas):
        raise ConfigError(f"invalid value for [model] delta: must be positive, got {cfg.deltas}")

    if cp.has_option("model", "point_sources"):
        cfg.point_sources = _parse_point_sources(cp.get("model", "point_sources"))
        cfg.case = None
    else:
        cfg.case = cp.get("model", "case", fallback=cfg.case)
        if cfg.case not in CATALOG:
            raise ConfigError(f"invalid value for [model] case: {cfg.case!r}")
        dim = 1 if cfg.shape == "interval" else 2
        if CATALOG[cfg.case].dim != dim:
            raise ConfigError(
                f"invalid value for [model] case: {cfg.case!r} is "
                f"{CATALOG[cfg.case].dim}D but the domain is {dim}D"
            )

    cfg.resolution_policy = cp.get("resolution", "policy", fallback=cfg.resolution_policy)
    if cfg.resolution_policy not in ("auto", "explicit"):
        raise ConfigError(
            f"invalid value for [resolution] policy: {cfg.resolution_policy!r}"
        )
    if cp.has_option("resolution", "h"):
        cfg.h = _getfloat(cp, "resolution", "h", None)
        cfg.resolution_policy = "explicit"
    elif cfg.resolution_policy == "explicit":
        raise ConfigError("[resolution] policy = explicit requires an h value")

    cfg.method = cp.get("solver", "method", fallback=cfg.method)
    if cfg.method not in ("auto", "cg", "jacobi"):
        raise ConfigError(f"invalid value for [solver] method: {cfg.method!r}")
    cfg.tol = _getfloat(cp, "solver", "tol", cfg.tol)
    if cfg.tol <= 0:
        raise ConfigError(f"invalid value for [solver] tol: {cfg.tol}")
    try:
        cfg.max_iters = cp.getint("solver", "max_iters", fallback=cfg.max_iters)
    except ValueError as exc:
        raise ConfigError(f"invalid value for [solver] max_iters: {exc}") from None

    cfg.out_dir = cp.get("output", "directory", fallback=cfg.out_dir)
    try:
        cfg.seed = cp.getint("output", "seed", fallback=cfg.seed)
        cfg.assert_orders = cp.getboolean("output", "assert_orders", fallback=cfg.assert_orders)
        cfg.trials = cp.getint("diagnose", "trials", fallback=cfg.trials)
    except ValueError as exc:
        raise ConfigError(f"invalid value in config: {exc}") from None
    return cfg


def resolved_h(cfg: RunConfig, problem: NonlocalProblem) -> float:
    if cfg.resolution_policy == "auto":
        return default_resolution(problem)
    return cfg.h


def build_problem(cfg: RunConfig, delta: float) -> NonlocalProblem:
    domain = cfg.domain()
    if cfg.point_sources is not None:
        locs = np.array([loc for loc, _ in cfg.point_sources])
        charges = np.array([c for _, c in cfg.point_sources])
        if locs.shape[1] != domain.dim:
            raise ConfigError(
                f"invalid value for [model] point_sources: locations are "
                f"{locs.shape[1]}D but the domain is {domain.dim}D"
            )
        rhs = PointSources(locs, charges)
        boundary_data = lambda pts: np.zeros(pts.shape[0])
    else:
        case = cfg.manufactured_case()
        rhs = case.rhs()
        boundary_data = case.boundary_data
    try:
        return NonlocalProblem(
            domain=domain,
            delta=delta,
            mode=cfg.variant,
            rhs=rhs,
            boundary_data=boundary_data,
            profile=PROFILES[cfg.profile],
        )
    except ValueError as exc:
        raise ConfigError(f"invalid value for [model] delta: {exc}") from None


def write_manifest(cfg: RunConfig, out_dir: str, command: str) -> None:
    cp = configparser.ConfigParser()
    cp["run"] = {"command": command}
    cp["domain"] = {"shape": cfg.shape}
    if cfg.shape == "interval":
        cp["domain"].update({"a": repr(cfg.a), "b": repr(cfg.b)})
    else:
        cp["domain"].update(
            {
                "center_x": repr(cfg.center_x),
                "center_y": repr(cfg.center_y),
                "radius": repr(cfg.radius),
            }
        )
    cp["kernel"] = {"profile": cfg.profile}
    cp["model"] = {"variant": cfg.variant.value}
    if len(cfg.deltas) == 1:
        cp["model"]["delta"] = repr(cfg.deltas[0])
    else:
        cp["model"]["deltas"] = " ".join(repr(d) for d in cfg.deltas)
    if cfg.point_sources is not None:
        cp["model"]["point_sources"] = "; ".join(
            ",".join(repr(c) for c in loc) + ":" + repr(charge)
            for loc, charge in cfg.point_sources
        )
    else:
        cp["model"]["case"] = cfg.case
    cp["resolution"] = {"policy": cfg.resolution_policy}
    if cfg.h is not None:
        cp["resolution"]["h"] = repr(cfg.h)
    cp["solver"] = {
        "method": cfg.method,
        "tol": repr(cfg.tol),
        "max_iters": str(cfg.max_iters),
    }
    cp["output"] = {
        "directory": out_dir,
        "seed": str(cfg.seed),
        "assert_orders": str(cfg.assert_orders).lower(),
    }
    cp["diagnose"] = {"trials": str(cfg.trials)}
    import io

    buf = io.StringIO()
    cp.write(buf)
    report.atomic_write(os.path.join(out_dir, "manifest.cfg"), buf.getvalue())


def _solve_one(cfg: RunConfig, problem: NonlocalProblem, quad, system):
    method = cfg.method
    if method == "auto":
        method = "cg" if cfg.variant.is_symmetric else "jacobi"
    if method == "cg" and not cfg.variant.is_symmetric:
        raise ConfigError(
            "invalid value for [solver] method: cg requires a symmetric variant"
        )
    if method == "cg":
        return solve_cg(system, tol=cfg.tol)
    return solve_jacobi(problem, quad, tol=cfg.tol, max_iters=cfg.max_iters, system=system)


def cmd_solve(cfg: RunConfig, out_dir: str) -> int:
    if len(cfg.deltas) != 1:
        raise ConfigError("invalid value for [model] delta: solve needs a single delta")
    problem = build_problem(cfg, cfg.deltas[0])
    h = resolved_h(cfg, problem)
    quad = build_quadrature(problem.domain, h)
    try:
        system = assemble_system(problem, quad)
    except ResolutionError as exc:
        raise ConfigError(f"invalid value for [resolution] h: {exc}") from None
    try:
        sol = _solve_one(cfg, problem, quad, system)
    except NonConvergenceError as exc:
        print(f"solver stage failed: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE

    report.atomic_write(
        os.path.join(out_dir, "solution.csv"),
        report.solution_csv_text(quad.interior_nodes, sol.values),
    )
    lines = ["quantity,value"]
    lines.append(f"residual,{residual_norm(system, sol.values):.17g}")
    lines.append(f"iterations,{sol.iterations}")
    lines.append(f"method,{sol.method}")
    if cfg.variant.is_symmetric:
        lines.append(f"energy,{energy(problem, quad, sol.values):.17g}")
    if cfg.case is not None:
        linf, l2, h1 = analysis.error_norms(
            sol.values, cfg.manufactured_case(), quad, problem.domain
        )
        lines.append(f"error_linf,{linf:.17g}")
        lines.append(f"error_l2,{l2:.17g}")
        lines.append(f"error_h1,{h1:.17g}")
    report.atomic_write(os.path.join(out_dir, "summary.csv"), "\n".join(lines) + "\n")
    report.render_solution_figure(
        os.path.join(out_dir, "solution.png"), quad.interior_nodes, sol.values, problem.domain
    )
    write_manifest(cfg, out_dir, "solve")
    return EXIT_OK


def cmd_converge(cfg: RunConfig, out_dir: str) -> int:
    if len(cfg.deltas) < 4:
        raise ConfigError(
            "invalid value for [model] deltas: converge needs >= 4 halving entries"
        )
    for a, b in zip(cfg.deltas, cfg.deltas[1:]):
        if not (0.4 * a <= b <= 0.6 * a):
            raise ConfigError(
                f"invalid value for [model] deltas: {b} does not halve {a}"
            )
    if cfg.assert_orders and not cfg.variant.is_symmetric:
        raise ConfigError(
            "invalid value for [output] assert_orders: order assertion is "
            "unsupported for the Robin baseline (no proven practical band)"
        )
    if cfg.case is None:
        raise ConfigError("converge requires a manufactured case with an exact solution")
    case = cfg.manufactured_case()
    h_rule = None if cfg.resolution_policy == "auto" else (lambda d: cfg.h)
    try:
        rep = analysis.convergence_study(
            case, cfg.variant, cfg.deltas, cfg.domain(), tol=cfg.tol, h_for_delta=h_rule
        )
    except ResolutionError as exc:
        raise ConfigError(f"invalid value for [resolution] h: {exc}") from None
    except NonConvergenceError as exc:
        print(f"solver stage failed: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE

    report.atomic_write(os.path.join(out_dir, "report.csv"), report.report_csv_text(rep))
    report.render_convergence_figure(os.path.join(out_dir, "convergence.png"), rep)
    write_manifest(cfg, out_dir, "converge")
    print(report.report_table_text(rep))

    if cfg.assert_orders:
        lo, hi = ORDER_BANDS[cfg.variant]
        failures = []
        if not lo <= rep.p_linf <= hi:
            failures.append(f"p_linf = {rep.p_linf:.3f} outside [{lo}, {hi}]")
        if rep.r2_linf < MIN_R2:
            failures.append(f"R2_linf = {rep.r2_linf:.4f} < {MIN_R2}")
        if cfg.variant is PenaltyMode.FIRST_ORDER and np.isfinite(rep.p_h1):
            if rep.p_h1 < MIN_H1_ORDER:
                failures.append(f"p_h1 = {rep.p_h1:.3f} < {MIN_H1_ORDER}")
        if failures:
            print("order assertion failed: " + "; ".join(failures), file=sys.stderr)
            return EXIT_ORDER_BAND
    return EXIT_OK


def cmd_diagnose(cfg: RunConfig, out_dir: str) -> int:
    if len(cfg.deltas) != 1:
        raise ConfigError("invalid value for [model] delta: diagnose needs a single delta")
    if not cfg.variant.is_symmetric:
        raise ConfigError(
            "invalid value for [model] variant: diagnostics require a symmetric variant"
        )
    problem = build_problem(cfg, cfg.deltas[0])
    delta = problem.delta
    h = resolved_h(cfg, problem)
    quad = build_quadrature(problem.domain, h)

    d, wbar, s = analysis.kernel_estimates(problem.kernel, quad, problem.domain)
    lines = ["d,interior_rbar,boundary_rbar,boundary_rbar_times_delta"]
    for di, wi, si in zip(d, wbar, s):
        lines.append(f"{di:.17g},{wi:.17g},{si:.17g},{si * delta:.17g}")
    report.atomic_write(os.path.join(out_dir, "kernel_estimates.csv"), "\n".join(lines) + "\n")

    case = cfg.manufactured_case()
    if case is not None and case.f is not None:
        resid = analysis.truncation_residual_profile(case, problem.domain, problem.kernel, quad)
        ratios = np.abs(resid) / (delta * s + delta**2)
        lines = ["d,residual,ratio"]
        for di, ri, qi in zip(d, resid, ratios):
            lines.append(f"{di:.17g},{ri:.17g},{qi:.17g}")
        report.atomic_write(os.path.join(out_dir, "truncation.csv"), "\n".join(lines) + "\n")
        report.render_truncation_figure(
            os.path.join(out_dir, "truncation.png"), d, ratios, delta
        )

    try:
        audit = analysis.max_principle_audit(
            problem, quad, trials=cfg.trials, seed=cfg.seed
        )
    except NonConvergenceError as exc:
        print(f"solver stage failed during audit (seed {cfg.seed}): {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    lines = ["trial,min,max"]
    for t in audit.trials:
        lines.append(f"{t.trial},{t.min_value:.17g},{t.max_value:.17g}")
    lines.append(f"# seed = {audit.seed}")
    lines.append(f"# passed = {str(audit.passed).lower()}")
    report.atomic_write(os.path.join(out_dir, "audit.csv"), "\n".join(lines) + "\n")
    write_manifest(cfg, out_dir, "diagnose")
    if not audit.passed:
        print(
            f"maximum-principle audit FAILED; replay with seed = {audit.seed}",
            file=sys.stderr,
        )
        return EXIT_AUDIT
    print(f"diagnostics written to {out_dir} (audit passed, seed {audit.seed})")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlpoisson",
        description="Nonlocal Poisson solver with boundary-penalty Dirichlet conditions",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("solve", "solve one instance and write the solution"),
        ("converge", "run a horizon sweep and fit observed orders"),
        ("diagnose", "kernel estimates, truncation residuals, and audits"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="path to the run config")
        p.add_argument("--out", help="output directory (overrides config and env)")
        p.add_argument("--seed", type=int, help="seed override for random audits")
        p.add_argument("--threads", type=int, default=1, help="worker threads (advisory)")
        if name == "converge":
            p.add_argument(
                "--assert-orders",
                action="store_true",
                help="exit 4 unless fitted orders sit in the documented bands",
            )
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if getattr(args, "assert_orders", False):
            cfg.assert_orders = True
        cfg.threads = args.threads
        out_dir = args.out or os.environ.get(OUT_ENV_VAR) or cfg.out_dir
        cfg.out_dir = out_dir
        os.makedirs(out_dir, exist_ok=True)
        if args.command == "solve":
            return cmd_solve(cfg, out_dir)
        if args.command == "converge":
            return cmd_converge(cfg, out_dir)
        return cmd_diagnose(cfg, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
