"""CSV serialization and figure rendering for run artifacts.

All files are written atomically (temp + rename) so partially written
outputs never appear under the final name.
"""

from __future__ import annotations

import os
import tempfile

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import ConvergenceReport
from .geometry import Domain, Interval


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_savefig(fig, path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".png")
    os.close(fd)
    try:
        fig.savefig(tmp, dpi=150, bbox_inches="tight")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)


def _g(x: float) -> str:
    return f"{x:.17g}"


def solution_csv_text(nodes: np.ndarray, values: np.ndarray) -> str:
    dim = nodes.shape[1]
    header = "index,x,value" if dim == 1 else "index,x,y,value"
    lines = [header]
    for i, (pt, v) in enumerate(zip(nodes, values)):
        coords = ",".join(_g(c) for c in pt)
        lines.append(f"{i},{coords},{_g(v)}")
    return "\n".join(lines) + "\n"


def report_csv_text(report: ConvergenceReport) -> str:
    lines = ["model,delta,h,linf,l2,h1,runtime_s"]
    for r in report.rows:
        lines.append(
            f"{report.mode.value},{_g(r.delta)},{_g(r.h)},{_g(r.linf)},"
            f"{_g(r.l2)},{_g(r.h1)},{r.runtime_s:.3f}"
        )
    lines.append(f"# case = {report.case_name}")
    lines.append(f"# p_linf = {_g(report.p_linf)} (R2 = {_g(report.r2_linf)})")
    lines.append(f"# p_l2 = {_g(report.p_l2)} (R2 = {_g(report.r2_l2)})")
    lines.append(f"# p_h1 = {_g(report.p_h1)} (R2 = {_g(report.r2_h1)})")
    return "\n".join(lines) + "\n"


def report_table_text(report: ConvergenceReport) -> str:
    head = f"{'delta':>10} {'h':>12} {'Linf':>12} {'L2':>12} {'H1':>12} {'time[s]':>9}"
    lines = [f"case {report.case_name}, model {report.mode.value}", head]
    for r in report.rows:
        lines.append(
            f"{r.delta:>10.5g} {r.h:>12.5g} {r.linf:>12.4e} {r.l2:>12.4e} "
            f"{r.h1:>12.4e} {r.runtime_s:>9.2f}"
        )
    lines.append(
        f"observed orders: Linf {report.p_linf:.3f} (R2 {report.r2_linf:.4f}), "
        f"L2 {report.p_l2:.3f} (R2 {report.r2_l2:.4f}), "
        f"H1 {report.p_h1:.3f} (R2 {report.r2_h1:.4f})"
    )
    return "\n".join(lines)


def render_solution_figure(path: str, nodes: np.ndarray, values: np.ndarray, domain: Domain) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    if isinstance(domain, Interval):
        ax.plot(nodes[:, 0], values, lw=1.2)
        ax.set_xlabel("x")
        ax.set_ylabel("u")
    else:
        sc = ax.scatter(nodes[:, 0], nodes[:, 1], c=values, s=4, cmap="viridis")
        fig.colorbar(sc, ax=ax, label="u")
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    ax.set_title("nonlocal solution")
    atomic_savefig(fig, path)


def render_convergence_figure(path: str, report: ConvergenceReport) -> None:
    deltas = np.array([r.delta for r in report.rows])
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for label, errs, order in (
        ("Linf", [r.linf for r in report.rows], report.p_linf),
        ("L2", [r.l2 for r in report.rows], report.p_l2),
        ("H1", [r.h1 for r in report.rows], report.p_h1),
    ):
        errs = np.asarray(errs)
        if not np.all(np.isfinite(errs)):
            continue
        ax.loglog(deltas, errs, "o-", label=f"{label} (order {order:.2f})")
    ref = deltas ** 1 * report.rows[0].linf / report.rows[0].delta
    ax.loglog(deltas, ref, "k--", lw=0.8, label="slope 1")
    ax.loglog(deltas, ref * deltas / deltas[0], "k:", lw=0.8, label="slope 2")
    ax.set_xlabel("horizon delta")
    ax.set_ylabel("error")
    ax.set_title(f"{report.case_name}, {report.mode.value}")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    atomic_savefig(fig, path)


def render_truncation_figure(path: str, distances: np.ndarray, ratios: np.ndarray, delta: float) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(distances, np.abs(ratios), ".", ms=2)
    ax.axvline(2.0 * delta, color="k", ls="--", lw=0.8, label="d = 2 delta")
    ax.set_xlabel("distance to boundary")
    ax.set_ylabel("|residual| / (delta * s + delta^2)")
    ax.set_title("truncation residual")
    ax.legend(fontsize=8)
    atomic_savefig(fig, path)
