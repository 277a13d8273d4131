"""Artifact writers: delimited trace data plus rendered figures.

CSV files hold full-precision floats (repr round-trip) and are byte-stable
across re-runs with the same seed; wall-clock timings stay out of them and
live in summary.json only.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .gp import DomainBounds
from .solver import OptimizationTrace

FIGURE_DPI = 150


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def trace_columns(trace: OptimizationTrace) -> list[str]:
    return (
        ["iteration"]
        + list(trace.variable_names)
        + list(trace.output_names)
        + ["norm_sq", "incumbent", "acquisition_max", "status"]
    )


def write_trace_csv(path, trace: OptimizationTrace) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(trace_columns(trace))
        for record in trace.records:
            outputs = [
                _fmt(record.outputs.get(name) if record.outputs else None)
                for name in trace.output_names
            ]
            writer.writerow(
                [record.index]
                + [_fmt(float(v)) for v in record.point]
                + outputs
                + [
                    _fmt(record.norm_sq),
                    _fmt(record.incumbent_value),
                    _fmt(record.acquisition_max),
                    "failed" if record.failed else "ok",
                ]
            )


def write_scatter_csv(path, trace: OptimizationTrace, bounds: DomainBounds) -> None:
    """Evaluated points mapped to the unit box, one row per evaluation."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration"] + [f"{n}_normalized" for n in trace.variable_names])
        for record in trace.records:
            unit = bounds.to_unit(record.point)
            writer.writerow([record.index] + [_fmt(float(v)) for v in unit])


def write_summary_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_comparison_csv(path, labels, series) -> None:
    """Best-norm-vs-evaluation-count table, one column per method."""
    length = max(len(s) for s in series)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["evaluation"] + list(labels))
        for i in range(length):
            row = [i + 1]
            for s in series:
                row.append(_fmt(float(s[i])) if i < len(s) else "")
            writer.writerow(row)


def render_convergence_figure(path, trace: OptimizationTrace,
                              norm_epsilon: float | None = None) -> None:
    evals = np.arange(1, trace.n_evaluations + 1)
    norms = np.array(
        [r.norm_sq if r.norm_sq is not None else np.nan for r in trace.records]
    )
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(evals, norms, ".", ms=4, alpha=0.6, label="evaluation")
    ax.semilogy(evals, trace.best_norm_series(), "-", lw=1.5, label="incumbent")
    if norm_epsilon is not None:
        ax.axhline(norm_epsilon, color="tab:red", ls="--", lw=1.0,
                   label="target tolerance")
    ax.set_xlabel("evaluation")
    ax.set_ylabel("residual norm$^2$")
    ax.set_title(f"Convergence ({trace.method})")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=FIGURE_DPI)
    plt.close(fig)


def render_acquisition_figure(path, trace: OptimizationTrace) -> bool:
    """Acquisition maximum per iteration; returns False if there is none."""
    pairs = [
        (r.index, r.acquisition_max)
        for r in trace.records
        if r.acquisition_max is not None
    ]
    if trace.last_acquisition_max is not None:
        pairs.append((trace.n_evaluations, trace.last_acquisition_max))
    if not pairs:
        return False
    xs, ys = zip(*pairs)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(xs, ys, "-o", ms=3, lw=1.2)
    ax.set_xlabel("evaluation")
    ax.set_ylabel("acquisition maximum")
    ax.set_title(f"Acquisition convergence ({trace.method})")
    fig.tight_layout()
    fig.savefig(path, dpi=FIGURE_DPI)
    plt.close(fig)
    return True


def render_scatter_figure(path, trace: OptimizationTrace,
                          bounds: DomainBounds) -> None:
    """Normalized design-space scatter of all evaluated points."""
    unit = np.array([bounds.to_unit(r.point) for r in trace.records])
    order = np.arange(len(unit))
    fig, ax = plt.subplots(figsize=(5.0, 4.4))
    if bounds.dim == 1:
        sc = ax.scatter(order + 1, unit[:, 0], c=order, cmap="viridis", s=14)
        ax.set_xlabel("evaluation")
        ax.set_ylabel(f"{trace.variable_names[0]} (normalized)")
        ax.set_ylim(-0.02, 1.02)
    else:
        sc = ax.scatter(unit[:, 0], unit[:, 1], c=order, cmap="viridis", s=14)
        ax.set_xlabel(f"{trace.variable_names[0]} (normalized)")
        ax.set_ylabel(f"{trace.variable_names[1]} (normalized)")
        ax.set_xlim(-0.02, 1.02)
        ax.set_ylim(-0.02, 1.02)
    fig.colorbar(sc, ax=ax, label="evaluation")
    ax.set_title(f"Explored points ({trace.method})")
    fig.tight_layout()
    fig.savefig(path, dpi=FIGURE_DPI)
    plt.close(fig)


def render_comparison_figure(path, labels, series,
                             norm_epsilon: float | None = None) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, values in zip(labels, series):
        ax.semilogy(np.arange(1, len(values) + 1), values, lw=1.5, label=label)
    if norm_epsilon is not None:
        ax.axhline(norm_epsilon, color="tab:red", ls="--", lw=1.0)
    ax.set_xlabel("evaluation")
    ax.set_ylabel("best residual norm$^2$")
    ax.set_title("Convergence comparison")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=FIGURE_DPI)
    plt.close(fig)


def render_curve_figure(path, curve, title: str = "Kinematic curves") -> None:
    fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.6), sharex=True)
    axes[0].plot(curve.travel, curve.toe, "-o", ms=3)
    axes[0].set_xlabel("travel (m)")
    axes[0].set_ylabel("toe (deg)")
    axes[1].plot(curve.travel, curve.camber, "-o", ms=3, color="tab:orange")
    axes[1].set_xlabel("travel (m)")
    axes[1].set_ylabel("camber (deg)")
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=FIGURE_DPI)
    plt.close(fig)
