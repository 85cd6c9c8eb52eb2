"""Output rendering: delimited trajectories, JSON summaries, and figures.

All writers are byte-deterministic for a fixed input: JSON is emitted with
sorted keys, CSV beliefs carry 12 significant digits, and figures are saved
with pinned PNG metadata so re-running a command reproduces identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .analysis import AnalysisReport
from .learning import Trajectory
from .scenarios import MonteCarloSummary
from .signals import HypothesisSpace

__all__ = [
    "json_text",
    "write_json",
    "write_trajectory_csv",
    "final_state_summary",
    "render_belief_figures",
    "render_condition_figure",
    "render_success_figure",
]

_PNG_METADATA = {"Software": "mvbeliefs"}


def json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_json(payload, path) -> Path:
    path = Path(path)
    path.write_text(json_text(payload), encoding="utf-8")
    return path


def write_trajectory_csv(trajectory: Trajectory, hyp: HypothesisSpace, path) -> Path:
    """Columns: t, agent, signal_type, state, belief (linear domain)."""
    path = Path(path)
    beliefs = trajectory.beliefs()
    _, n, p, m = beliefs.shape
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "agent", "signal_type", "state", "belief"])
        for r, t in enumerate(trajectory.times):
            for i in range(n):
                for l in range(p):
                    for j in range(m):
                        writer.writerow(
                            [
                                int(t),
                                i,
                                l,
                                hyp.labels[j],
                                format(beliefs[r, i, l, j], ".12g"),
                            ]
                        )
    return path


def final_state_summary(trajectory: Trajectory, hyp: HypothesisSpace) -> dict:
    """Per-(agent, type) final verdicts: argmax state, sustained-threshold
    flag, and the step at which the threshold was first reached."""
    final = trajectory.final
    beliefs = final.beliefs()
    choices = final.argmax()
    stats = trajectory.convergence
    results = []
    for i in range(final.n):
        for l in range(final.p):
            j = int(choices[i, l])
            entry = {
                "agent": i,
                "signal_type": l,
                "state_index": j,
                "state": hyp.labels[j],
                "belief": float(beliefs[i, l, j]),
            }
            if stats is not None:
                first = int(stats.first_crossed[i, l, j])
                entry["converged"] = bool(stats.sustained()[i, l, j])
                entry["first_reached"] = first if first >= 0 else None
            results.append(entry)
    summary = {
        "horizon": int(final.t),
        "agents": final.n,
        "signal_types": final.p,
        "true_index": trajectory.true_index,
        "true_state": hyp.labels[trajectory.true_index],
        "results": results,
    }
    if stats is not None:
        summary["convergence"] = {
            "threshold": stats.threshold,
            "window": stats.window,
        }
    return summary


def _save(fig, path: Path):
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)


def render_belief_figures(
    trajectory: Trajectory, hyp: HypothesisSpace, outdir, stem: str = "beliefs"
) -> list[Path]:
    """One figure per agent: belief evolution per signal type, true state
    highlighted. Returns the written paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    beliefs = trajectory.beliefs()
    _, n, p, m = beliefs.shape
    times = trajectory.times
    paths = []
    for i in range(n):
        fig, axes = plt.subplots(p, 1, figsize=(6.4, 2.6 * p), sharex=True, squeeze=False)
        for l in range(p):
            ax = axes[l, 0]
            for j in range(m):
                if j == trajectory.true_index:
                    continue
                ax.plot(times, beliefs[:, i, l, j], color="0.65", linewidth=0.8)
            ax.plot(
                times,
                beliefs[:, i, l, trajectory.true_index],
                color="crimson",
                linewidth=1.6,
                label=f"true state {hyp.labels[trajectory.true_index]}",
            )
            ax.set_ylabel(f"type {l} belief")
            ax.set_ylim(-0.02, 1.02)
            ax.legend(loc="center right", fontsize=8)
        axes[-1, 0].set_xlabel("t")
        fig.suptitle(f"agent {i}")
        fig.tight_layout()
        path = outdir / f"{stem}_agent{i}.png"
        _save(fig, path)
        plt.close(fig)
        paths.append(path)
    return paths


def render_condition_figure(report: AnalysisReport, hyp: HypothesisSpace, path) -> Path:
    """Bar chart of the per-state condition values with the zero line."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    m = report.condition_values.shape[0]
    colors = [
        "crimson" if j == report.true_index else ("steelblue" if v < 0 else "darkorange")
        for j, v in enumerate(report.condition_values)
    ]
    fig, ax = plt.subplots(figsize=(max(6.4, 0.25 * m), 3.6))
    ax.bar(np.arange(m), report.condition_values, color=colors)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("state index")
    ax.set_ylabel("condition value")
    ax.set_title(
        "negative for every alternative "
        + ("(learns true state)" if report.learns_true_state else "(mislearning possible)")
    )
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
    return path


def render_success_figure(summary: MonteCarloSummary, path) -> Path:
    """Bar chart of the three learners' success counts."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    counts = [
        summary.successes_combined,
        summary.successes_type1_only,
        summary.successes_type2_only,
    ]
    labels = ["combined", "type 1 only", "type 2 only"]
    fig, ax = plt.subplots(figsize=(4.8, 3.4))
    bars = ax.bar(labels, counts, color=["seagreen", "steelblue", "slategray"])
    for bar, count in zip(bars, counts):
        ax.text(
            bar.get_x() + bar.get_width() / 2,
            bar.get_height(),
            str(count),
            ha="center",
            va="bottom",
            fontsize=9,
        )
    ax.set_ylabel(f"successes out of {summary.trials}")
    ax.set_ylim(0, summary.trials * 1.08)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
    return path
