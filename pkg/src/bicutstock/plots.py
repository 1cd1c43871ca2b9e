"""Figure rendering for the report outputs.

Writes PNG files next to the delimited output: one scatter/step chart per
instance showing each method's front (plus the union), and one step chart
per metric for the performance profiles.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .front import Front  # noqa: E402

_METHOD_STYLE = {
    "lec": dict(color="tab:blue", marker="o"),
    "fpa": dict(color="tab:orange", marker="s"),
    "awt": dict(color="tab:green", marker="^"),
    "union": dict(color="black", marker="x"),
}


def save_front_figure(fronts: Mapping[str, Front], path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name, front in fronts.items():
        if not front.points:
            continue
        xs = [p.f1 for p in front]
        ys = [p.f2 for p in front]
        style = _METHOD_STYLE.get(name, dict(marker="."))
        ax.step(xs, ys, where="post", alpha=0.4, color=style.get("color"))
        ax.scatter(xs, ys, label=f"{name} ({len(front)})", **style)
    ax.set_xlabel("total objects (f1)")
    ax.set_ylabel("total saw cycles (f2)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_profile_figure(curves: Mapping[str, Sequence[tuple[float, float]]],
                        path, metric_label: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name, points in curves.items():
        if not points:
            continue
        xs = [t for t, _ in points]
        ys = [r for _, r in points]
        style = _METHOD_STYLE.get(name, {})
        ax.step(xs, ys, where="post", label=name, color=style.get("color"))
    ax.set_xlabel("ratio to best method")
    ax.set_ylabel("share of instances")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(f"performance profile: {metric_label}")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
