"""Matplotlib rendering of detection results to SVG files.

Two figures accompany the delimited outputs when plotting is enabled:

* the t-plane paving, with possible boxes colored by their detection's
  verdict (green proven, black inconclusive, orange partial) over the
  light-gray excluded leaves and the no-delay diagonal;
* the trajectory view: the dead-reckoned position envelope as gray boxes,
  the midpoint track, and the time spans of proven / inconclusive
  detections highlighted on the track.

Colors follow the usual convention for this kind of result plot: green
where existence is proven, black where nothing can be concluded.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.collections import PatchCollection
from matplotlib.patches import Rectangle

from .paving import NO_LOOP, Subpaving, TPlaneBox
from .report import DetectionReport
from .tube import VelocityTube

__all__ = ["plot_tplane", "plot_trajectory"]

plt.rcParams["svg.hashsalt"] = "loopdeg"

_VERDICT_COLORS = {"proven": "#2ca02c", "inconclusive": "#000000", "partial": "#ff7f0e"}


def _rect(b: TPlaneBox) -> Rectangle:
    return Rectangle((b.t1.lo, b.t2.lo), b.t1.width, b.t2.width)


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format=path.suffix.lstrip(".") or "svg",
                metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_tplane(
    path: str | Path,
    leaves: list[TPlaneBox],
    subpavings: list[Subpaving],
    reports: list[DetectionReport],
    domain: tuple[float, float],
) -> Path:
    """Render the t-plane paving with per-detection verdict colors."""
    fig, ax = plt.subplots(figsize=(7, 7))
    lo, hi = domain

    excluded = [_rect(b) for b in leaves if b.status == NO_LOOP]
    if excluded:
        ax.add_collection(PatchCollection(
            excluded, facecolor="#eeeeee", edgecolor="#dddddd", linewidth=0.2))

    verdict_by_index = {r.index: ("partial" if r.partial else r.verdict) for r in reports}
    for sp in subpavings:
        color = _VERDICT_COLORS[verdict_by_index.get(sp.index, "inconclusive")]
        ax.add_collection(PatchCollection(
            [_rect(b) for b in sp.boxes],
            facecolor=color, edgecolor=color, linewidth=0.2, alpha=0.85))

    ax.plot([lo, hi], [lo, hi], color="#888888", linewidth=0.8, linestyle="--")
    ax.set_xlim(lo, hi)
    ax.set_ylim(lo, hi)
    ax.set_xlabel("t1 [s]")
    ax.set_ylabel("t2 [s]")
    ax.set_title("loop detection sets in the t-plane")
    ax.set_aspect("equal")
    return _save(fig, path)


def plot_trajectory(
    path: str | Path,
    tube: VelocityTube,
    reports: list[DetectionReport],
    stride: int | None = None,
) -> Path:
    """Render the dead-reckoned position envelope with detection highlights."""
    env = tube.position_envelope()
    n = env.shape[0]
    if stride is None:
        stride = max(n // 400, 1)

    fig, ax = plt.subplots(figsize=(8, 6))
    boxes = [
        Rectangle((env[k, 0], env[k, 2]), env[k, 1] - env[k, 0], env[k, 3] - env[k, 2])
        for k in range(0, n, stride)
    ]
    ax.add_collection(PatchCollection(
        boxes, facecolor="#cccccc", edgecolor="#bbbbbb", linewidth=0.2, alpha=0.5))

    mid_x = 0.5 * (env[:, 0] + env[:, 1])
    mid_y = 0.5 * (env[:, 2] + env[:, 3])
    ax.plot(mid_x, mid_y, color="#1f77b4", linewidth=0.9, label="dead-reckoned track")

    bounds = tube.bounds
    seen = set()
    for r in reports:
        color = _VERDICT_COLORS["partial" if r.partial else r.verdict]
        label = "partial" if r.partial else r.verdict
        for span in (r.t1_hull, r.t2_hull):
            k0 = max(0, next((k for k, t in enumerate(bounds) if t >= span[0]), 0) - 1)
            k1 = min(n - 1, next((k for k, t in enumerate(bounds) if t >= span[1]), n - 1))
            ax.plot(mid_x[k0:k1 + 1], mid_y[k0:k1 + 1], color=color, linewidth=2.5,
                    label=label if label not in seen else None)
            seen.add(label)

    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title("position envelope and loop verdicts")
    ax.set_aspect("equal")
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)
