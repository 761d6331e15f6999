"""Figure rendering for run artifacts (written next to the CSV/JSON)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .engine import Trace
from .spaces import SpaceKind

_FLOOR = 1e-17  # keeps zero residuals visible on a log axis


def render_residual_figure(trace: Trace, path: Path) -> None:
    """Residual decay on a log axis, with per-factor residuals overlaid."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = range(len(trace.residuals))
    ax.semilogy(xs, [max(r, _FLOOR) for r in trace.residuals],
                color="black", lw=1.6, label="chain residual")
    nfac = len(trace.per_factor_residuals[0])
    if nfac > 1:
        for j in range(nfac):
            ax.semilogy(xs, [max(row[j], _FLOOR)
                             for row in trace.per_factor_residuals],
                        lw=0.8, alpha=0.7, label=f"factor {j}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("residual")
    ax.set_title(f"status: {trace.status.value}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _to_plane(trace: Trace) -> list[tuple[float, float]] | None:
    kind = trace.space.kind
    if kind is SpaceKind.EUCLIDEAN and trace.space.dim == 2:
        return [(p.coords[0], p.coords[1]) for p in trace.iterates]
    if kind is SpaceKind.HYPERBOLOID and trace.space.dim == 2:
        # Poincare disk: (x1, x2) / (1 + x_t)
        return [(p.coords[0] / (1.0 + p.coords[2]),
                 p.coords[1] / (1.0 + p.coords[2])) for p in trace.iterates]
    if kind is SpaceKind.SPIDER:
        legs = trace.space.legs
        pts = []
        prev = None
        for p in trace.iterates:
            leg, r = p.coords
            ang = 0.0 if leg == 0 else 2.0 * math.pi * (leg - 1) / legs
            xy = (r * math.cos(ang), r * math.sin(ang))
            # insert the hub when the geodesic crosses it
            if prev is not None and leg != 0 and prev[0] not in (0, leg):
                pts.append((0.0, 0.0))
            pts.append(xy)
            prev = p.coords
        return pts
    return None


def render_trajectory_figure(trace: Trace, path: Path) -> bool:
    """Iterate path for plane-renderable spaces.  Returns False when the
    space has no 2-D rendering."""
    pts = _to_plane(trace)
    if pts is None:
        return False
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    ax.plot(xs, ys, "-o", ms=2.5, lw=0.9, color="tab:blue")
    ax.plot(xs[0], ys[0], "s", ms=7, color="tab:green", label="start")
    ax.plot(xs[-1], ys[-1], "*", ms=11, color="tab:red", label="final")
    if trace.space.kind is SpaceKind.HYPERBOLOID:
        circle = plt.Circle((0, 0), 1.0, fill=False, color="gray", lw=0.8)
        ax.add_patch(circle)
    if trace.space.kind is SpaceKind.SPIDER:
        legs = trace.space.legs
        reach = max([abs(v) for v in xs + ys] + [1.0]) * 1.05
        for k in range(legs):
            ang = 2.0 * math.pi * k / legs
            ax.plot([0, reach * math.cos(ang)], [0, reach * math.sin(ang)],
                    color="lightgray", lw=0.8, zorder=0)
    ax.set_aspect("equal")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return True


def render_run_figures(trace: Trace, out_dir: Path) -> list[str]:
    """Render all supported figures into ``out_dir``; returns filenames."""
    written = []
    render_residual_figure(trace, out_dir / "residuals.png")
    written.append("residuals.png")
    if render_trajectory_figure(trace, out_dir / "trajectory.png"):
        written.append("trajectory.png")
    return written
