"""Matplotlib figures written next to the delimited exports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .kinematics import eef_positions  # noqa: E402
from .world import interpolate_edge  # noqa: E402

golden_mean = (np.sqrt(5) - 1.0) / 2.0

params = {
    "axes.labelsize": 9,
    "font.size": 8,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.0,
    "lines.markersize": 3,
    "figure.dpi": 120,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def _sphere(ax, center, radius, color, alpha=0.25):
    u, v = np.mgrid[0:2 * np.pi:24j, 0:np.pi:12j]
    x = center[0] + radius * np.cos(u) * np.sin(v)
    y = center[1] + radius * np.sin(u) * np.sin(v)
    z = center[2] + radius * np.cos(v)
    ax.plot_wireframe(x, y, z, color=color, alpha=alpha, linewidth=0.5)


def _dense_tip(path, scenario, pieces=8):
    if len(path) < 2:
        return eef_positions(path, scenario.dh) if len(path) else np.empty((0, 3))
    qs = [interpolate_edge(a, b, pieces)[:-1] for a, b in zip(path[:-1], path[1:])]
    qs.append(path[-1:])
    return eef_positions(np.concatenate(qs), scenario.dh)


def plot_search(result, scenario, smoothed=None, out=None, title=None):
    """Tree tips as red circles, raw path green, smoothed path black dashed."""
    with plt.rc_context(params):
        fig = plt.figure(figsize=(6, 6 * golden_mean + 1))
        ax = fig.add_subplot(projection="3d")
        tips = result.tree.eef
        ax.scatter(tips[:, 0], tips[:, 1], tips[:, 2], facecolors="none", edgecolors="r",
                   s=8, linewidths=0.5, label="tree nodes")
        if result.found:
            raw = _dense_tip(result.raw_path, scenario)
            ax.plot(raw[:, 0], raw[:, 1], raw[:, 2], "g-", label="raw path")
        if smoothed is not None and len(smoothed) > 1:
            sm = _dense_tip(smoothed, scenario)
            ax.plot(sm[:, 0], sm[:, 1], sm[:, 2], "k--", label="smoothed path")
        for o in scenario.obstacles:
            _sphere(ax, o.center, o.radius, "0.3")
        _sphere(ax, scenario.goal_position, scenario.goal_radius, "y", alpha=0.15)
        ax.scatter(*tips[0], marker="*", s=120, c="b", label="start")
        ax.scatter(*scenario.goal_position, marker="*", s=120, c="gold", edgecolors="k", label="goal")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        ax.set_zlabel("z [m]")
        ax.set_title(title or f"{result.algorithm} seed {result.seed}: {result.status}, "
                              f"{result.iterations} iterations")
        ax.legend(loc="upper left")
        return _finish(fig, out)


def plot_trajectory(traj, scenario, out=None, n=400):
    """Configuration time histories; joint limits drawn as dotted lines."""
    t = np.linspace(0.0, traj.duration, n)
    q = traj.sample(t)
    with plt.rc_context(params):
        fig, (ax_v, ax_j) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
        for j, name in enumerate(["x_v", "y_v", "z_v", "yaw"]):
            ax_v.plot(t, q[:, j], label=name)
        ax_v.set_ylabel("vehicle [m, rad]")
        ax_v.legend(ncol=4)
        for j in range(4):
            line, = ax_j.plot(t, q[:, 4 + j], label=f"q{j + 1}")
            if scenario.limits.bounded[j]:
                for lim in (scenario.limits.q_min[j], scenario.limits.q_max[j]):
                    ax_j.axhline(lim, color=line.get_color(), linestyle=":", linewidth=0.6)
        ax_j.plot(traj.knot_times, traj.knots[:, 4:], "k.", markersize=3)
        ax_j.set_ylabel("joints [rad]")
        ax_j.set_xlabel("t [s]")
        ax_j.legend(ncol=4)
        return _finish(fig, out)


def plot_eef_history(traj, scenario, out=None, n=400):
    t = np.linspace(0.0, traj.duration, n)
    p = eef_positions(traj.sample(t), scenario.dh)
    with plt.rc_context(params):
        fig, ax = plt.subplots(figsize=(6, 6 * golden_mean))
        for j, name in enumerate("xyz"):
            ax.plot(t, p[:, j], label=f"eef {name}")
            ax.axhline(scenario.goal_position[j], linestyle=":", linewidth=0.6, color=f"C{j}")
        ax.set_xlabel("t [s]")
        ax.set_ylabel("position [m]")
        ax.legend()
        return _finish(fig, out)


def plot_bench(report, out=None):
    """Iterations per seed for each algorithm (log scale); NotFound bars hatched."""
    algos = report.algorithms
    seeds = report.seeds
    width = 0.8 / max(1, len(algos))
    with plt.rc_context(params):
        fig, ax = plt.subplots(figsize=(max(4, 0.5 * len(seeds) + 2), 3))
        x = np.arange(len(seeds))
        for k, algo in enumerate(algos):
            rows = {r.seed: r for r in report.rows if r.algorithm == algo}
            its = [rows[s].iterations if s in rows else 0 for s in seeds]
            bars = ax.bar(x + k * width, np.maximum(its, 1), width, label=algo)
            for b, s in zip(bars, seeds):
                if s in rows and not rows[s].found:
                    b.set_hatch("//")
        ax.set_xticks(x + width * (len(algos) - 1) / 2)
        ax.set_xticklabels([str(s) for s in seeds], rotation=90 if len(seeds) > 12 else 0)
        ax.set_yscale("log")
        ax.set_xlabel("seed")
        ax.set_ylabel("iterations")
        ax.set_title(report.scenario)
        ax.legend()
        return _finish(fig, out)


def _finish(fig, out):
    if out is None:
        return fig
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    return out
