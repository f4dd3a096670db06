"""Figure rendering for the report path.

Matplotlib is imported lazily with the Agg backend so library use never
needs a display; every renderer takes already-computed data and writes one
PNG next to the delimited output.
"""
from __future__ import annotations

from pathlib import Path


def _plt():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def render_trajectory(traj, path) -> Path:
    plt = _plt()
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    for i in range(traj.dim):
        axes[0].plot(traj.t, traj.x[:, i], label=f"x{i+1}")
    axes[0].set_xlabel("t [s]")
    axes[0].set_ylabel("position [m]")
    axes[0].legend(fontsize=8)
    if traj.dim >= 2:
        axes[1].plot(traj.x[:, 0], traj.x[:, 1], lw=0.9)
        axes[1].set_xlabel("x1 [m]")
        axes[1].set_ylabel("x2 [m]")
    else:
        axes[1].plot(traj.t, traj.v[:, 0], lw=0.9)
        axes[1].set_xlabel("t [s]")
        axes[1].set_ylabel("v [m/s]")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)


def render_mass_sweep(masses, trajectories, divergence, path) -> Path:
    plt = _plt()
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    for m, tr in zip(masses, trajectories):
        axes[0].plot(tr.t, tr.x[:, 0], label=f"m = {m:g} kg", lw=0.9)
    axes[0].set_xlabel("t [s]")
    axes[0].set_ylabel("x1 [m]")
    axes[0].legend(fontsize=8)
    axes[1].bar([0], [max(divergence, 1e-300)])
    axes[1].set_yscale("log")
    axes[1].set_xticks([0])
    axes[1].set_xticklabels(["max pairwise divergence"])
    axes[1].axhline(1e-8, color="k", ls="--", lw=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)


def render_components(components: dict, path, title: str = "") -> Path:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 3.4))
    names = list(components)
    vals = [components[k] for k in names]
    ax.bar(range(len(names)), vals)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, fontsize=8)
    ax.axhline(0.0, color="k", lw=0.8)
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)


def render_loglog_fit(n_values, first_terms, second_terms, path) -> Path:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 3.6))
    n = list(n_values)
    if any(t != 0.0 for t in first_terms):
        ax.loglog(n, [abs(t) for t in first_terms], "o-", label="first-order term")
    ax.loglog(n, [abs(t) for t in second_terms], "s-", label="second-order term")
    ax.set_xlabel("N")
    ax.set_ylabel("|correction| [J]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)


def render_residuals(names, residuals, tol, path) -> Path:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 3.6))
    ax.bar(range(len(names)), [max(r, 1e-300) for r in residuals])
    ax.set_yscale("log")
    ax.axhline(tol, color="r", ls="--", lw=0.8, label=f"tolerance {tol:g}")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=7)
    ax.set_ylabel("max |Jacobi residual|")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)
