"""Figure rendering for trajectory reports. Uses the Agg backend so runs
work headless; figures land next to the CSV they visualize."""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .dynamics import Trajectory
from .witness import WitnessReport

__all__ = ["render_run_figures", "render_sweep_figure"]


def _unit_label(base: float) -> str:
    return "nats" if math.isclose(base, math.e) else "bits"


def render_run_figures(trajectory: Trajectory, report: WitnessReport,
                       out_dir: str) -> list[str]:
    """Write witness.png (entropy gap and concurrences) and, when the run
    recorded discord, discord.png. Returns the written file names."""
    written = []
    t = trajectory.times
    unit = _unit_label(trajectory.log_base)

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(t, trajectory.deltas(), color="crimson", lw=1.6,
            label=r"$S[\rho_S] - S[\rho_A]$")
    conc_sa = trajectory.column("concurrence_sa")
    if any(c is not None for c in conc_sa):
        ax.plot(t, [float("nan") if c is None else c for c in conc_sa],
                color="royalblue", lw=1.4, ls="--", label="concurrence S-A")
    conc_ea = trajectory.column("concurrence_ea")
    if any(c is not None for c in conc_ea):
        ax.plot(t, [float("nan") if c is None else c for c in conc_ea],
                color="seagreen", lw=1.4, ls=":", label="concurrence E-A")
    ax.axhline(0.0, color="0.6", lw=0.8)
    if report.first_detection_time is not None:
        ax.axvline(report.first_detection_time, color="0.75", lw=0.8, ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel(f"entropy gap ({unit}) / concurrence")
    ax.set_title(report.verdict)
    ax.legend(frameon=False)
    ax.grid(alpha=0.25)
    path = os.path.join(out_dir, "witness.png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append("witness.png")

    discord_values = trajectory.column("discord_s")
    if any(v is not None for v in discord_values):
        fig, ax = plt.subplots(figsize=(7.0, 4.2))
        ax.plot(t, [float("nan") if v is None else v for v in discord_values],
                color="crimson", lw=1.6, label="discord (measured on S)")
        gap_plus = [max(d, 0.0) for d in trajectory.deltas()]
        ax.plot(t, gap_plus, color="0.35", lw=1.2, ls="--",
                label="positive part of the entropy gap")
        witness_values = trajectory.column("witness_comm")
        if any(v is not None for v in witness_values):
            ax.plot(t, [float("nan") if v is None else v for v in witness_values],
                    color="darkorange", lw=1.2, ls=":", label="commutator witness")
        ax.set_xlabel("t")
        ax.set_ylabel(f"discord ({unit})")
        ax.legend(frameon=False)
        ax.grid(alpha=0.25)
        path = os.path.join(out_dir, "discord.png")
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append("discord.png")
    return written


def render_sweep_figure(couplings, p_nm_tildes, p_nms, out_dir: str) -> str:
    """P_NM measures against the coupling strength."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(couplings, p_nm_tildes, "o-", color="crimson",
            label=r"$\widetilde{P}_{NM}$")
    if all(v is not None for v in p_nms):
        ax.plot(couplings, p_nms, "s--", color="royalblue", label=r"$P_{NM}$")
    ax.set_xlabel("coupling")
    ax.set_ylabel("non-Markovianity")
    ax.legend(frameon=False)
    ax.grid(alpha=0.25)
    fig.savefig(os.path.join(out_dir, "sweep.png"), dpi=150, bbox_inches="tight")
    plt.close(fig)
    return "sweep.png"
