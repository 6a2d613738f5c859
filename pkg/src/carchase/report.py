"""Figures rendered from a run's CSV log.

Reads the delimited log written by the simulation and saves PNG figures next
to it: the chase trajectories, the pixel error traces, the standoff distance
and the command signals.
"""

from __future__ import annotations

import csv
import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .simulate import LOG_FILENAME


def load_log(path) -> dict[str, np.ndarray]:
    """Column arrays from a run log; numeric columns parsed to float."""
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: empty log")
    out: dict[str, np.ndarray] = {}
    for col in rows[0].keys():
        if col == "mode":
            out[col] = np.array([r[col] for r in rows])
        else:
            out[col] = np.array([float(r[col]) for r in rows])
    return out


def _save(fig, out_dir, name, written):
    path = os.path.join(out_dir, name)
    fig.savefig(path, dpi=130)
    plt.close(fig)
    written.append(path)


def make_report(run_dir, out_dir=None) -> list[str]:
    """Render the standard figure set for a finished run; returns file paths."""
    log_path = run_dir if run_dir.endswith(".csv") else os.path.join(run_dir, LOG_FILENAME)
    out_dir = out_dir if out_dir is not None else os.path.dirname(os.path.abspath(log_path))
    os.makedirs(out_dir, exist_ok=True)
    log = load_log(log_path)
    t = log["t"]
    written: list[str] = []

    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(log["z_car"], log["x_car"], "b-", label="car")
    ax.plot(log["z_d"], log["x_d"], "r-", label="drone")
    ax.set_xlabel("travel axis z [m]")
    ax.set_ylabel("standoff axis x [m]")
    ax.set_title("Chase trajectories (top view)")
    ax.legend()
    ax.grid(True, alpha=0.4)
    _save(fig, out_dir, "trajectory.png", written)

    fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    axes[0].plot(t, log["e_u"], "k-")
    axes[0].set_ylabel("e_u [px]")
    axes[0].grid(True, alpha=0.4)
    axes[1].plot(t, log["e_v"], "k-")
    axes[1].set_ylabel("e_v [px]")
    axes[1].set_xlabel("t [s]")
    axes[1].grid(True, alpha=0.4)
    fig.suptitle("Image-space tracking errors")
    _save(fig, out_dir, "pixel_errors.png", written)

    standoff = np.sqrt(
        (log["x_d"] - log["x_car"]) ** 2
        + (log["y_d"] - log["y_car"]) ** 2
        + (log["z_d"] - log["z_car"]) ** 2
    )
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, standoff, "k-")
    ax.axhline(15.0, color="g", linestyle="--", alpha=0.7, label="reference")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("distance [m]")
    ax.set_title("Drone-to-car standoff distance")
    ax.legend()
    ax.grid(True, alpha=0.4)
    _save(fig, out_dir, "standoff.png", written)

    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    axes[0].plot(t, log["u_T"], label="u_T [N]")
    axes[0].set_ylabel("thrust [N]")
    axes[0].grid(True, alpha=0.4)
    for key, label in (("u_phi", "roll"), ("u_theta", "pitch"), ("u_psi", "yaw")):
        axes[1].plot(t, log[key], label=label)
    axes[1].set_ylabel("torque [N m]")
    axes[1].set_xlabel("t [s]")
    axes[1].legend(ncol=3, fontsize=8)
    axes[1].grid(True, alpha=0.4)
    fig.suptitle("Command signals")
    _save(fig, out_dir, "commands.png", written)

    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for key in ("phi_d", "theta_d", "psi_d"):
        axes[0].plot(t, log[key], label=key)
    axes[0].set_ylabel("attitude [rad]")
    axes[0].legend(ncol=3, fontsize=8)
    axes[0].grid(True, alpha=0.4)
    axes[1].plot(t, log["y_d"], label="altitude y_d")
    axes[1].plot(t, log["y_r"], "--", label="reference y_r")
    axes[1].set_ylabel("altitude [m]")
    axes[1].set_xlabel("t [s]")
    axes[1].legend(fontsize=8)
    axes[1].grid(True, alpha=0.4)
    fig.suptitle("Attitude and altitude")
    _save(fig, out_dir, "attitude.png", written)

    return written
