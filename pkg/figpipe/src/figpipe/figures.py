"""Static figures from simulation logs: comparison panels, depth, trajectory.

All renderers are read-only over their inputs and deterministic: a fixed
input produces byte-identical output (file timestamps are stripped from
the vector formats).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
# Content-hashed element ids instead of per-process ones: identical input
# must give identical SVG bytes.
matplotlib.rcParams["svg.hashsalt"] = "figpipe"

import matplotlib.pyplot as plt
import numpy as np

from .reader import load_log, require_columns, strategy_label

__all__ = [
    "FigureSpec",
    "DEPTH_DISPLAY_CAP",
    "render_comparison",
    "render_depth_track",
    "render_trajectory",
    "depth_display",
]

# 1/chi_hat is unbounded as the estimate passes through zero; the depth
# panel caps the displayed estimate at this many metres.
DEPTH_DISPLAY_CAP = 100.0

COMPARISON_PANELS = ("chi_tilde", "e_norm", "sigma_sq", "Jl_w")
PANEL_LABELS = {
    "chi_tilde": "inverse-depth error [1/m]",
    "e_norm": "tracking error",
    "sigma_sq": "excitation $\\sigma^2$",
    "Jl_w": "$J_l\\,w$ constraint",
}


@dataclass
class FigureSpec:
    """What to draw: input logs, the panel columns, and the output file."""

    inputs: list[Path]
    out: Path
    panels: tuple[str, ...]
    labels: list[str] = field(default_factory=list)
    time_column: str = "t"

    def __post_init__(self):
        self.inputs = [Path(p) for p in self.inputs]
        self.out = Path(self.out)
        if not self.labels:
            self.labels = [strategy_label(p) for p in self.inputs]


def _save(fig, out: Path) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    suffix = out.suffix.lower()
    metadata = None
    if suffix == ".svg":
        metadata = {"Date": None}
    elif suffix == ".pdf":
        metadata = {"CreationDate": None}
    fig.savefig(out, metadata=metadata)
    plt.close(fig)
    return out


def render_comparison(csv_paths, out) -> Path:
    """Stacked per-strategy panels: depth error, tracking error, sigma^2, Jl w."""
    spec = FigureSpec(list(csv_paths), out, COMPARISON_PANELS)
    logs = []
    for path in spec.inputs:
        log = load_log(path)
        require_columns(log, (spec.time_column, *spec.panels), where=path)
        logs.append(log)

    fig, axes = plt.subplots(len(spec.panels), 1, figsize=(7, 9), sharex=True)
    for ax, column in zip(axes, spec.panels):
        for log, label in zip(logs, spec.labels):
            ax.plot(log[spec.time_column], log[column], label=label, linewidth=1.2)
        ax.set_ylabel(PANEL_LABELS.get(column, column))
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="upper right")
    axes[-1].set_xlabel("t [s]")
    fig.align_ylabels(axes)
    fig.tight_layout()
    return _save(fig, spec.out)


def depth_display(log) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(t, true depth, displayed estimated depth) with the estimate capped."""
    require_columns(log, ("t", "chi", "chi_hat"))
    z = 1.0 / log["chi"]
    with np.errstate(divide="ignore"):
        z_hat = 1.0 / log["chi_hat"]
    z_hat = np.minimum(z_hat, DEPTH_DISPLAY_CAP)
    return log["t"], z, z_hat


def render_depth_track(csv_path, out) -> Path:
    """True depth 1/chi and its estimate 1/chi_hat over time."""
    spec = FigureSpec([csv_path], out, ("chi", "chi_hat"))
    log = load_log(spec.inputs[0])
    require_columns(log, (spec.time_column, *spec.panels), where=spec.inputs[0])
    t, z, z_hat = depth_display(log)

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, z, label="depth $z = 1/\\chi$", linewidth=1.4)
    ax.plot(t, z_hat, label="estimate $\\hat z = 1/\\hat\\chi$", linewidth=1.2, linestyle="--")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("depth [m]")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="upper right")
    fig.tight_layout()
    return _save(fig, spec.out)


def _quat_rotate_z(qw, qx, qy, qz) -> np.ndarray:
    """World direction of the camera optical axis for quaternion columns."""
    return np.stack(
        [2 * (qx * qz + qw * qy), 2 * (qy * qz - qw * qx), 1 - 2 * (qx * qx + qy * qy)],
        axis=1,
    )


def render_trajectory(csv_path, out, arrow_every: int = 400) -> Path:
    """3D camera path with optical-axis arrows and the tracked point,
    plus the image-plane view of s against its reference."""
    spec = FigureSpec(
        [csv_path],
        out,
        ("x", "y", "s_des_x", "s_des_y", "chi", "cam_px", "cam_py", "cam_pz",
         "cam_qw", "cam_qx", "cam_qy", "cam_qz"),
    )
    log = load_log(spec.inputs[0])
    require_columns(log, (spec.time_column, *spec.panels), where=spec.inputs[0])

    pos = np.stack([log["cam_px"], log["cam_py"], log["cam_pz"]], axis=1)
    axis = _quat_rotate_z(log["cam_qw"], log["cam_qx"], log["cam_qy"], log["cam_qz"])
    # Reconstruct the (static) world point from the first row.
    p_c0 = np.array([log["x"][0], log["y"][0], 1.0]) / log["chi"][0]
    qw, qx, qy, qz = (log[c][0] for c in ("cam_qw", "cam_qx", "cam_qy", "cam_qz"))
    R = np.array(
        [
            [1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qw * qz), 2 * (qx * qz + qw * qy)],
            [2 * (qx * qy + qw * qz), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qw * qx)],
            [2 * (qx * qz - qw * qy), 2 * (qy * qz + qw * qx), 1 - 2 * (qx * qx + qy * qy)],
        ]
    )
    point_world = R @ p_c0 + pos[0]

    fig = plt.figure(figsize=(10, 4.5))
    ax3 = fig.add_subplot(1, 2, 1, projection="3d")
    ax3.plot(pos[:, 0], pos[:, 1], pos[:, 2], color="black", linewidth=1.2, label="camera path")
    idx = np.arange(0, len(pos), max(1, arrow_every))
    scale = 0.15
    ax3.quiver(
        pos[idx, 0], pos[idx, 1], pos[idx, 2],
        axis[idx, 0] * scale, axis[idx, 1] * scale, axis[idx, 2] * scale,
        color="tab:blue", linewidth=0.8,
    )
    ax3.scatter(*point_world, color="black", s=30, label="tracked point")
    ax3.set_xlabel("x [m]")
    ax3.set_ylabel("y [m]")
    ax3.set_zlabel("z [m]")
    ax3.legend(loc="upper left")

    ax2 = fig.add_subplot(1, 2, 2)
    ax2.plot(log["s_des_x"], log["s_des_y"], linestyle="--", label="$s_{des}$", linewidth=1.2)
    ax2.plot(log["x"], log["y"], label="$s$", linewidth=1.0)
    ax2.scatter([log["x"][0]], [log["y"][0]], marker="o", s=25, color="tab:red", label="start")
    ax2.set_xlabel("x")
    ax2.set_ylabel("y")
    ax2.set_aspect("equal", adjustable="datalim")
    ax2.grid(True, alpha=0.3)
    ax2.legend(loc="upper right")
    fig.tight_layout()
    return _save(fig, spec.out)
