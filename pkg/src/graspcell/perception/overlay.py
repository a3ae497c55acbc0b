"""Annotated depth overlays for the operator panel and golden images."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.patches as mpatches  # noqa: E402
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..scene.types import DepthFrame  # noqa: E402
from .types import Detection, GraspCandidate  # noqa: E402


def render_overlay_png(frame: DepthFrame, detections: list[Detection] | None = None,
                       selected: int | None = None,
                       grasp: GraspCandidate | None = None,
                       axis_len_px: float = 30.0) -> bytes:
    """Depth colormap with detection boxes and the planned grasp axis."""
    data = np.where(frame.valid, frame.data, np.nan)
    fig, ax = plt.subplots(figsize=(frame.width / 80, frame.height / 80), dpi=80)
    ax.imshow(data, cmap="viridis", interpolation="nearest")
    ax.set_axis_off()

    for i, det in enumerate(detections or []):
        b = det.box
        is_sel = (i == selected)
        rect = mpatches.Rectangle((b.u_min, b.v_min), b.u_max - b.u_min, b.v_max - b.v_min,
                                  fill=False, linewidth=2.2 if is_sel else 1.2,
                                  edgecolor="yellow" if is_sel else "white")
        ax.add_patch(rect)
        ax.text(b.u_min + 2, b.v_min + 10, f"{det.class_label} {det.confidence:.2f}",
                color="yellow" if is_sel else "white", fontsize=8)

    if grasp is not None:
        du, dv = np.cos(grasp.theta), np.sin(grasp.theta)
        half = axis_len_px / 2
        ax.plot([grasp.u - half * du, grasp.u + half * du],
                [grasp.v - half * dv, grasp.v + half * dv],
                color="cyan", linewidth=2.5)
        ax.plot([grasp.u], [grasp.v], marker="o", color="cyan", markersize=4)

    fig.subplots_adjust(left=0, right=1, top=1, bottom=0)
    buf = io.BytesIO()
    fig.savefig(buf, format="png")
    plt.close(fig)
    return buf.getvalue()
