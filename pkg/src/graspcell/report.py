"""Run reports: JSON summary, delimited pick records, and figures.

The JSON report carries no wall-clock fields, so identical (config, seed)
runs serialize byte-identically.  Figures and the CSV land next to the
report file.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .config import RunConfig  # noqa: E402
from .metrics import FAILURE_KEYS, MetricsSummary, compute_metrics  # noqa: E402
from .sim.episode import EpisodeResult  # noqa: E402

# header stating what the timing numbers are; stage costs are emulated
# clock charges from the config, not measured inference
TIMING_DISCLAIMER = ("stage durations are emulated clock charges from the run "
                     "configuration; no neural network inference is measured")


@dataclass
class RunReport:
    cfg: RunConfig
    seed: int
    episodes: list[EpisodeResult]
    transition_log_paths: list[str] = field(default_factory=list)

    def aggregate_metrics(self) -> MetricsSummary:
        transitions: list[dict] = []
        picks: list[dict] = []
        missed = 0
        t0 = self.episodes[0].t_request_ms if self.episodes else None
        offset = 0.0
        for ep in self.episodes:
            # concatenate episodes on a continuous simulated timeline
            for rec in ep.transitions:
                d = rec.to_log()
                d["timestamp_ms"] = d["timestamp_ms"] + offset
                transitions.append(d)
            for p in ep.picks:
                d = p.to_dict()
                for k in ("t_trigger_ms", "t_motion_ms", "t_closed_ms", "t_completed_ms"):
                    if d[k] is not None:
                        d[k] += offset
                picks.append(d)
            missed += ep.missed_detection_frames
            offset += ep.sim_time_ms
        return compute_metrics(transitions, picks, missed, t_request_ms=t0)

    def to_dict(self) -> dict:
        agg = self.aggregate_metrics()
        return {
            "note": TIMING_DISCLAIMER,
            "config_hash": self.cfg.config_hash(),
            "config": self.cfg.resolved_dict(),
            "seed": self.seed,
            "metrics": agg.to_dict(),
            "transition_logs": list(self.transition_log_paths),
            "episodes": [
                {
                    "seed": ep.seed,
                    "final_state": ep.final_state.value,
                    "faulted": ep.faulted,
                    "unavailable": ep.unavailable,
                    "missed_detection_frames": ep.missed_detection_frames,
                    "sim_time_ms": round(ep.sim_time_ms, 3),
                    "picks": [p.to_dict() for p in ep.picks],
                }
                for ep in self.episodes
            ],
        }

    @property
    def faulted(self) -> bool:
        return any(ep.faulted for ep in self.episodes)


def write_transition_log(ep: EpisodeResult, path: Path) -> None:
    with path.open("w") as fh:
        for rec in ep.transitions:
            fh.write(json.dumps(rec.to_log(), sort_keys=True))
            fh.write("\n")


def write_report(report: RunReport, report_path: str | Path,
                 with_figures: bool = True) -> list[Path]:
    """Write report.json, picks.csv, and figures next to the report path."""
    report_path = Path(report_path)
    report_path.parent.mkdir(parents=True, exist_ok=True)
    out_dir = report_path.parent
    stem = report_path.stem

    log_paths = []
    for i, ep in enumerate(report.episodes):
        log_path = out_dir / f"{stem}_transitions_ep{i:03d}.ndjson"
        write_transition_log(ep, log_path)
        log_paths.append(log_path.name)
    report.transition_log_paths = log_paths

    artifacts = [report_path]
    report_path.write_text(json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n")

    csv_path = out_dir / f"{stem}_picks.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "pick_index", "t_trigger_ms", "t_motion_ms",
                         "t_closed_ms", "t_completed_ms", "class_label", "success",
                         "reason", "quality", "merged_box", "inpaint_bulge",
                         "x", "y", "z", "yaw"])
        for i, ep in enumerate(report.episodes):
            for p in ep.picks:
                d = p.to_dict()
                writer.writerow([i, d["pick_index"], d["t_trigger_ms"], d["t_motion_ms"],
                                 d["t_closed_ms"], d["t_completed_ms"], d["class_label"],
                                 int(d["success"]), d["reason"], d["quality"],
                                 int(d["merged_box"]), int(d["inpaint_bulge"]),
                                 *d["grasp_robot"]])
    artifacts.append(csv_path)

    if with_figures:
        artifacts.extend(render_figures(report, out_dir, stem))
    return artifacts


def render_figures(report: RunReport, out_dir: Path, stem: str) -> list[Path]:
    agg = report.aggregate_metrics()
    paths = []

    fig, ax = plt.subplots(figsize=(6, 4))
    if agg.latency_ms:
        ax.hist(agg.latency_ms, bins=24, color="#31708f", edgecolor="white")
    ax.axvline(1000.0, color="red", linestyle="--", label="1 s budget")
    ax.set_xlabel("camera trigger to robot move (ms)")
    ax.set_ylabel("picks")
    ax.set_title("request-to-motion latency")
    ax.legend()
    p = out_dir / f"{stem}_latency_hist.png"
    fig.tight_layout()
    fig.savefig(p, dpi=110)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(6, 4))
    stages = list(agg.stage_means_ms.items())
    if stages:
        ax.barh([s for s, _ in stages], [v for _, v in stages], color="#5cb85c")
    ax.set_xlabel("mean simulated duration (ms)")
    ax.set_title("pipeline stage breakdown")
    p = out_dir / f"{stem}_stage_breakdown.png"
    fig.tight_layout()
    fig.savefig(p, dpi=110)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(6, 4))
    counts = [agg.failure_counts.get(k, 0) for k in FAILURE_KEYS]
    ax.bar(range(len(FAILURE_KEYS)), counts, color="#d9534f")
    ax.set_xticks(range(len(FAILURE_KEYS)))
    ax.set_xticklabels(FAILURE_KEYS, rotation=40, ha="right", fontsize=8)
    ax.set_ylabel("count")
    ax.set_title(f"failure modes ({agg.picks_succeeded}/{agg.picks_attempted} picks ok)")
    p = out_dir / f"{stem}_failure_modes.png"
    fig.tight_layout()
    fig.savefig(p, dpi=110)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(6, 4))
    if agg.cycle_times_s:
        ax.plot(agg.cycle_times_s, marker="o", markersize=3, linewidth=1)
        mean_cycle = sum(agg.cycle_times_s) / len(agg.cycle_times_s)
        ax.axhline(mean_cycle, color="gray", linestyle=":",
                   label=f"mean {mean_cycle:.1f} s -> {agg.picks_per_hour:.0f}/h")
        ax.legend()
    ax.set_xlabel("successful pick #")
    ax.set_ylabel("cycle time (s)")
    ax.set_title("pick cycle times (simulated)")
    p = out_dir / f"{stem}_cycle_times.png"
    fig.tight_layout()
    fig.savefig(p, dpi=110)
    plt.close(fig)
    paths.append(p)
    return paths
