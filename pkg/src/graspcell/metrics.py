"""Metrics over transition logs and per-pick records.

The transition log (newline-delimited JSON or in-memory records) is the
substrate: cycle boundaries, stage durations, and pick latencies are all
recovered from transition timestamps, with per-pick outcome detail joined
from the pick records.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

FAILURE_KEYS = (
    "WidthExceeded", "PoorAlignment", "CollisionWithNeighbor", "RandomSlip",
    "EmptyClosure", "MissedDetection", "MergedBoxes", "InpaintBulge",
)


class MalformedLog(ValueError):
    pass


@dataclass
class MetricsSummary:
    picks_attempted: int = 0
    picks_succeeded: int = 0
    success_rate: float = 0.0
    picks_per_hour: float = 0.0
    latency_ms: list[float] = field(default_factory=list)
    latency_mean_ms: float = 0.0
    latency_p95_ms: float = 0.0
    latency_max_ms: float = 0.0
    cycle_times_s: list[float] = field(default_factory=list)
    failure_counts: dict[str, int] = field(default_factory=dict)
    stage_means_ms: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "picks_attempted": self.picks_attempted,
            "picks_succeeded": self.picks_succeeded,
            "success_rate": round(self.success_rate, 6),
            "picks_per_hour": round(self.picks_per_hour, 3),
            "latency_mean_ms": round(self.latency_mean_ms, 3),
            "latency_p95_ms": round(self.latency_p95_ms, 3),
            "latency_max_ms": round(self.latency_max_ms, 3),
            "latency_ms": [round(x, 3) for x in self.latency_ms],
            "cycle_times_s": [round(x, 6) for x in self.cycle_times_s],
            "failure_counts": {k: self.failure_counts.get(k, 0) for k in FAILURE_KEYS},
            "stage_means_ms": {k: round(v, 3) for k, v in sorted(self.stage_means_ms.items())},
        }


def _percentile(values: list[float], q: float) -> float:
    if not values:
        return 0.0
    xs = sorted(values)
    idx = min(len(xs) - 1, max(0, int(round(q * (len(xs) - 1)))))
    return xs[idx]


def _has_action(record: dict, kind: str) -> bool:
    for a in record.get("actions", []):
        name = a if isinstance(a, str) else a.get("kind")
        if name == kind:
            return True
    return False


def _event_kind(record: dict) -> str:
    ev = record.get("event")
    return ev if isinstance(ev, str) else ev.get("kind", "")


def parse_transition_log(path: str | Path) -> list[dict]:
    records = []
    for i, line in enumerate(Path(path).read_text().splitlines()):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLog(f"line {i + 1}: {exc}") from None
        if not isinstance(rec, dict) or "timestamp_ms" not in rec:
            raise MalformedLog(f"line {i + 1}: not a transition record")
        records.append(rec)
    return records


def compute_metrics(transitions: list[dict], picks: list[dict],
                    missed_detection_frames: int = 0,
                    t_request_ms: float | None = None) -> MetricsSummary:
    """Aggregate one or more episodes' logs into a summary.

    picks_per_hour uses the simulated clock only: 3600 over the mean
    completion-to-completion cycle of successful picks.
    """
    out = MetricsSummary()
    out.picks_attempted = len(picks)
    out.picks_succeeded = sum(1 for p in picks if p.get("success"))
    out.success_rate = (out.picks_succeeded / out.picks_attempted
                        if out.picks_attempted else 0.0)

    # latency: camera trigger -> robot move command, per pick
    last_trigger: float | None = None
    stage_marks: dict[str, float] = {}
    stage_accum: dict[str, list[float]] = {}
    completions: list[float] = []
    t0 = t_request_ms
    for rec in transitions:
        ts = float(rec["timestamp_ms"])
        kind = _event_kind(rec)
        if kind == "RequestReceived" and t0 is None:
            t0 = ts
        if _has_action(rec, "TriggerCamera"):
            last_trigger = ts
            stage_marks = {"trigger": ts}
        if kind == "FrameReady":
            stage_marks["frame"] = ts
            if "trigger" in stage_marks:
                stage_accum.setdefault("capture_preprocess", []).append(
                    ts - stage_marks["trigger"])
        if kind == "DetectionsReady":
            stage_marks["detect"] = ts
            if "frame" in stage_marks:
                stage_accum.setdefault("detect", []).append(ts - stage_marks["frame"])
        if _has_action(rec, "MoveToGrasp"):
            if "detect" in stage_marks:
                stage_accum.setdefault("plan", []).append(ts - stage_marks["detect"])
            if last_trigger is not None:
                out.latency_ms.append(ts - last_trigger)
        if rec.get("state_to") == "UpdatingList":
            completions.append(ts)

    if completions:
        start = t0 if t0 is not None else completions[0]
        bounds = [start] + completions
        out.cycle_times_s = [(b - a) / 1000.0 for a, b in zip(bounds, bounds[1:])]
        mean_cycle = sum(out.cycle_times_s) / len(out.cycle_times_s)
        if mean_cycle > 0:
            out.picks_per_hour = 3600.0 / mean_cycle

    if out.latency_ms:
        out.latency_mean_ms = sum(out.latency_ms) / len(out.latency_ms)
        out.latency_p95_ms = _percentile(out.latency_ms, 0.95)
        out.latency_max_ms = max(out.latency_ms)

    counts = {k: 0 for k in FAILURE_KEYS}
    counts["MissedDetection"] = missed_detection_frames
    for p in picks:
        if p.get("success"):
            continue
        if p.get("merged_box"):
            counts["MergedBoxes"] += 1
        elif p.get("inpaint_bulge"):
            counts["InpaintBulge"] += 1
        else:
            reason = p.get("reason") or "EmptyClosure"
            counts[reason] = counts.get(reason, 0) + 1
    out.failure_counts = counts

    out.stage_means_ms = {k: sum(v) / len(v) for k, v in stage_accum.items() if v}
    return out


def compute_metrics_from_files(log_path: str | Path, picks: list[dict],
                               missed_detection_frames: int = 0) -> MetricsSummary:
    return compute_metrics(parse_transition_log(log_path), picks,
                           missed_detection_frames)
