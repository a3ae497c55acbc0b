"""A continuously running cell paced against the wall clock.

The live cell reuses the episode machinery but never self-terminates: the
operator drives it through requests, E-stop, and reset.  A background thread
advances the simulated clock to track wall time (optionally scaled) while
every controller transition is fanned out to event-stream subscribers.
"""

from __future__ import annotations

import threading
import time

from ..bus.messages import PickRequestMsg
from ..config import RunConfig
from ..controller.events import CellEvent, CellState, EventKind
from ..metrics import compute_metrics
from ..perception.overlay import render_overlay_png
from ..perception.types import BoundingBox, Detection, GraspCandidate
from ..sim.episode import EpisodeRunner
from .broadcast import EventBroadcaster, Subscription


class LiveCell:
    def __init__(self, cfg: RunConfig, seed: int = 0, speed: float = 1.0):
        self.cfg = cfg
        self.speed = speed
        self.lock = threading.RLock()
        self.runner = EpisodeRunner(cfg, seed, live=True)
        self.broadcaster = EventBroadcaster()
        self.runner.on_transition = self._on_transition
        self._thread: threading.Thread | None = None
        self._stop = threading.Event()
        self._seq = 0
        self._inflight = False  # accepted request not yet observed to finish

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> None:
        with self.lock:
            for device in self.runner.DEVICES:
                self.runner._heartbeat_tick(device)
            self.runner.sched.after(self.cfg.timing.scan_ms, self.runner._scan_tick)
        self._thread = threading.Thread(target=self._loop, name="cell-sim", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)

    def _loop(self) -> None:
        wall0 = time.monotonic()
        sim0 = self.runner.sched.now_ms
        while not self._stop.is_set():
            target = sim0 + (time.monotonic() - wall0) * 1000.0 * self.speed
            with self.lock:
                sched = self.runner.sched
                while True:
                    nxt = sched.next_time()
                    if nxt is None or nxt > target:
                        break
                    sched.step()
            time.sleep(0.005)

    # -- operator surface ------------------------------------------------------

    def busy(self) -> bool:
        state = self.runner.task.state
        active = state not in (CellState.IDLE, CellState.AWAIT_REQUEST,
                               CellState.DONE, CellState.HALTED)
        return active or self._inflight

    def submit_request(self, counts: dict[str, int]) -> bool:
        """Forward a pick request; False when the cell is busy."""
        with self.lock:
            if self.busy():
                return False
            self._inflight = True
            self.runner.request = dict(counts)
            self.runner._send_from("hmi")("plc", PickRequestMsg(counts=counts))
            return True

    def submit_estop(self) -> None:
        with self.lock:
            self.runner.submit_estop()

    def submit_reset(self) -> None:
        # maintenance surface: reset bypasses the device message set
        with self.lock:
            self.runner.task.post(CellEvent(kind=EventKind.RESET))

    # -- views -----------------------------------------------------------------

    def _on_transition(self, record) -> None:
        if record.state_to in (CellState.DONE, CellState.HALTED,
                               CellState.REPORTING_UNAVAILABLE, CellState.IDLE,
                               CellState.AWAIT_REQUEST):
            self._inflight = False
        self._seq += 1
        self.broadcaster.publish({"type": "transition", "seq": self._seq,
                                  **record.to_log(), "cell_state": record.state_to.value})

    def subscribe(self) -> Subscription:
        return self.broadcaster.subscribe()

    def unsubscribe(self, sub: Subscription) -> None:
        self.broadcaster.unsubscribe(sub)

    def catalog(self) -> list[str]:
        return list(self.cfg.scene.catalog)

    def snapshot(self) -> dict:
        with self.lock:
            runner = self.runner
            task = runner.task
            summary = runner.perception.last_summary
            detections = []
            if summary is not None:
                for d in summary.detections:
                    detections.append({"box": list(d.box.as_tuple()),
                                       "class_label": d.class_label,
                                       "confidence": round(d.confidence, 4),
                                       "merged_count": d.merged_count})
            metrics = compute_metrics(
                [r.to_log() for r in runner.transitions],
                [p.to_dict() for p in runner.picks],
                runner.missed_frames,
                t_request_ms=runner.t_request_ms or None)
            m = metrics.to_dict()
            m.pop("latency_ms", None)
            m.pop("cycle_times_s", None)
            return {
                "cell_state": task.state.value,
                "active_request": {"counts": dict(task.ctx.request.counts),
                                   "unavailable": sorted(task.ctx.request.unavailable)},
                "last_detections": detections,
                "last_grasp": None if summary is None else summary.grasp,
                "selected_index": None if summary is None else summary.selected_index,
                "unavailable": sorted(task.ctx.request.unavailable),
                "metrics": m,
                "sim_time_ms": runner.sched.now_ms,
                "faulted": task.faulted,
            }

    def overlay_png(self) -> bytes | None:
        with self.lock:
            summary = self.runner.perception.last_summary
            if summary is None or summary.depth_preview is None:
                return None
            dets = list(summary.detections)
            grasp = None
            if summary.grasp is not None:
                g = summary.grasp
                # grasp is stored in sensor pixels; map into the preview frame
                u, v = summary.depth_preview.transform.from_sensor(g["u"], g["v"])
                grasp = GraspCandidate(u=int(round(u)), v=int(round(v)),
                                       theta=g["theta"], z=g["z"],
                                       quality=min(1.0, max(0.0, g["quality"])))
            return render_overlay_png(summary.depth_preview, dets,
                                      selected=summary.selected_index, grasp=grasp)
