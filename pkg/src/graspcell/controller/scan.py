"""PLC-style cyclic scan: drain the event queue, run the DFA, emit actions.

EStop is processed before anything else regardless of queue position.  Events
emitted by transitions (EMIT actions) are appended to the working queue and
consumed within the same cycle.  The inbox is bounded; overflow is a fault
that halts the cell, PLC fail-safe style.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .dfa import DfaContext, dfa_step
from .events import Action, ActionKind, CellEvent, CellState, EventKind

DEFAULT_SCAN_MS = 10
DEFAULT_QUEUE_LIMIT = 64
DEFAULT_STAGE_TIMEOUT_MS = 2000
DEFAULT_MOTION_TIMEOUT_MS = 30_000

# states waiting on the perception pipeline: short watchdog
_PIPELINE_WAIT = {
    CellState.CAPTURE_FRAME,
    CellState.DETECTING,
    CellState.SELECTING_OBJECT,
    CellState.PLANNING_GRASP,
}

# states waiting on robot or gripper motion: moves legitimately take seconds
_MOTION_WAIT = {
    CellState.MOVING_TO_GRASP,
    CellState.CLOSING,
    CellState.VERIFYING_GRASP,
    CellState.TRANSPORTING,
    CellState.PLACING,
}

_WAITING_STATES = _PIPELINE_WAIT | _MOTION_WAIT


@dataclass
class TransitionRecord:
    timestamp_ms: int
    state_from: CellState
    event: CellEvent
    state_to: CellState
    actions: list[Action]

    def to_log(self) -> dict:
        return {
            "timestamp_ms": self.timestamp_ms,
            "state_from": self.state_from.value,
            "event": self.event.to_log(),
            "state_to": self.state_to.value,
            "actions": [a.to_log() for a in self.actions],
        }


@dataclass
class ScanResult:
    state: CellState
    actions: list[Action]
    records: list[TransitionRecord]


def scan_cycle(inbox: list[CellEvent], state: CellState, ctx: DfaContext,
               now_ms: int = 0) -> ScanResult:
    """One scan: FIFO drain with EStop priority; emitted events join the same
    cycle's queue.  Returns the new state, outbox actions, and log records."""
    estops = [e for e in inbox if e.kind is EventKind.ESTOP]
    rest = [e for e in inbox if e.kind is not EventKind.ESTOP]
    queue = deque(estops + rest)

    outbox: list[Action] = []
    records: list[TransitionRecord] = []
    guard = 0
    while queue:
        guard += 1
        if guard > 10_000:
            raise RuntimeError("scan cycle did not quiesce")
        event = queue.popleft()
        new_state, actions = dfa_step(state, event, ctx)
        external: list[Action] = []
        for action in actions:
            if action.kind is ActionKind.EMIT and action.event is not None:
                queue.append(action.event)
            else:
                external.append(action)
        records.append(TransitionRecord(now_ms, state, event, new_state, actions))
        outbox.extend(external)
        state = new_state
    return ScanResult(state=state, actions=outbox, records=records)


@dataclass
class ControllerTask:
    """Owns the controller state, bounded inbox, and per-stage watchdog."""

    ctx: DfaContext = field(default_factory=DfaContext)
    state: CellState = CellState.IDLE
    scan_ms: int = DEFAULT_SCAN_MS
    queue_limit: int = DEFAULT_QUEUE_LIMIT
    stage_timeout_ms: int = DEFAULT_STAGE_TIMEOUT_MS
    motion_timeout_ms: int = DEFAULT_MOTION_TIMEOUT_MS
    faulted: bool = False
    _inbox: deque[CellEvent] = field(default_factory=deque)
    _stage_deadline_ms: int | None = None

    def _budget_for(self, state: CellState) -> int:
        return self.motion_timeout_ms if state in _MOTION_WAIT else self.stage_timeout_ms

    def post(self, event: CellEvent) -> None:
        """Queue an event from any producer; overflow faults the cell."""
        if len(self._inbox) >= self.queue_limit:
            self.faulted = True
            self._inbox.clear()
            self._inbox.append(CellEvent(kind=EventKind.ESTOP, stage="queue overflow"))
            return
        self._inbox.append(event)

    def pending(self) -> int:
        return len(self._inbox)

    def scan(self, now_ms: int) -> ScanResult:
        events = list(self._inbox)
        self._inbox.clear()

        if (self.state in _WAITING_STATES and self._stage_deadline_ms is not None
                and now_ms >= self._stage_deadline_ms
                and not any(e.kind is EventKind.ESTOP for e in events)):
            events.append(CellEvent(kind=EventKind.TIMEOUT, stage=self.state.value))

        before = self.state
        result = scan_cycle(events, self.state, self.ctx, now_ms)
        self.state = result.state
        if result.records:
            if self.state in _WAITING_STATES:
                if self.state is not before or any(
                        r.state_to is self.state and r.state_from is not self.state
                        for r in result.records):
                    self._stage_deadline_ms = now_ms + self._budget_for(self.state)
            else:
                self._stage_deadline_ms = None
        elif self.state in _WAITING_STATES and self._stage_deadline_ms is None:
            self._stage_deadline_ms = now_ms + self._budget_for(self.state)
        return result
