"""Cell DFA: total transition function over state x event.

Unexpected pairs self-loop with a LogIgnored action; EStop reaches Halted
from every state; Halted emits nothing until Reset.  The machine is Mealy
style: actions ride on transitions, and internally chained events (verify
verdicts, list status) are emitted as EMIT actions that the scan cycle feeds
back into the same cycle's queue.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .events import Action, ActionKind, CellEvent, CellState, EventKind, emit
from .request import PickRequest, update_request

EMPTY_CLOSURE_WIDTH_M = 0.005
DEFAULT_N_FRAMES = 3
MAX_TIMEOUT_RETRIES = 3


@dataclass
class DfaContext:
    """Mutable per-request bookkeeping consulted by the transition function."""

    request: PickRequest = field(default_factory=PickRequest)
    n_frames: int = DEFAULT_N_FRAMES
    empty_closure_m: float = EMPTY_CLOSURE_WIDTH_M
    consecutive_empty_frames: int = 0
    consecutive_no_grasp: int = 0
    timeout_count: int = 0
    current_class: str | None = None
    pending_list_status: EventKind | None = None

    def start_request(self, counts: dict[str, int]) -> None:
        self.request = PickRequest(counts=dict(counts))
        self.consecutive_empty_frames = 0
        self.consecutive_no_grasp = 0
        self.timeout_count = 0
        self.current_class = None
        self.pending_list_status = None


def _ignore(state: CellState) -> tuple[CellState, list[Action]]:
    return state, [Action(kind=ActionKind.LOG_IGNORED)]


def _capture(extra: list[Action] | None = None) -> tuple[CellState, list[Action]]:
    actions = list(extra or [])
    actions.append(Action(kind=ActionKind.TRIGGER_CAMERA))
    return CellState.CAPTURE_FRAME, actions


def _report_unavailable(ctx: DfaContext) -> tuple[CellState, list[Action]]:
    labels = sorted(ctx.request.actionable())
    for label in labels:
        ctx.request, _ = update_request(
            ctx.request, CellEvent(kind=EventKind.NO_REQUESTED_OBJECT_DETECTED,
                                   class_label=label))
    return CellState.REPORTING_UNAVAILABLE, [
        Action(kind=ActionKind.NOTIFY_HMI, data={"unavailable": labels})]


def dfa_step(state: CellState, event: CellEvent, ctx: DfaContext,
             ) -> tuple[CellState, list[Action]]:
    kind = event.kind

    # safety lane: EStop wins from every state, Halted absorbs everything
    if kind is EventKind.ESTOP:
        return CellState.HALTED, [Action(kind=ActionKind.STOP_ALL)]
    if state is CellState.HALTED:
        if kind is EventKind.RESET:
            return CellState.AWAIT_REQUEST, [Action(kind=ActionKind.RESET_HARDWARE)]
        return CellState.HALTED, []
    if kind is EventKind.RESET:
        # mid-run abort: stop everything, then release the latch
        return CellState.AWAIT_REQUEST, [Action(kind=ActionKind.STOP_ALL),
                                         Action(kind=ActionKind.RESET_HARDWARE)]

    if kind is EventKind.TIMEOUT:
        if state in (CellState.IDLE, CellState.AWAIT_REQUEST, CellState.DONE,
                     CellState.REPORTING_UNAVAILABLE):
            return _ignore(state)
        ctx.timeout_count += 1
        if ctx.timeout_count >= MAX_TIMEOUT_RETRIES:
            return CellState.HALTED, [Action(kind=ActionKind.STOP_ALL)]
        return _capture()

    if kind is EventKind.REQUEST_RECEIVED:
        if state in (CellState.IDLE, CellState.AWAIT_REQUEST, CellState.DONE):
            ctx.start_request(event.data.get("counts", {}))
            if ctx.request.fulfilled():
                return CellState.DONE, [Action(kind=ActionKind.NOTIFY_HMI,
                                               data={"note": "empty request"})]
            return _capture()
        return _ignore(state)

    if state is CellState.CAPTURE_FRAME:
        if kind is EventKind.FRAME_READY:
            return CellState.DETECTING, []
        return _ignore(state)

    if state is CellState.DETECTING:
        if kind is EventKind.DETECTIONS_READY:
            ctx.consecutive_empty_frames = 0
            return CellState.SELECTING_OBJECT, []
        if kind is EventKind.NO_REQUESTED_OBJECT_DETECTED:
            if ctx.request.fulfilled():
                # nothing left to find: the request already completed
                return CellState.DONE, [Action(kind=ActionKind.NOTIFY_HMI,
                                               data={"note": "request fulfilled"})]
            ctx.consecutive_empty_frames += 1
            if ctx.consecutive_empty_frames >= ctx.n_frames:
                return _report_unavailable(ctx)
            return _capture()
        return _ignore(state)

    if state is CellState.SELECTING_OBJECT:
        if kind is EventKind.OBJECT_SELECTED:
            ctx.current_class = event.class_label
            return CellState.PLANNING_GRASP, []
        if kind is EventKind.NO_GRASP_FOUND:
            return _frame_exhausted(ctx)
        return _ignore(state)

    if state is CellState.PLANNING_GRASP:
        if kind is EventKind.GRASP_FOUND:
            ctx.consecutive_no_grasp = 0
            return CellState.MOVING_TO_GRASP, [
                Action(kind=ActionKind.MOVE_TO_GRASP, data=dict(event.data))]
        if kind is EventKind.NO_GRASP_FOUND:
            return _frame_exhausted(ctx)
        return _ignore(state)

    if state is CellState.MOVING_TO_GRASP:
        if kind is EventKind.MOTION_DONE:
            return CellState.CLOSING, [Action(kind=ActionKind.CLOSE_GRIPPER)]
        return _ignore(state)

    if state is CellState.CLOSING:
        if kind is EventKind.GRIPPER_CLOSED:
            # verdict is decided in VerifyingGrasp; hand the event through
            return CellState.VERIFYING_GRASP, [emit(event)]
        return _ignore(state)

    if state is CellState.VERIFYING_GRASP:
        if kind is EventKind.GRIPPER_CLOSED:
            width = event.width_m if event.width_m is not None else 0.0
            if width < ctx.empty_closure_m:
                return _capture(extra=[
                    emit(CellEvent(kind=EventKind.NOTHING_GRASPED)),
                    Action(kind=ActionKind.REOPEN_GRIPPER)])
            verified = CellEvent(kind=EventKind.OBJECT_VERIFIED,
                                 class_label=ctx.current_class)
            return CellState.TRANSPORTING, [
                emit(verified), Action(kind=ActionKind.MOVE_TO_PLACE)]
        if kind is EventKind.NOTHING_GRASPED:
            return _capture(extra=[Action(kind=ActionKind.REOPEN_GRIPPER)])
        return _ignore(state)

    if state is CellState.TRANSPORTING:
        if kind is EventKind.OBJECT_VERIFIED:
            ctx.request, status = update_request(ctx.request, event)
            ctx.pending_list_status = status.kind
            return CellState.TRANSPORTING, []
        if kind is EventKind.MOTION_DONE:
            return CellState.PLACING, [Action(kind=ActionKind.OPEN_GRIPPER)]
        return _ignore(state)

    if state is CellState.PLACING:
        if kind is EventKind.PLACE_DONE:
            ctx.timeout_count = 0  # a completed pick proves the peers are healthy
            status = ctx.pending_list_status or (
                EventKind.LIST_FULFILLED if ctx.request.fulfilled() else EventKind.LIST_OPEN)
            ctx.pending_list_status = None
            return CellState.UPDATING_LIST, [emit(CellEvent(kind=status))]
        return _ignore(state)

    if state is CellState.UPDATING_LIST:
        if kind is EventKind.LIST_FULFILLED:
            return CellState.DONE, [Action(kind=ActionKind.NOTIFY_HMI,
                                           data={"note": "request fulfilled"})]
        if kind is EventKind.LIST_OPEN:
            return _capture()
        return _ignore(state)

    return _ignore(state)


def _frame_exhausted(ctx: DfaContext) -> tuple[CellState, list[Action]]:
    """No grasp on any candidate this frame: retry on a fresh frame, and give
    up via the unavailable path once the retry budget is spent."""
    ctx.consecutive_no_grasp += 1
    if ctx.consecutive_no_grasp >= ctx.n_frames:
        return _report_unavailable(ctx)
    return _capture()
