"""Pick-request bookkeeping: remaining counts and unavailable reporting."""

from __future__ import annotations

from dataclasses import dataclass, field

from .events import CellEvent, EventKind


@dataclass
class PickRequest:
    counts: dict[str, int] = field(default_factory=dict)
    unavailable: set[str] = field(default_factory=set)

    def __post_init__(self) -> None:
        for label, n in self.counts.items():
            if n < 0:
                raise ValueError(f"negative count for {label!r}")

    @property
    def remaining(self) -> int:
        return sum(self.counts.values())

    def actionable(self) -> dict[str, int]:
        return {k: v for k, v in self.counts.items() if v > 0}

    def fulfilled(self) -> bool:
        return self.remaining == 0

    def copy(self) -> "PickRequest":
        return PickRequest(counts=dict(self.counts), unavailable=set(self.unavailable))


def update_request(req: PickRequest, event: CellEvent) -> tuple[PickRequest, CellEvent]:
    """Apply a verified pick or an unavailable report; returns the new request
    plus ListFulfilled / ListOpen."""
    out = req.copy()
    if event.kind is EventKind.OBJECT_VERIFIED:
        label = event.class_label
        if label is not None and label in out.counts:
            out.counts[label] = max(0, out.counts[label] - 1)
    elif event.class_label is not None:
        # unavailable report: a label is reported at most once per request
        out.unavailable.add(event.class_label)
        out.counts[event.class_label] = 0
    status = EventKind.LIST_FULFILLED if out.fulfilled() else EventKind.LIST_OPEN
    return out, CellEvent(kind=status)
