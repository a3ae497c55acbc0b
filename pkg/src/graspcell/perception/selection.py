"""Least-overlap object selection for the next grasp attempt."""

from __future__ import annotations

from collections.abc import Mapping
from typing import Sequence

from .types import BoundingBox, Detection


def pairwise_overlap_score(boxes: Sequence[BoundingBox], i: int) -> float:
    """Sum over j != i of area(box_i ^ box_j), normalized by box_i's own area."""
    if not (0 <= i < len(boxes)):
        raise IndexError(f"index {i} out of range for {len(boxes)} boxes")
    own = boxes[i]
    total = 0.0
    for j, other in enumerate(boxes):
        if j != i:
            total += own.intersection_area(other)
    return total / own.area


def select_object_index(detections: Sequence[Detection],
                        request: Mapping[str, int]) -> int | None:
    """Index of the requested detection overlapping least with all others.

    Overlap is scored against every detection, requested or not.  Ties break
    by higher confidence, then lower detection index.
    """
    boxes = [d.box for d in detections]
    best: int | None = None
    best_key: tuple[float, float, int] | None = None
    for i, det in enumerate(detections):
        if request.get(det.class_label, 0) <= 0:
            continue
        key = (pairwise_overlap_score(boxes, i), -det.confidence, i)
        if best_key is None or key < best_key:
            best_key = key
            best = i
    return best


def select_object(detections: Sequence[Detection],
                  request: Mapping[str, int]) -> Detection | None:
    idx = select_object_index(detections, request)
    return detections[idx] if idx is not None else None


def candidate_order(detections: Sequence[Detection],
                    request: Mapping[str, int]) -> list[int]:
    """All requested detection indices, best selection first."""
    boxes = [d.box for d in detections]
    eligible = [i for i, d in enumerate(detections) if request.get(d.class_label, 0) > 0]
    return sorted(eligible,
                  key=lambda i: (pairwise_overlap_score(boxes, i),
                                 -detections[i].confidence, i))
