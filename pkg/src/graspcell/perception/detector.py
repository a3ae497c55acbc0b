"""Object-detector emulation driven by ground-truth annotations.

Per object: drop with the occlusion-dependent miss probability, jitter the
surviving box corners, score confidence, then fuse same-class boxes whose
pairwise IoU exceeds the merge threshold into a single union detection (the
clustered same-class failure mode).  Deterministic per (params.seed,
frame_seed).
"""

from __future__ import annotations

import numpy as np

from ..scene.types import GroundTruthEntry
from .types import BoundingBox, Detection, DetectorParams


def _merge_components(dets: list[Detection], threshold: float) -> list[Detection]:
    n = len(dets)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if dets[i].class_label != dets[j].class_label:
                continue
            if dets[i].box.iou(dets[j].box) > threshold:
                parent[find(i)] = find(j)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    out: list[Detection] = []
    for members in sorted(groups.values(), key=min):
        if len(members) == 1:
            out.append(dets[members[0]])
            continue
        box = dets[members[0]].box
        conf = dets[members[0]].confidence
        for m in members[1:]:
            box = box.union_box(dets[m].box)
            conf = max(conf, dets[m].confidence)
        out.append(Detection(box=box, class_label=dets[members[0]].class_label,
                             confidence=conf, merged_count=len(members)))
    return out


def detect(gt: list[GroundTruthEntry], params: DetectorParams, frame_seed: int,
           frame_size: tuple[int, int] = (640, 480)) -> list[Detection]:
    rng = np.random.default_rng([params.seed, frame_seed])
    w, h = frame_size
    survivors: list[Detection] = []
    for entry in gt:
        miss_p = params.miss_probability(entry.occlusion)
        draw = rng.random()
        if entry.degenerate or entry.box is None or draw < miss_p:
            continue
        u0, v0, u1, v1 = entry.box
        jitter = rng.normal(0.0, params.jitter_sigma, size=4) if params.jitter_sigma > 0 \
            else np.zeros(4)
        u0j, v0j, u1j, v1j = u0 + jitter[0], v0 + jitter[1], u1 + jitter[2], v1 + jitter[3]
        u0j, u1j = sorted((u0j, u1j))
        v0j, v1j = sorted((v0j, v1j))
        u0j, u1j = np.clip([u0j, u1j], 0, w)
        v0j, v1j = np.clip([v0j, v1j], 0, h)
        if u1j - u0j < 1.0:
            mid = np.clip((u0j + u1j) / 2, 0.5, w - 0.5)
            u0j, u1j = mid - 0.5, mid + 0.5
        if v1j - v0j < 1.0:
            mid = np.clip((v0j + v1j) / 2, 0.5, h - 0.5)
            v0j, v1j = mid - 0.5, mid + 0.5
        jitter_rms = float(np.sqrt(np.mean(jitter ** 2)))
        conf = params.confidence_model(entry.occlusion, jitter_rms)
        survivors.append(Detection(
            box=BoundingBox(float(u0j), float(v0j), float(u1j), float(v1j)),
            class_label=entry.class_label,
            confidence=float(np.clip(conf, 0.0, 1.0)),
        ))
    return _merge_components(survivors, params.merge_iou_threshold)
