"""Procedural object templates for the demo catalog.

Each template builds a heightmap footprint at a fixed cell size.  Shapes are
chosen so every class has a graspable minor axis well under the 85 mm gripper
opening, except where a test deliberately needs an ungraspable item.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FOOTPRINT_CELL_M = 0.002


@dataclass(frozen=True)
class ObjectTemplate:
    class_label: str
    footprint: np.ndarray
    cell_size: float
    graspable_width_mm: float


def minimal_caliper_width_mm(footprint: np.ndarray, cell_size: float, angles: int = 36) -> float:
    """Smallest projected extent of the occupied cells over sampled directions."""
    ys, xs = np.nonzero(footprint > 0)
    if xs.size == 0:
        return 0.0
    px = (xs + 0.5) * cell_size
    py = (ys + 0.5) * cell_size
    best = np.inf
    for k in range(angles):
        a = np.pi * k / angles
        proj = px * np.cos(a) + py * np.sin(a)
        span = float(proj.max() - proj.min()) + cell_size
        best = min(best, span)
    return best * 1000.0


def _blank(w_mm: float, h_mm: float, cell: float) -> np.ndarray:
    return np.zeros((int(round(h_mm / 1000 / cell)), int(round(w_mm / 1000 / cell))))


def _fill_rect(grid: np.ndarray, x0: float, y0: float, x1: float, y1: float, height_m: float,
               cell: float) -> None:
    i0, i1 = int(round(x0 / 1000 / cell)), int(round(x1 / 1000 / cell))
    j0, j1 = int(round(y0 / 1000 / cell)), int(round(y1 / 1000 / cell))
    grid[j0:j1, i0:i1] = height_m


def _fill_ellipse(grid: np.ndarray, cx: float, cy: float, rx: float, ry: float, height_m: float,
                  cell: float, dome: bool = False) -> None:
    h, w = grid.shape
    ys, xs = np.mgrid[0:h, 0:w]
    px = (xs + 0.5) * cell * 1000
    py = (ys + 0.5) * cell * 1000
    r2 = ((px - cx) / rx) ** 2 + ((py - cy) / ry) ** 2
    inside = r2 <= 1.0
    if dome:
        # rounded top: height tapers toward the rim
        vals = height_m * np.sqrt(np.clip(1.0 - r2, 0.0, 1.0))
        grid[inside] = np.maximum(grid[inside], vals[inside])
    else:
        grid[inside] = np.maximum(grid[inside], height_m)


def _hammer(cell: float) -> np.ndarray:
    # 170 mm long: 20 mm wide handle plus a 55 x 32 mm head
    g = _blank(170, 60, cell)
    _fill_rect(g, 0, 22, 138, 42, 0.022, cell)      # handle, 20 mm across
    _fill_rect(g, 138, 14, 170, 46, 0.036, cell)    # head block
    return g


def _dog(cell: float) -> np.ndarray:
    # toy animal: body blob with a head bump
    g = _blank(110, 62, cell)
    _fill_ellipse(g, 42, 31, 40, 26, 0.040, cell, dome=True)
    _fill_ellipse(g, 88, 31, 20, 16, 0.034, cell, dome=True)
    return g


def _eggplant(cell: float) -> np.ndarray:
    g = _blank(120, 56, cell)
    _fill_ellipse(g, 52, 28, 50, 24, 0.042, cell, dome=True)
    _fill_ellipse(g, 106, 28, 14, 9, 0.020, cell)   # stem
    return g


def _banana(cell: float) -> np.ndarray:
    # crescent: union of offset ellipses minus the inner bite
    g = _blank(130, 62, cell)
    _fill_ellipse(g, 65, 38, 62, 22, 0.028, cell, dome=True)
    h, w = g.shape
    ys, xs = np.mgrid[0:h, 0:w]
    px = (xs + 0.5) * cell * 1000
    py = (ys + 0.5) * cell * 1000
    bite = ((px - 65) / 50) ** 2 + ((py - 4) / 26) ** 2 <= 1.0
    g[bite] = 0.0
    return g


def _mug(cell: float) -> np.ndarray:
    # 72 mm cylinder with a handle tab; rim ring taller than the well
    g = _blank(92, 76, cell)
    _fill_ellipse(g, 38, 38, 36, 36, 0.030, cell)
    h, w = g.shape
    ys, xs = np.mgrid[0:h, 0:w]
    px = (xs + 0.5) * cell * 1000
    py = (ys + 0.5) * cell * 1000
    rim = (((px - 38) / 36) ** 2 + ((py - 38) / 36) ** 2 <= 1.0) & (
        ((px - 38) / 27) ** 2 + ((py - 38) / 27) ** 2 > 1.0
    )
    g[rim] = 0.050
    _fill_rect(g, 74, 30, 92, 46, 0.034, cell)      # handle tab
    return g


def _block(cell: float) -> np.ndarray:
    g = _blank(52, 32, cell)
    _fill_rect(g, 0, 0, 52, 32, 0.030, cell)
    return g


_BUILDERS = {
    "hammer": _hammer,
    "dog": _dog,
    "eggplant": _eggplant,
    "banana": _banana,
    "mug": _mug,
    "block": _block,
}


def build_template(class_label: str, cell_size: float = FOOTPRINT_CELL_M) -> ObjectTemplate:
    try:
        builder = _BUILDERS[class_label]
    except KeyError:
        raise KeyError(f"unknown object class: {class_label!r}") from None
    footprint = builder(cell_size)
    return ObjectTemplate(
        class_label=class_label,
        footprint=footprint,
        cell_size=cell_size,
        graspable_width_mm=minimal_caliper_width_mm(footprint, cell_size),
    )


def default_catalog(cell_size: float = FOOTPRINT_CELL_M) -> list[ObjectTemplate]:
    return [build_template(name, cell_size) for name in _BUILDERS]


DEFAULT_CATALOG = default_catalog()
