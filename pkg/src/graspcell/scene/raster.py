"""Shared bin-frame grid rasterization of posed heightmap footprints."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import Scene, SceneObject

RASTER_CELL_M = 0.002
RASTER_MARGIN_M = 0.10


@dataclass(frozen=True)
class GridGeometry:
    cell: float
    origin: tuple[float, float]
    nx: int
    ny: int

    @classmethod
    def for_bin(cls, length: float, width: float, cell: float = RASTER_CELL_M,
                margin: float = RASTER_MARGIN_M) -> "GridGeometry":
        nx = int(np.ceil((length + 2 * margin) / cell))
        ny = int(np.ceil((width + 2 * margin) / cell))
        return cls(cell=cell, origin=(-margin, -margin), nx=nx, ny=ny)

    def cell_index(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        i = np.floor((np.asarray(x) - self.origin[0]) / self.cell).astype(np.int64)
        j = np.floor((np.asarray(y) - self.origin[1]) / self.cell).astype(np.int64)
        inside = (i >= 0) & (i < self.nx) & (j >= 0) & (j < self.ny)
        return i, j, inside

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        xs = self.origin[0] + (np.arange(self.nx) + 0.5) * self.cell
        ys = self.origin[1] + (np.arange(self.ny) + 0.5) * self.cell
        return xs, ys


def rasterize_object(obj: SceneObject, geom: GridGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Occupancy mask and height grid for one posed object on `geom`."""
    px, py, yaw = obj.pose
    ext_x, ext_y = obj.extent
    xs, ys = geom.cell_centers()
    half_diag = 0.5 * float(np.hypot(ext_x, ext_y)) + geom.cell

    occ = np.zeros((geom.ny, geom.nx), dtype=bool)
    hgt = np.zeros((geom.ny, geom.nx))

    i_lo = max(0, int((px - half_diag - geom.origin[0]) / geom.cell))
    i_hi = min(geom.nx, int(np.ceil((px + half_diag - geom.origin[0]) / geom.cell)))
    j_lo = max(0, int((py - half_diag - geom.origin[1]) / geom.cell))
    j_hi = min(geom.ny, int(np.ceil((py + half_diag - geom.origin[1]) / geom.cell)))
    if i_hi <= i_lo or j_hi <= j_lo:
        return occ, hgt

    gx, gy = np.meshgrid(xs[i_lo:i_hi], ys[j_lo:j_hi])
    dx, dy = gx - px, gy - py
    c, s = np.cos(yaw), np.sin(yaw)
    ox = c * dx + s * dy
    oy = -s * dx + c * dy
    fi = np.floor((ox + ext_x / 2) / obj.cell_size).astype(np.int64)
    fj = np.floor((oy + ext_y / 2) / obj.cell_size).astype(np.int64)
    fh, fw = obj.footprint.shape
    inb = (fi >= 0) & (fi < fw) & (fj >= 0) & (fj < fh)
    sampled = np.zeros_like(ox)
    sampled[inb] = obj.footprint[fj[inb], fi[inb]]
    hit = sampled > 0
    occ[j_lo:j_hi, i_lo:i_hi] = hit
    hgt[j_lo:j_hi, i_lo:i_hi] = np.where(hit, sampled, 0.0)
    return occ, hgt


@dataclass
class RasterScene:
    """Scene composited in paint order: later objects cover earlier ones."""

    geom: GridGeometry
    surface: np.ndarray
    owner: np.ndarray
    occupancy: list[np.ndarray]
    heights: list[np.ndarray]

    @property
    def shape(self) -> tuple[int, int]:
        return self.surface.shape


def rasterize_scene(scene: Scene, cell: float = RASTER_CELL_M,
                    margin: float = RASTER_MARGIN_M) -> RasterScene:
    geom = GridGeometry.for_bin(scene.bin_dims.length, scene.bin_dims.width, cell, margin)
    surface = np.zeros((geom.ny, geom.nx))
    owner = np.full((geom.ny, geom.nx), -1, dtype=np.int64)
    occupancy: list[np.ndarray] = []
    heights: list[np.ndarray] = []
    for k, obj in enumerate(scene.objects):
        occ, hgt = rasterize_object(obj, geom)
        occupancy.append(occ)
        heights.append(hgt)
        surface[occ] = hgt[occ]
        owner[occ] = k
    return RasterScene(geom=geom, surface=surface, owner=owner,
                       occupancy=occupancy, heights=heights)
