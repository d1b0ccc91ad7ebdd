"""Cartesian space-time grid, visibility masks, interpolation, field dumps.

The square domain [0, L]^2 is split into `cells` intervals per axis and the
horizon [0, arrival_time] into `time_cells` steps. Nodes are (x_i, y_j) with
value[i, j]; dumps are row-major over (i, j).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import PursuitConfig
from .ioutil import atomic_write_bytes, atomic_write_json

FIELD_DUMP_FORMAT = "field-dump/1"

_W_SNAP = 1e-12  # interpolation weights below this are treated as exact zeros


class Grid:
    def __init__(self, domain_size: float, cells: int, time_cells: int, arrival_time: float):
        self.domain_size = float(domain_size)
        self.cells = int(cells)
        self.time_cells = int(time_cells)
        self.arrival_time = float(arrival_time)
        self.dx = self.domain_size / self.cells
        self.dy = self.dx
        self.dt = self.arrival_time / self.time_cells
        self.xs = np.linspace(0.0, self.domain_size, self.cells + 1)
        self.ys = self.xs
        self.times = np.linspace(0.0, self.arrival_time, self.time_cells + 1)
        self.shape = (self.cells + 1, self.cells + 1)

    def points(self) -> np.ndarray:
        """Node coordinates, shape (nx, ny, 2)."""
        gx, gy = np.meshgrid(self.xs, self.ys, indexing="ij")
        return np.stack([gx, gy], axis=-1)

    def time_index(self, t: float) -> int:
        k = int(round(t / self.dt))
        if abs(k * self.dt - t) > 1e-9 or not 0 <= k <= self.time_cells:
            raise ValueError(f"t={t} is not a grid time")
        return k


def build_grid(cfg: PursuitConfig) -> Grid:
    """Grid from config; time resolution is raised if the step bound demands it.

    The advection step must satisfy dt <= sqrt(dx^2 + dy^2) / stalk_speed_cap so
    a maximum-speed foot point stays within the neighboring cells.
    """
    g = cfg.grid
    dx = g.domain_size / g.cells
    bound = np.hypot(dx, dx) / cfg.speeds.stalk_speed_cap
    t_star = cfg.path.arrival_time
    min_cells = int(np.ceil(t_star / bound - 1e-12))
    return Grid(g.domain_size, g.cells, max(g.time_cells, min_cells), t_star)


# -- visibility geometry ------------------------------------------------------


def _dist2_field(grid: Grid, center) -> np.ndarray:
    return (grid.xs[:, None] - center[0]) ** 2 + (grid.ys[None, :] - center[1]) ** 2


def visible_mask(grid: Grid, cfg: PursuitConfig, t: float) -> np.ndarray:
    """Nodes currently within the evader's visual range at time t."""
    ze = cfg.path.position(t)
    return _dist2_field(grid, ze) <= cfg.distances.visual_range ** 2


def capture_region_mask(grid: Grid, cfg: PursuitConfig, t: float) -> np.ndarray:
    """Nodes at or inside the chase-trigger separation at time t."""
    ze = cfg.path.position(t)
    return _dist2_field(grid, ze) <= cfg.distances.chase_trigger ** 2


def ever_visible_mask(grid: Grid, cfg: PursuitConfig, t: float) -> np.ndarray:
    """Nodes visible at t or at any later grid time up to arrival."""
    k0 = int(np.ceil(t / grid.dt - 1e-9))
    k0 = min(max(k0, 0), grid.time_cells)
    best = _dist2_field(grid, cfg.path.position(t))
    for tk in grid.times[k0:]:
        np.minimum(best, _dist2_field(grid, cfg.path.position(tk)), out=best)
    return best <= cfg.distances.visual_range ** 2


def visibility_stacks(grid: Grid, cfg: PursuitConfig):
    """(visible, ever) boolean stacks over all grid times, shape (nt+1, nx, ny).

    ever[k] is the backward union of visible[k:], i.e. the states from which the
    evader can still be observed at some remaining time.
    """
    nt = grid.time_cells
    visible = np.empty((nt + 1,) + grid.shape, dtype=bool)
    ever = np.empty_like(visible)
    vis2 = cfg.distances.visual_range ** 2
    acc = np.zeros(grid.shape, dtype=bool)
    for k in range(nt, -1, -1):
        v = _dist2_field(grid, cfg.path.position(grid.times[k])) <= vis2
        acc = v | acc
        visible[k] = v
        ever[k] = acc
    return visible, ever


# -- interpolation ------------------------------------------------------------


def _locate(grid: Grid, coords: np.ndarray):
    """Cell indices and weights along one axis; out-of-hull marked, not raised."""
    u = coords / grid.dx
    oob = (u < -1e-9) | (u > grid.cells + 1e-9)
    idx = np.clip(np.floor(u).astype(np.int64), 0, grid.cells - 1)
    w = np.clip(u - idx, 0.0, 1.0)
    w = np.where(w < _W_SNAP, 0.0, w)
    w = np.where(w > 1.0 - _W_SNAP, 1.0, w)
    return idx, w, oob


def _combine(corners, weights):
    """Weighted corner sum; +inf corners poison the result only with positive weight."""
    val = 0.0
    poisoned = False
    for c, w in zip(corners, weights):
        val = val + np.where(w > 0.0, w * np.where(np.isfinite(c), c, 0.0), 0.0)
        poisoned = poisoned | ((w > 0.0) & np.isinf(c))
    return np.where(poisoned, np.inf, val)


def _gather2(field: np.ndarray, i0, wx, j0, wy):
    corners = (field[i0, j0], field[i0 + 1, j0], field[i0, j0 + 1], field[i0 + 1, j0 + 1])
    weights = ((1.0 - wx) * (1.0 - wy), wx * (1.0 - wy), (1.0 - wx) * wy, wx * wy)
    return _combine(corners, weights)


def interp2_or_inf(field: np.ndarray, grid: Grid, pts) -> np.ndarray:
    """Bilinear interpolation; out-of-hull queries return +inf instead of raising."""
    pts = np.asarray(pts, dtype=float)
    i0, wx, oob_x = _locate(grid, pts[..., 0])
    j0, wy, oob_y = _locate(grid, pts[..., 1])
    val = _gather2(field, i0, wx, j0, wy)
    return np.where(oob_x | oob_y, np.inf, val)


def interp2(field: np.ndarray, grid: Grid, pts):
    """Bilinear interpolation at pts (..., 2); raises outside the grid hull."""
    pts = np.asarray(pts, dtype=float)
    i0, wx, oob_x = _locate(grid, pts[..., 0])
    j0, wy, oob_y = _locate(grid, pts[..., 1])
    if np.any(oob_x | oob_y):
        raise ValueError("interpolation query outside the grid hull")
    val = _gather2(field, i0, wx, j0, wy)
    return float(val) if val.ndim == 0 else val


def interp3(stack: np.ndarray, grid: Grid, pts, t):
    """Trilinear interpolation in (x, y, t); stack indexed [time, i, j]."""
    pts = np.asarray(pts, dtype=float)
    t = np.asarray(t, dtype=float)
    u = t / grid.dt
    if np.any((u < -1e-9) | (u > grid.time_cells + 1e-9)):
        raise ValueError("interpolation time outside the grid horizon")
    k0 = np.clip(np.floor(u).astype(np.int64), 0, grid.time_cells - 1)
    wt = np.clip(u - k0, 0.0, 1.0)
    wt = np.where(wt < _W_SNAP, 0.0, wt)
    wt = np.where(wt > 1.0 - _W_SNAP, 1.0, wt)

    i0, wx, oob_x = _locate(grid, pts[..., 0])
    j0, wy, oob_y = _locate(grid, pts[..., 1])
    if np.any(oob_x | oob_y):
        raise ValueError("interpolation query outside the grid hull")

    k0, wt, i0, wx, j0, wy = np.broadcast_arrays(k0, wt, i0, wx, j0, wy)
    v0 = _gather2_time(stack, k0, i0, wx, j0, wy)
    v1 = _gather2_time(stack, k0 + 1, i0, wx, j0, wy)
    val = _combine((v0, v1), (1.0 - wt, wt))
    return float(val) if val.ndim == 0 else val


def _gather2_time(stack, k, i0, wx, j0, wy):
    corners = (
        stack[k, i0, j0],
        stack[k, i0 + 1, j0],
        stack[k, i0, j0 + 1],
        stack[k, i0 + 1, j0 + 1],
    )
    weights = ((1.0 - wx) * (1.0 - wy), wx * (1.0 - wy), (1.0 - wx) * wy, wx * wy)
    return _combine(corners, weights)


# -- field dumps ---------------------------------------------------------------


def write_field_dump(base, field: np.ndarray, grid: Grid, name: str, config_hash: str,
                     time_index=None, time=None) -> None:
    """Write {base}.json (header) and {base}.bin (raw little-endian float64)."""
    base = Path(base)
    field = np.ascontiguousarray(field, dtype="<f8")
    header = {
        "format": FIELD_DUMP_FORMAT,
        "field": name,
        "shape": list(field.shape),
        "dx": grid.dx,
        "dy": grid.dy,
        "dt": grid.dt,
        "x0": 0.0,
        "y0": 0.0,
        "time_index": time_index,
        "time": time,
        "config_hash": config_hash,
        "dtype": "<f8",
        "order": "C",
    }
    atomic_write_json(base.with_suffix(".json"), header)
    atomic_write_bytes(base.with_suffix(".bin"), field.tobytes(order="C"))


def read_field_dump(base):
    """Read a dump written by write_field_dump; returns (header, array)."""
    base = Path(base)
    with open(base.with_suffix(".json")) as fh:
        header = json.load(fh)
    if header.get("format") != FIELD_DUMP_FORMAT:
        raise ValueError(f"not a field dump: {base}")
    raw = np.fromfile(base.with_suffix(".bin"), dtype="<f8")
    return header, raw.reshape(header["shape"])


def format_value(v: float) -> str:
    """Round-trip decimal text; infinities written as 'inf'."""
    if np.isposinf(v):
        return "inf"
    if np.isneginf(v):
        return "-inf"
    return repr(float(v))


def field_to_csv(field: np.ndarray, grid: Grid, path) -> None:
    """Plain-text export: one row per node, columns i,j,x,y,value."""
    lines = ["i,j,x,y,value"]
    for i in range(field.shape[0]):
        x = format_value(grid.xs[i])
        for j in range(field.shape[1]):
            lines.append(f"{i},{j},{x},{format_value(grid.ys[j])},{format_value(field[i, j])}")
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode())
