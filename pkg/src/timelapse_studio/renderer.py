"""Rasterize views from the tile pyramid and render timelines to frames.

Output pixel (px, py) of a viewport maps to the dataset point

    (cx + (px - width/2) / scale,  cy + (py - height/2) / scale)

in native pixel coordinates, where a dataset point is a pixel index (so a
scale-1 render aligned to integers is a byte-exact crop).  The pyramid
level whose minification factor lies in (0.5, 1] is sampled bilinearly;
anything outside the dataset renders opaque black.
"""

from __future__ import annotations

import json
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InvalidArgumentError, RenderError, StorageError
from .pyramid import DatasetManifest, TileAddress, TileCache, tile_path
from .timeline import Timeline, sample
from .tours import View

DEFAULT_OUTPUT_FPS = 30.0
RENDER_MANIFEST_FILENAME = "render_manifest.json"


@dataclass(frozen=True)
class Viewport:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidArgumentError(f"viewport must be >= 1x1, got {self.width}x{self.height}")


@dataclass(frozen=True)
class RenderJob:
    dataset: str
    timeline: Timeline
    viewport: Viewport
    output_dir: Path
    output_fps: float = DEFAULT_OUTPUT_FPS

    def __post_init__(self):
        if not self.output_fps > 0:
            raise InvalidArgumentError(f"output_fps must be positive, got {self.output_fps}")

    @property
    def frame_count(self) -> int:
        return int(math.floor(self.timeline.total_seconds * self.output_fps + 1e-9)) + 1


def select_level(scale: float, levels: int) -> int:
    """Pyramid level whose pixels best match the requested scale.

    Picks the level with minification factor scale * 2^(levels-1-level)
    in (0.5, 1], clamped to the available range.
    """
    if not scale > 0:
        raise InvalidArgumentError(f"scale must be positive, got {scale}")
    level = levels - 1 - math.floor(math.log2(1.0 / scale))
    return min(max(level, 0), levels - 1)


def quality_indicator(scale: float) -> float:
    """Percentage of native image quality at a zoom level: 100% at or
    below native sampling, degrading once magnified past native pixels."""
    if not scale > 0:
        raise InvalidArgumentError(f"scale must be positive, got {scale}")
    return min(100.0, 100.0 / scale)


def _assemble_level_region(
    data_dir, manifest: DatasetManifest, frame: int, level: int,
    x0: int, y0: int, x1: int, y1: int, cache: TileCache,
) -> np.ndarray:
    """Fetch the tiles covering level-pixel rect [x0, x1) x [y0, y1) and
    paste them into one buffer, clipped to the level's real extent."""
    region = np.zeros((y1 - y0, x1 - x0, 3), np.uint8)
    ts = manifest.tile_size
    for row in range(y0 // ts, (y1 - 1) // ts + 1):
        for col in range(x0 // ts, (x1 - 1) // ts + 1):
            address = TileAddress(frame=frame, level=level, col=col, row=row)
            try:
                pixels = cache.get(data_dir, manifest, address)
            except StorageError as exc:
                raise RenderError(
                    f"missing tile frame={frame} level={level} col={col} row={row}"
                ) from exc
            tx0, ty0 = col * ts, row * ts
            sx0, sy0 = max(x0 - tx0, 0), max(y0 - ty0, 0)
            sx1, sy1 = min(x1 - tx0, ts), min(y1 - ty0, ts)
            region[ty0 + sy0 - y0 : ty0 + sy1 - y0, tx0 + sx0 - x0 : tx0 + sx1 - x0] = \
                pixels[sy0:sy1, sx0:sx1]
    return region


def render_view(
    data_dir,
    manifest: DatasetManifest,
    view: View,
    viewport: Viewport,
    cache: TileCache | None = None,
) -> np.ndarray:
    """Rasterize one view into an RGB array of the viewport's size."""
    if cache is None:
        cache = TileCache()
    frame = int(math.floor(view.frame + 0.5))  # nearest frame, ties toward later
    frame = min(max(frame, 0), manifest.frame_count - 1)
    level = select_level(view.scale, manifest.levels)
    factor = manifest.level_factor(level)
    level_w, level_h = manifest.level_size(level)

    xs = view.cx + (np.arange(viewport.width, dtype=np.float64) - viewport.width / 2) / view.scale
    ys = view.cy + (np.arange(viewport.height, dtype=np.float64) - viewport.height / 2) / view.scale
    inside_x = (xs >= 0) & (xs <= manifest.width - 1)
    inside_y = (ys >= 0) & (ys <= manifest.height - 1)

    output = np.zeros((viewport.height, viewport.width, 3), np.uint8)
    if not inside_x.any() or not inside_y.any():
        return output

    lx = xs / factor
    ly = ys / factor
    x_lo = np.clip(np.floor(lx).astype(np.int64), 0, level_w - 1)
    y_lo = np.clip(np.floor(ly).astype(np.int64), 0, level_h - 1)
    x_hi = np.minimum(x_lo + 1, level_w - 1)
    y_hi = np.minimum(y_lo + 1, level_h - 1)
    wx = np.clip(lx - x_lo, 0.0, 1.0)
    wy = np.clip(ly - y_lo, 0.0, 1.0)

    rx0 = int(x_lo[inside_x].min())
    rx1 = int(x_hi[inside_x].max()) + 1
    ry0 = int(y_lo[inside_y].min())
    ry1 = int(y_hi[inside_y].max()) + 1
    region = _assemble_level_region(
        data_dir, manifest, frame, level, rx0, ry0, rx1, ry1, cache
    ).astype(np.float64)

    # Exterior positions carry garbage indices; clip them into the buffer
    # (their values are masked to black below).
    x_lo_r = np.clip(x_lo - rx0, 0, rx1 - rx0 - 1)[None, :]
    x_hi_r = np.clip(x_hi - rx0, 0, rx1 - rx0 - 1)[None, :]
    y_lo_r = np.clip(y_lo - ry0, 0, ry1 - ry0 - 1)[:, None]
    y_hi_r = np.clip(y_hi - ry0, 0, ry1 - ry0 - 1)[:, None]
    wx_row = wx[None, :, None]
    wy_col = wy[:, None, None]
    top = region[y_lo_r, x_lo_r] * (1 - wx_row) + region[y_lo_r, x_hi_r] * wx_row
    bottom = region[y_hi_r, x_lo_r] * (1 - wx_row) + region[y_hi_r, x_hi_r] * wx_row
    blended = top * (1 - wy_col) + bottom * wy_col

    mask = (inside_y[:, None] & inside_x[None, :])[:, :, None]
    output = np.where(mask, np.floor(blended + 0.5), 0.0).astype(np.uint8)
    return output


def frame_filename(index: int) -> str:
    return f"frame_{index:05d}.png"


def render_tour(
    data_dir,
    manifest: DatasetManifest,
    job: RenderJob,
    workers: int | None = None,
    progress_callback=None,
    cache_capacity: int = 512,
) -> list[Path]:
    """Render a compiled timeline to a numbered PNG frame sequence.

    Frames land at wall times k / output_fps for k = 0..floor(total * fps)
    and are deterministic, so the work can fan out across a thread pool.
    Writes a render manifest beside the frames.
    """
    if job.dataset != manifest.name:
        raise InvalidArgumentError(
            f"job dataset {job.dataset!r} does not match manifest {manifest.name!r}"
        )
    out = Path(job.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise StorageError(f"cannot create output directory {out}: {exc}") from exc

    total = job.frame_count
    cache = TileCache(capacity=cache_capacity)
    done = 0
    done_lock = threading.Lock()

    def render_one(index: int) -> Path:
        nonlocal done
        wall_time = min(index / job.output_fps, job.timeline.total_seconds)
        view = sample(job.timeline, wall_time)
        pixels = render_view(data_dir, manifest, view, job.viewport, cache=cache)
        path = out / frame_filename(index)
        try:
            Image.fromarray(pixels).save(path, format="PNG")
        except OSError as exc:
            raise StorageError(f"cannot write frame {path}: {exc}") from exc
        if progress_callback is not None:
            with done_lock:
                done += 1
                current = done
            progress_callback(current, total)
        return path

    with ThreadPoolExecutor(max_workers=workers) as pool:
        paths = list(pool.map(render_one, range(total)))

    summary = {
        "frame_count": total,
        "output_fps": job.output_fps,
        "viewport": {"width": job.viewport.width, "height": job.viewport.height},
    }
    (out / RENDER_MANIFEST_FILENAME).write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return paths
