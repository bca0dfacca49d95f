"""Tile pyramid construction, addressing, and reading.

Every timelapse frame is stored as a stack of progressively halved images
cut into fixed-size tiles.  Level 0 is the coarsest (the whole image fits
in a single tile); the last level is the native resolution.  Each level is
produced from the one below it by 2x2 box averaging with round-half-up
integer arithmetic, so tests can check levels against an exact whole-image
oracle.

On-disk layout, rooted at a data directory:

    <data_dir>/<name>/manifest.json
    <data_dir>/<name>/tiles/<frame>/<level>/<col>_<row>.png
"""

from __future__ import annotations

import json
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import IngestError, InvalidArgumentError, NotFoundError, StorageError

DEFAULT_TILE_SIZE = 256

MANIFEST_FILENAME = "manifest.json"


def compute_level_count(width: int, height: int, tile_size: int) -> int:
    """Number of pyramid levels needed so the coarsest level fits one tile.

    Equals ceil(log2(max(width, height) / tile_size)) + 1, with a minimum
    of 1, computed in exact integer arithmetic.
    """
    if width < 1 or height < 1 or tile_size < 1:
        raise InvalidArgumentError(
            f"width, height and tile_size must be >= 1, got "
            f"({width}, {height}, {tile_size})"
        )
    levels = 1
    span = tile_size
    while span < max(width, height):
        span *= 2
        levels += 1
    return levels


@dataclass(frozen=True)
class DatasetManifest:
    """Geometry and timing of one ingested timelapse pyramid."""

    name: str
    width: int
    height: int
    tile_size: int
    levels: int
    frame_count: int
    fps: float
    frame_labels: tuple[str, ...] | None = None
    tile_format: str = "png"

    def __post_init__(self):
        if min(self.width, self.height, self.tile_size, self.frame_count) < 1:
            raise InvalidArgumentError("manifest dimensions and frame_count must be >= 1")
        if not self.fps > 0:
            raise InvalidArgumentError(f"fps must be positive, got {self.fps}")
        expected = compute_level_count(self.width, self.height, self.tile_size)
        if self.levels != expected:
            raise InvalidArgumentError(
                f"levels must be {expected} for {self.width}x{self.height} "
                f"tiles of {self.tile_size}, got {self.levels}"
            )
        if self.frame_labels is not None and len(self.frame_labels) != self.frame_count:
            raise InvalidArgumentError("frame_labels length must equal frame_count")

    def level_factor(self, level: int) -> int:
        """Native pixels per level pixel: 2^(levels - 1 - level)."""
        return 1 << (self.levels - 1 - level)

    def level_size(self, level: int) -> tuple[int, int]:
        f = self.level_factor(level)
        return (-(-self.width // f), -(-self.height // f))

    def tiles_x(self, level: int) -> int:
        lw, _ = self.level_size(level)
        return -(-lw // self.tile_size)

    def tiles_y(self, level: int) -> int:
        _, lh = self.level_size(level)
        return -(-lh // self.tile_size)

    def to_document(self) -> dict:
        return {
            "name": self.name,
            "width": self.width,
            "height": self.height,
            "tile_size": self.tile_size,
            "levels": self.levels,
            "frame_count": self.frame_count,
            "fps": self.fps,
            "frame_labels": list(self.frame_labels) if self.frame_labels else None,
            "tile_format": self.tile_format,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "DatasetManifest":
        labels = doc.get("frame_labels")
        return cls(
            name=doc["name"],
            width=int(doc["width"]),
            height=int(doc["height"]),
            tile_size=int(doc["tile_size"]),
            levels=int(doc["levels"]),
            frame_count=int(doc["frame_count"]),
            fps=float(doc["fps"]),
            frame_labels=tuple(labels) if labels else None,
            tile_format=doc.get("tile_format", "png"),
        )


@dataclass(frozen=True)
class TileAddress:
    frame: int
    level: int
    col: int
    row: int


@dataclass(frozen=True)
class Tile:
    address: TileAddress
    pixels: np.ndarray = field(compare=False)  # (tile_size, tile_size, 3) uint8


def dataset_dir(data_dir: Path | str, name: str) -> Path:
    return Path(data_dir) / name


def manifest_path(data_dir: Path | str, name: str) -> Path:
    return dataset_dir(data_dir, name) / MANIFEST_FILENAME


def tile_path(data_dir: Path | str, manifest: DatasetManifest, address: TileAddress) -> Path:
    return (
        dataset_dir(data_dir, manifest.name)
        / "tiles"
        / str(address.frame)
        / str(address.level)
        / f"{address.col}_{address.row}.png"
    )


def load_manifest(data_dir: Path | str, name: str) -> DatasetManifest:
    path = manifest_path(data_dir, name)
    if not path.is_file():
        raise NotFoundError(f"no dataset named {name!r} under {data_dir}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise StorageError(f"cannot read manifest {path}: {exc}") from exc
    return DatasetManifest.from_document(doc)


def list_datasets(data_dir: Path | str) -> list[DatasetManifest]:
    root = Path(data_dir)
    if not root.is_dir():
        return []
    found = []
    for child in sorted(root.iterdir()):
        if (child / MANIFEST_FILENAME).is_file():
            found.append(load_manifest(root, child.name))
    return found


def shrink_half(image: np.ndarray) -> np.ndarray:
    """One pyramid step: 2x2 box average with round-half-up.

    Output dimensions are ceil(input / 2).  Blocks that stick out past an
    odd edge average only the in-bounds pixels, so edge content never
    darkens toward padding.
    """
    h, w = image.shape[:2]
    row_starts = np.arange(0, h, 2)
    col_starts = np.arange(0, w, 2)
    sums = np.add.reduceat(image.astype(np.uint32), row_starts, axis=0)
    sums = np.add.reduceat(sums, col_starts, axis=1)
    rows_per = np.minimum(row_starts + 2, h) - row_starts
    cols_per = np.minimum(col_starts + 2, w) - col_starts
    counts = np.multiply.outer(rows_per, cols_per).astype(np.uint32)
    if image.ndim == 3:
        counts = counts[:, :, None]
    return ((2 * sums + counts) // (2 * counts)).astype(np.uint8)


def _cut_tiles(level_image: np.ndarray, tile_size: int):
    """Yield (col, row, tile) with edge tiles padded to full size with black."""
    h, w = level_image.shape[:2]
    for row in range(-(-h // tile_size)):
        for col in range(-(-w // tile_size)):
            y0, x0 = row * tile_size, col * tile_size
            block = level_image[y0 : y0 + tile_size, x0 : x0 + tile_size]
            if block.shape[:2] != (tile_size, tile_size):
                padded = np.zeros((tile_size, tile_size, 3), np.uint8)
                padded[: block.shape[0], : block.shape[1]] = block
                block = padded
            yield col, row, block


def _read_frame_image(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))
    except (UnidentifiedImageError, OSError) as exc:
        raise IngestError(f"cannot read image {path}: {exc}") from exc


def _ingest_one_frame(frame_index: int, image_path: Path, out_root: Path,
                      tile_size: int, levels: int, expected: tuple[int, int]) -> None:
    image = _read_frame_image(image_path)
    if image.shape[:2] != expected:
        raise IngestError(
            f"frame {image_path.name} is {image.shape[1]}x{image.shape[0]}, "
            f"expected {expected[1]}x{expected[0]}"
        )
    for level in range(levels - 1, -1, -1):
        level_dir = out_root / str(frame_index) / str(level)
        level_dir.mkdir(parents=True, exist_ok=True)
        for col, row, block in _cut_tiles(image, tile_size):
            Image.fromarray(block).save(level_dir / f"{col}_{row}.png", format="PNG")
        if level > 0:
            image = shrink_half(image)


def ingest_frames(
    input_dir: Path | str,
    data_dir: Path | str,
    name: str,
    tile_size: int = DEFAULT_TILE_SIZE,
    fps: float = 30.0,
    frame_labels: list[str] | None = None,
    workers: int | None = None,
) -> DatasetManifest:
    """Build a tile pyramid for every frame image found in ``input_dir``.

    Frame order is the lexicographic order of the filenames.  All frames
    must share one resolution.  Tiles are written once and never touched
    again, so the resulting dataset is safe for concurrent readers.
    """
    input_dir = Path(input_dir)
    entries = sorted(
        p for p in input_dir.iterdir()
        if p.is_file() and p.suffix.lower() in {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}
    ) if input_dir.is_dir() else []
    if not entries:
        raise IngestError(f"no frame images found in {input_dir}")

    first = _read_frame_image(entries[0])
    height, width = first.shape[:2]
    levels = compute_level_count(width, height, tile_size)
    if frame_labels is not None and len(frame_labels) != len(entries):
        raise IngestError(
            f"got {len(frame_labels)} frame labels for {len(entries)} frames"
        )

    manifest = DatasetManifest(
        name=name,
        width=width,
        height=height,
        tile_size=tile_size,
        levels=levels,
        frame_count=len(entries),
        fps=float(fps),
        frame_labels=tuple(frame_labels) if frame_labels else None,
    )

    out_root = dataset_dir(data_dir, name) / "tiles"
    out_root.mkdir(parents=True, exist_ok=True)

    def work(item):
        index, path = item
        _ingest_one_frame(index, path, out_root, tile_size, levels, (height, width))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for _ in pool.map(work, enumerate(entries)):
            pass

    doc = json.dumps(manifest.to_document(), indent=2, sort_keys=True)
    try:
        manifest_path(data_dir, name).write_text(doc + "\n", encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot write manifest: {exc}") from exc
    return manifest


def check_address(manifest: DatasetManifest, address: TileAddress) -> None:
    if not 0 <= address.frame < manifest.frame_count:
        raise NotFoundError(f"frame {address.frame} out of range [0, {manifest.frame_count})")
    if not 0 <= address.level < manifest.levels:
        raise NotFoundError(f"level {address.level} out of range [0, {manifest.levels})")
    if not (0 <= address.col < manifest.tiles_x(address.level)
            and 0 <= address.row < manifest.tiles_y(address.level)):
        raise NotFoundError(
            f"tile ({address.col}, {address.row}) out of grid at level {address.level}"
        )


def load_tile(data_dir: Path | str, manifest: DatasetManifest, address: TileAddress) -> Tile:
    """Read and decode one tile; deterministic for a given address."""
    check_address(manifest, address)
    path = tile_path(data_dir, manifest, address)
    try:
        with Image.open(path) as img:
            pixels = np.asarray(img.convert("RGB"))
    except FileNotFoundError as exc:
        raise StorageError(f"tile file missing: {path}") from exc
    except (UnidentifiedImageError, OSError) as exc:
        raise StorageError(f"corrupt tile {path}: {exc}") from exc
    if pixels.shape != (manifest.tile_size, manifest.tile_size, 3):
        raise StorageError(f"tile {path} has wrong shape {pixels.shape}")
    return Tile(address=address, pixels=pixels)


class TileCache:
    """Thread-safe least-recently-used cache of decoded tile pixel arrays."""

    def __init__(self, capacity: int = 512):
        self._capacity = capacity
        self._lock = threading.Lock()
        self._entries: OrderedDict[tuple, np.ndarray] = OrderedDict()

    def get(self, data_dir: Path | str, manifest: DatasetManifest,
            address: TileAddress) -> np.ndarray:
        key = (str(data_dir), manifest.name, address)
        with self._lock:
            if key in self._entries:
                self._entries.move_to_end(key)
                return self._entries[key]
        pixels = load_tile(data_dir, manifest, address).pixels
        with self._lock:
            self._entries[key] = pixels
            self._entries.move_to_end(key)
            while len(self._entries) > self._capacity:
                self._entries.popitem(last=False)
        return pixels

    def __len__(self):
        with self._lock:
            return len(self._entries)


def fixture_pixel(x: int, y: int, frame: int) -> tuple[int, int, int]:
    """Closed-form pixel value of the procedural test timelapse.

    R = (x + y + 2*frame) mod 256
    G = (x - y + 3*frame) mod 256
    B = (2*x + frame)     mod 256

    The slopes are chosen so every 2x2 block mean is an exact integer at
    every pyramid level: box-filter halving of these frames never rounds,
    which makes pyramid output directly comparable to a whole-image
    downsampling oracle.
    """
    return (
        (x + y + 2 * frame) % 256,
        (x - y + 3 * frame) % 256,
        (2 * x + frame) % 256,
    )


def fixture_frame(width: int, height: int, frame: int) -> np.ndarray:
    x = np.arange(width, dtype=np.int64)[None, :]
    y = np.arange(height, dtype=np.int64)[:, None]
    r = (x + y + 2 * frame) % 256
    g = (x - y + 3 * frame) % 256
    b = (2 * x + frame) % 256
    return np.stack(np.broadcast_arrays(r, g, b), axis=-1).astype(np.uint8)


def generate_fixture(width: int, height: int, frames: int, output: Path | str) -> Path:
    """Write a deterministic moving-gradient timelapse as PNG frames.

    Pixel values follow :func:`fixture_pixel`.  Regenerating into the same
    directory produces byte-identical files.
    """
    if min(width, height, frames) < 1:
        raise InvalidArgumentError("width, height and frames must be >= 1")
    out = Path(output)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise StorageError(f"cannot create {out}: {exc}") from exc
    for f in range(frames):
        img = Image.fromarray(fixture_frame(width, height, f))
        try:
            img.save(out / f"frame_{f:05d}.png", format="PNG")
        except OSError as exc:
            raise StorageError(f"cannot write frame {f}: {exc}") from exc
    return out
