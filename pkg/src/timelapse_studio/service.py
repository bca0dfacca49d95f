"""HTTP front door: datasets, tiles, tour storage, and render jobs.

All JSON responses are canonical documents (sorted keys, no whitespace),
so clients and tests may compare bodies byte for byte.  Tours persist as
canonical documents under ``<data_dir>/tours/``; tiles are immutable
after ingest and served with long-lived cache headers.
"""

from __future__ import annotations

import json
import os
import re
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, HTMLResponse, Response
from fastapi.staticfiles import StaticFiles

from . import codec, timeline as timeline_mod
from .errors import (
    DecodeError,
    InvalidArgumentError,
    InvalidTransitionError,
    NotFoundError,
    StudioError,
    UnsupportedVersionError,
    ValidationError,
)
from .pyramid import TileAddress, check_address, list_datasets, load_manifest, tile_path
from .renderer import RenderJob, Viewport, frame_filename, render_tour

TILE_CACHE_CONTROL = "public, max-age=31536000, immutable"

_TILE_FILE_RE = re.compile(r"^(\d+)_(\d+)\.png$")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _canonical_response(document, status_code: int = 200) -> Response:
    return Response(
        content=codec.canonical_bytes(document),
        media_type="application/json",
        status_code=status_code,
    )


def _error_response(message: str, status_code: int) -> Response:
    return _canonical_response({"error": message}, status_code=status_code)


class TourStore:
    """File-backed tour records with a single-writer lock."""

    def __init__(self, data_dir: Path):
        self._dir = Path(data_dir) / "tours"
        self._lock = threading.Lock()

    def _path(self, tour_id: str) -> Path:
        return self._dir / f"{tour_id}.json"

    def save(self, document: dict, tour_id: str | None = None) -> dict:
        with self._lock:
            if tour_id is None:
                tour_id = uuid.uuid4().hex[:12]
                record = {
                    "tour_id": tour_id,
                    "created_at": _now(),
                    "updated_at": _now(),
                    "tour": document,
                }
            else:
                record = self.get(tour_id)
                record["tour"] = document
                record["updated_at"] = _now()
            self._dir.mkdir(parents=True, exist_ok=True)
            self._path(tour_id).write_bytes(codec.canonical_bytes(record) + b"\n")
            return record

    def get(self, tour_id: str) -> dict:
        path = self._path(tour_id)
        if not path.is_file():
            raise NotFoundError(f"no tour with id {tour_id!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    def list(self) -> list[dict]:
        if not self._dir.is_dir():
            return []
        return [self.get(p.stem) for p in sorted(self._dir.glob("*.json"))]

    def delete(self, tour_id: str) -> None:
        with self._lock:
            path = self._path(tour_id)
            if not path.is_file():
                raise NotFoundError(f"no tour with id {tour_id!r}")
            path.unlink()


class JobManager:
    """Bounded worker pool running render jobs; records are poll-only and
    freeze once a job reaches done or failed."""

    def __init__(self, data_dir: Path, workers: int | None = None):
        self._data_dir = Path(data_dir)
        self._pool = ThreadPoolExecutor(max_workers=workers or os.cpu_count() or 2)
        self._lock = threading.Lock()
        self._records: dict[str, dict] = {}

    def submit(self, tour_document: dict, viewport: Viewport, output_fps: float) -> dict:
        job_id = uuid.uuid4().hex[:12]
        record = {
            "job_id": job_id,
            "status": "queued",
            "progress": 0.0,
            "frames_done": 0,
            "frames_total": None,
            "output_dir": None,
            "frames": None,
            "error": None,
        }
        with self._lock:
            self._records[job_id] = record
        self._pool.submit(self._run, job_id, tour_document, viewport, output_fps)
        return dict(record)

    def _update(self, job_id: str, **fields):
        with self._lock:
            self._records[job_id].update(fields)

    def _run(self, job_id: str, tour_document: dict, viewport: Viewport, output_fps: float):
        self._update(job_id, status="running")
        try:
            manifest = load_manifest(self._data_dir, tour_document["dataset"])
            tour = codec.document_to_tour(tour_document, manifest)
            compiled = timeline_mod.compile_tour(tour, manifest)
            out_dir = self._data_dir / "renders" / job_id
            job = RenderJob(
                dataset=manifest.name,
                timeline=compiled,
                viewport=viewport,
                output_dir=out_dir,
                output_fps=output_fps,
            )
            self._update(job_id, frames_total=job.frame_count, output_dir=str(out_dir))

            def on_progress(done, total):
                self._update(
                    job_id, frames_done=done, progress=done / total if total else 1.0
                )

            paths = render_tour(
                self._data_dir, manifest, job, progress_callback=on_progress
            )
            self._update(
                job_id,
                status="done",
                progress=1.0,
                frames_done=len(paths),
                frames=[p.name for p in paths],
            )
        except StudioError as exc:
            self._update(job_id, status="failed", error=str(exc))
        except Exception as exc:  # pragma: no cover - defensive
            self._update(job_id, status="failed", error=f"internal error: {exc}")

    def get(self, job_id: str) -> dict:
        with self._lock:
            if job_id not in self._records:
                raise NotFoundError(f"no job with id {job_id!r}")
            return dict(self._records[job_id])

    def shutdown(self):
        self._pool.shutdown(wait=False, cancel_futures=True)


def create_app(data_dir: Path | str, ui_dir: Path | str | None = None,
               render_workers: int | None = None) -> FastAPI:
    """Build the studio service bound to one data directory."""
    data_dir = Path(data_dir)
    app = FastAPI(title="timelapse studio", docs_url=None, redoc_url=None)
    store = TourStore(data_dir)
    jobs = JobManager(data_dir, workers=render_workers)
    app.state.job_manager = jobs

    @app.get("/api/datasets")
    def get_datasets():
        return _canonical_response([m.to_document() for m in list_datasets(data_dir)])

    @app.get("/api/datasets/{name}/manifest")
    def get_manifest(name: str):
        try:
            manifest = load_manifest(data_dir, name)
        except NotFoundError as exc:
            return _error_response(str(exc), 404)
        return _canonical_response(manifest.to_document())

    @app.get("/tiles/{name}/{frame}/{level}/{filename}")
    def get_tile(name: str, frame: int, level: int, filename: str):
        match = _TILE_FILE_RE.match(filename)
        if match is None:
            return _error_response(f"bad tile filename {filename!r}", 404)
        try:
            manifest = load_manifest(data_dir, name)
            address = TileAddress(
                frame=frame, level=level, col=int(match.group(1)), row=int(match.group(2))
            )
            check_address(manifest, address)
        except NotFoundError as exc:
            return _error_response(str(exc), 404)
        path = tile_path(data_dir, manifest, address)
        if not path.is_file():
            return _error_response(f"tile file missing: {path.name}", 404)
        return FileResponse(
            path, media_type="image/png", headers={"Cache-Control": TILE_CACHE_CONTROL}
        )

    def _validated_document(body: dict) -> dict:
        tour = codec.document_to_tour(body)  # schema first, for field-level errors
        manifest = load_manifest(data_dir, tour.dataset)
        codec.document_to_tour(body, manifest)
        return codec.tour_to_document(tour)

    @app.get("/api/tours")
    def get_tours():
        return _canonical_response(store.list())

    @app.post("/api/tours")
    async def post_tour(request: Request):
        return await _save_tour(request, None)

    @app.post("/api/tours/{tour_id}")
    async def update_tour(request: Request, tour_id: str):
        return await _save_tour(request, tour_id)

    async def _save_tour(request: Request, tour_id: str | None):
        try:
            body = json.loads(await request.body())
        except ValueError as exc:
            return _error_response(f"request body is not valid JSON: {exc}", 422)
        try:
            document = _validated_document(body)
        except (ValidationError, UnsupportedVersionError, DecodeError) as exc:
            return _error_response(str(exc), 422)
        except NotFoundError as exc:
            return _error_response(str(exc), 422)
        try:
            record = store.save(document, tour_id)
        except NotFoundError as exc:
            return _error_response(str(exc), 404)
        return _canonical_response(record, 201 if tour_id is None else 200)

    @app.get("/api/tours/{tour_id}")
    def get_tour(tour_id: str):
        try:
            return _canonical_response(store.get(tour_id))
        except NotFoundError as exc:
            return _error_response(str(exc), 404)

    @app.delete("/api/tours/{tour_id}")
    def delete_tour(tour_id: str):
        try:
            store.delete(tour_id)
        except NotFoundError as exc:
            return _error_response(str(exc), 404)
        return Response(status_code=204)

    @app.post("/api/render")
    async def post_render(request: Request):
        try:
            body = json.loads(await request.body())
        except ValueError as exc:
            return _error_response(f"request body is not valid JSON: {exc}", 422)
        tour_id = body.get("tour_id")
        if not isinstance(tour_id, str):
            return _error_response("tour_id is required", 422)
        try:
            record = store.get(tour_id)
        except NotFoundError as exc:
            return _error_response(str(exc), 404)
        try:
            viewport = Viewport(
                width=int(body.get("width", 1280)), height=int(body.get("height", 720))
            )
            output_fps = float(body.get("output_fps", 30))
            if not output_fps > 0:
                raise InvalidArgumentError("output_fps must be positive")
        except (InvalidArgumentError, ValueError, TypeError) as exc:
            return _error_response(str(exc), 422)
        job = jobs.submit(record["tour"], viewport, output_fps)
        return _canonical_response(job, 202)

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        try:
            return _canonical_response(jobs.get(job_id))
        except NotFoundError as exc:
            return _error_response(str(exc), 404)

    @app.get("/api/jobs/{job_id}/frames/{filename}")
    def get_job_frame(job_id: str, filename: str):
        try:
            record = jobs.get(job_id)
        except NotFoundError as exc:
            return _error_response(str(exc), 404)
        if record["status"] != "done" or not record["frames"] or filename not in record["frames"]:
            return _error_response(f"no frame {filename!r} in job {job_id!r}", 404)
        return FileResponse(Path(record["output_dir"]) / filename, media_type="image/png")

    resolved_ui = _resolve_ui_dir(ui_dir)
    if resolved_ui is not None:
        app.mount("/", StaticFiles(directory=resolved_ui, html=True), name="ui")
    else:
        @app.get("/")
        def index():
            return HTMLResponse(
                "<html><body><h1>timelapse studio</h1>"
                "<p>No editor bundle is installed; the API lives under /api.</p>"
                "</body></html>"
            )

    return app


def _resolve_ui_dir(ui_dir: Path | str | None) -> Path | None:
    candidates = []
    if ui_dir is not None:
        candidates.append(Path(ui_dir))
    env = os.environ.get("STUDIO_UI_DIR")
    if env:
        candidates.append(Path(env))
    candidates.append(Path("frontend") / "dist")
    for candidate in candidates:
        if candidate.is_dir() and (candidate / "index.html").is_file():
            return candidate
    return None


def serve(data_dir: Path | str, port: int = 8080, host: str = "127.0.0.1",
          ui_dir: Path | str | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = create_app(data_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
