"""``studio`` command line: fixture, ingest, compile, render, serve, codec."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import codec, pyramid, report, timeline as timeline_mod
from .errors import StudioError
from .renderer import DEFAULT_OUTPUT_FPS, RenderJob, Viewport, render_tour


def _fail(exc: Exception) -> "click.ClickException":
    return click.ClickException(str(exc))


def _load_tour_document(path: str) -> dict:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except ValueError as exc:
        raise click.ClickException(f"{path}: not valid JSON: {exc}")


data_dir_option = click.option(
    "--data-dir",
    envvar="STUDIO_DATA_DIR",
    type=click.Path(path_type=Path),
    required=True,
    help="Root directory holding ingested datasets (env: STUDIO_DATA_DIR).",
)


@click.group()
def main():
    """Author, compile, render, and share timelapse tours."""


@main.command()
@click.argument("output_dir", type=click.Path(path_type=Path))
@click.option("--width", default=1024, show_default=True)
@click.option("--height", default=1024, show_default=True)
@click.option("--frames", default=60, show_default=True)
def fixture(output_dir, width, height, frames):
    """Write a deterministic synthetic timelapse for testing."""
    try:
        out = pyramid.generate_fixture(width, height, frames, output_dir)
    except StudioError as exc:
        raise _fail(exc)
    click.echo(f"wrote {frames} frames ({width}x{height}) to {out}")


@main.command()
@click.argument("input_dir", type=click.Path(path_type=Path))
@data_dir_option
@click.option("--name", default=None, help="Dataset name (defaults to the input directory name).")
@click.option("--tile-size", default=pyramid.DEFAULT_TILE_SIZE, show_default=True)
@click.option("--fps", default=30.0, show_default=True, help="Native timelapse frame rate.")
@click.option("--labels", type=click.Path(path_type=Path), default=None,
              help="Optional file with one display timestamp per frame.")
def ingest(input_dir, data_dir, name, tile_size, fps, labels):
    """Build a tile pyramid from a directory of frame images."""
    name = name or Path(input_dir).name
    frame_labels = None
    if labels is not None:
        frame_labels = Path(labels).read_text(encoding="utf-8").splitlines()
    try:
        manifest = pyramid.ingest_frames(
            input_dir, data_dir, name, tile_size=tile_size, fps=fps,
            frame_labels=frame_labels,
        )
    except StudioError as exc:
        raise _fail(exc)
    click.echo(
        f"ingested {manifest.frame_count} frames of {manifest.width}x{manifest.height} "
        f"as {manifest.name!r}: {manifest.levels} levels, tile {manifest.tile_size}"
    )


def _compile_from_file(tour_file, data_dir):
    document = _load_tour_document(tour_file)
    try:
        tour = codec.document_to_tour(document)
        manifest = pyramid.load_manifest(data_dir, tour.dataset)
        codec.document_to_tour(document, manifest)
        compiled = timeline_mod.compile_tour(tour, manifest)
    except StudioError as exc:
        raise _fail(exc)
    return tour, manifest, compiled


@main.command(name="compile")
@click.argument("tour_file", type=click.Path())
@data_dir_option
@click.option("--report-dir", type=click.Path(path_type=Path), default=None,
              help="Also write segments.csv and a timeline figure here.")
def compile_cmd(tour_file, data_dir, report_dir):
    """Compile a tour document and print its timeline report."""
    tour, _manifest, compiled = _compile_from_file(tour_file, data_dir)
    rows = report.segment_rows(tour, compiled)
    for row in rows:
        dwell = f", {row['dwell_count']} dwells (+{row['dwell_seconds']:.1f} s)" \
            if row["dwell_count"] else ""
        click.echo(
            f"segment {row['segment']}: {row['motion']}, "
            f"active {row['active_seconds']:.3f} s{dwell}"
        )
    click.echo(f"total {compiled.total_seconds:.3f} s over {len(compiled.segments)} segments")
    if report_dir is not None:
        csv_path, fig_path = report.write_report(tour, compiled, report_dir)
        click.echo(f"report: {csv_path} and {fig_path}")


@main.command()
@click.argument("tour_file", type=click.Path())
@data_dir_option
@click.option("--output", type=click.Path(path_type=Path), required=True,
              help="Directory receiving the numbered frames.")
@click.option("--width", default=1280, show_default=True)
@click.option("--height", default=720, show_default=True)
@click.option("--output-fps", default=DEFAULT_OUTPUT_FPS, show_default=True)
@click.option("--workers", default=None, type=int, help="Render thread count.")
def render(tour_file, data_dir, output, width, height, output_fps, workers):
    """Render a tour document to a PNG frame sequence."""
    _tour, manifest, compiled = _compile_from_file(tour_file, data_dir)
    try:
        job = RenderJob(
            dataset=manifest.name,
            timeline=compiled,
            viewport=Viewport(width=width, height=height),
            output_dir=Path(output),
            output_fps=output_fps,
        )
        paths = render_tour(data_dir, manifest, job, workers=workers)
    except StudioError as exc:
        raise _fail(exc)
    click.echo(f"rendered {len(paths)} frames to {output}")


@main.command()
@data_dir_option
@click.option("--port", default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui-dir", type=click.Path(path_type=Path), default=None,
              help="Editor UI bundle to serve at / (defaults to ./frontend/dist if present).")
def serve(data_dir, port, host, ui_dir):
    """Run the HTTP service (datasets, tiles, tours, render jobs)."""
    from .service import serve as run_service

    try:
        run_service(data_dir, port=port, host=host, ui_dir=ui_dir)
    except OSError as exc:
        raise click.ClickException(f"cannot bind {host}:{port}: {exc}")


@main.command()
@click.argument("tour_file", type=click.Path())
def encode(tour_file):
    """Print the shareable URL fragment for a tour document."""
    document = _load_tour_document(tour_file)
    try:
        tour = codec.document_to_tour(document)
        click.echo(codec.encode_tour(tour))
    except StudioError as exc:
        raise _fail(exc)


@main.command()
@click.argument("fragment", required=False)
def decode(fragment):
    """Decode a URL fragment (argument or stdin) to its canonical document."""
    if fragment is None:
        fragment = sys.stdin.read().strip()
    try:
        tour = codec.decode_tour(fragment)
        document = codec.tour_to_document(tour)
        click.echo(codec.canonical_bytes(document).decode("utf-8"))
    except StudioError as exc:
        raise _fail(exc)


if __name__ == "__main__":
    main()
