"""Timeline compile reports: delimited segment tables plus figures.

The CLI's compile path can drop a ``segments.csv`` and a rendered
``timeline.png`` into a report directory so authors can eyeball the
camera path before committing to a long render.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .timeline import MotionKind, Timeline, classify_motion, sample
from .tours import Tour

SEGMENT_FIELDS = [
    "segment",
    "motion",
    "active_seconds",
    "dwell_count",
    "dwell_seconds",
    "wall_seconds",
    "frame_path",
    "t_start",
    "t_end",
]


def segment_rows(tour: Tour, compiled: Timeline) -> list[dict]:
    rows = []
    for i, segment in enumerate(compiled.segments):
        motion = classify_motion(
            (tour.keyframes[i], tour.keyframes[i + 1]), tour.transitions[i]
        )
        rows.append(
            {
                "segment": i,
                "motion": motion.value,
                "active_seconds": segment.active_seconds,
                "dwell_count": len(segment.dwell_events),
                "dwell_seconds": segment.dwell_seconds,
                "wall_seconds": segment.wall_seconds,
                "frame_path": segment.frame_path,
                "t_start": segment.t_start,
                "t_end": segment.t_end,
            }
        )
    return rows


def write_segment_csv(rows: list[dict], path: Path) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=SEGMENT_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    return path


def plot_timeline(compiled: Timeline, path: Path, samples: int = 256) -> Path:
    """Camera-path figure: center, zoom, and time track against the clock,
    with dwell pauses shaded."""
    total = compiled.total_seconds
    times = [total * i / (samples - 1) for i in range(samples)] if total > 0 else [0.0]
    views = [sample(compiled, t) for t in times]

    fig, (ax_pos, ax_scale, ax_time) = plt.subplots(
        3, 1, figsize=(8, 7), sharex=True, constrained_layout=True
    )
    ax_pos.plot(times, [v.cx for v in views], label="center x")
    ax_pos.plot(times, [v.cy for v in views], label="center y")
    ax_pos.set_ylabel("native px")
    ax_pos.legend(loc="best", fontsize="small")

    ax_scale.plot(times, [math.log2(v.scale) for v in views], color="tab:green")
    ax_scale.set_ylabel("log2 scale")

    ax_time.plot(times, [v.frame for v in views], color="tab:red")
    ax_time.set_ylabel("frame")
    ax_time.set_xlabel("wall time (s)")

    for segment in compiled.segments:
        consumed = 0.0
        for dwell in segment.dwell_events:
            start = segment.t_start + dwell.offset_seconds + consumed
            for ax in (ax_pos, ax_scale, ax_time):
                ax.axvspan(start, start + dwell.hold_seconds, color="0.85", zorder=0)
            consumed += dwell.hold_seconds

    fig.suptitle(f"{compiled.dataset}: {total:.3f} s, {len(compiled.segments)} segments")
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def write_report(tour: Tour, compiled: Timeline, report_dir: Path) -> tuple[Path, Path]:
    report_dir = Path(report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)
    rows = segment_rows(tour, compiled)
    csv_path = write_segment_csv(rows, report_dir / "segments.csv")
    fig_path = plot_timeline(compiled, report_dir / "timeline.png")
    return csv_path, fig_path
