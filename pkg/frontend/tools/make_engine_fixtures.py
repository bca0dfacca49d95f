#!/usr/bin/env python3
"""Regenerate tests/data/engine_samples.json from the Python engine.

The UI replays these tours with its own sampler; the recorded views are
the engine's ground truth, so the test pins client/engine playback parity.
Run from frontend/: python3 tools/make_engine_fixtures.py
"""

import json
from pathlib import Path

from timelapse_studio import codec, timeline
from timelapse_studio.pyramid import DatasetManifest
from timelapse_studio.tours import Keyframe, Tour, Transition, View

MANIFEST = DatasetManifest("demo", 1024, 768, 256, 3, 30, 10.0)


def kf(ident, frame, cx, cy, scale, desc=""):
    return Keyframe(id=str(ident), view=View(cx, cy, scale, frame), description=desc)


CASES = {
    "full_motion": Tour(
        dataset="demo", kind="tour",
        keyframes=(kf(0, 0, 100, 100, 0.25), kf(1, 20, 800, 500, 2.0)),
        transitions=(Transition("speed", 1.0),),
    ),
    "loop_with_dwells": Tour(
        dataset="demo", kind="tour",
        keyframes=(kf(0, 0, 512, 384, 1.0), kf(1, 0, 512, 384, 1.0)),
        transitions=(Transition("speed", 1.0, loops=2),),
    ),
    "jump_then_pan": Tour(
        dataset="demo", kind="tour",
        keyframes=(
            kf(0, 5, 100, 100, 1.0),
            kf(1, 25, 900, 600, 0.5),
            kf(2, 25, 200, 600, 0.5),
        ),
        transitions=(Transition("duration", 0.0), Transition("duration", 4.0)),
    ),
    "backward_time": Tour(
        dataset="demo", kind="tour",
        keyframes=(kf(0, 25, 400, 300, 1.0), kf(1, 5, 400, 300, 1.0)),
        transitions=(Transition("speed", 2.0),),
    ),
    "duration_mixed": Tour(
        dataset="demo", kind="tour",
        keyframes=(
            kf(0, 0, 300, 200, 0.5, "start"),
            kf(1, 29, 300, 200, 0.5, "same place"),
            kf(2, 29, 700, 500, 4.0, "zoom in"),
        ),
        transitions=(Transition("duration", 3.0, loops=1), Transition("duration", 2.5)),
    ),
}

SAMPLE_POINTS = 9  # start, 7 interior, end


def main():
    out = {"manifest": MANIFEST.to_document(), "cases": []}
    for name, tour in CASES.items():
        compiled = timeline.compile_tour(tour, MANIFEST)
        times = [compiled.total_seconds * i / (SAMPLE_POINTS - 1) for i in range(SAMPLE_POINTS)]
        views = []
        for t in times:
            v = timeline.sample(compiled, t)
            views.append({"t": t, "cx": v.cx, "cy": v.cy, "scale": v.scale, "frame": v.frame})
        out["cases"].append(
            {
                "name": name,
                "document": codec.tour_to_document(tour),
                "total_seconds": compiled.total_seconds,
                "segment_dwells": [len(s.dwell_events) for s in compiled.segments],
                "samples": views,
            }
        )
    target = Path(__file__).parent.parent / "tests" / "data" / "engine_samples.json"
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
