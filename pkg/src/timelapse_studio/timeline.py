"""Compile tours into wall-clock timelines and sample them.

Transition semantics
--------------------
A speed transition fixes the playback rate relative to the dataset's
native frame rate and derives the wall duration; a duration transition
fixes the wall duration and derives the rate (duration 0 is an
instantaneous jump).  A gap may additionally loop through the entire
timelapse ``loops`` times before settling on its target frame.

The time track of a looping gap runs forward with wraparound over
``frame_count`` frames per pass.  Whenever the playhead arrives at the
last frame or at frame 0 during such a forward traversal, playback pauses
for half a second (a "dwell") before continuing; a segment never dwells
on its own starting instant.  Moving backward in time (negative frame
delta without loops) traverses directly and never dwells.

Sampling is linear in the center coordinates and in the time track, and
exponential in scale so the zoom rate looks constant.  During a dwell the
whole view freezes.  Sampling at a segment boundary returns that boundary
keyframe's view exactly.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .errors import InvalidArgumentError, InvalidTransitionError
from .pyramid import DatasetManifest
from .tours import DURATION, SPEED, TOUR, Keyframe, Tour, Transition, View, validate_view

DWELL_SECONDS = 0.5
FLY_TO_SECONDS = 2.0

_EPS = 1e-9


class MotionKind(str, Enum):
    FULL_MOTION = "full_motion"
    TIME_ONLY = "time_only"
    SPACE_ONLY = "space_only"
    HOLD = "hold"
    JUMP = "jump"


class Dwell(NamedTuple):
    """A pause of ``hold_seconds`` when the playhead reaches ``offset_seconds``
    of active (non-paused) segment time."""

    offset_seconds: float
    hold_seconds: float = DWELL_SECONDS


@dataclass(frozen=True)
class Segment:
    """One compiled keyframe gap: motion plus any dwell pauses."""

    start_view: View
    end_view: View
    active_seconds: float
    dwell_events: tuple[Dwell, ...]
    frame_path: float
    t_start: float

    @property
    def dwell_seconds(self) -> float:
        return sum(d.hold_seconds for d in self.dwell_events)

    @property
    def wall_seconds(self) -> float:
        return self.active_seconds + self.dwell_seconds

    @property
    def t_end(self) -> float:
        return self.t_start + self.wall_seconds


@dataclass(frozen=True)
class Timeline:
    """A sampleable wall-clock animation over one dataset.

    ``start_view`` carries the view of a single-keyframe tour, whose
    timeline has no segments; ``frame_count`` is needed to wrap the time
    track while sampling.
    """

    dataset: str
    frame_count: int
    segments: tuple[Segment, ...]
    total_seconds: float
    start_view: View


def traversal_path(frame_delta: float, loops: int, frame_count: int) -> float:
    """Signed frame-steps a gap traverses, loops included.

    Forward and looping gaps wrap around the timelapse:
    ``loops * frame_count + (frame_delta mod frame_count)``.  A backward
    gap without loops runs directly backward: ``frame_delta``.
    """
    if loops > 0 and frame_count < 2:
        raise InvalidTransitionError("looping requires a timelapse of at least 2 frames")
    if loops == 0 and frame_delta < 0:
        return float(frame_delta)
    return loops * frame_count + (frame_delta % frame_count)


def _dwell_offsets(start_frame: float, path: float, frame_count: int,
                   seconds_per_step: float) -> tuple[Dwell, ...]:
    """Dwells at every arrival of the forward-wrapping playhead at the
    last frame or at frame 0, excluding the starting instant."""
    if path <= 0 or seconds_per_step <= 0 or frame_count < 2:
        return ()
    offsets = []
    for station in (frame_count - 1, 0):
        first = (station - start_frame) % frame_count
        if first <= _EPS:
            first += frame_count
        k = first
        while k <= path + _EPS:
            offsets.append(k * seconds_per_step)
            k += frame_count
    return tuple(Dwell(offset) for offset in sorted(offsets))


def segment_duration(
    transition: Transition,
    frame_delta: float,
    fps: float,
    frame_count: int,
    start_frame: float = 0.0,
) -> tuple[float, float, tuple[Dwell, ...]]:
    """Resolve one gap to (active_seconds, frame_path, dwell_events).

    ``start_frame`` anchors the dwell pauses: where along the traversal
    the playhead meets the first or last frame depends on where it
    started, not only on how far it goes.
    """
    if not fps > 0:
        raise InvalidArgumentError(f"fps must be positive, got {fps}")
    if abs(frame_delta) > frame_count - 1:
        raise InvalidArgumentError(
            f"frame delta {frame_delta} exceeds timelapse span {frame_count - 1}"
        )
    path = traversal_path(frame_delta, transition.loops, frame_count)

    if transition.kind == SPEED:
        if path == 0:
            raise InvalidTransitionError("speed transition requires differing times")
        active = abs(path) / (fps * transition.value)
    else:
        active = transition.value

    if active <= 0:
        dwells = ()  # a jump cuts straight to the target: nothing to pause on
    else:
        dwells = _dwell_offsets(start_frame, path, frame_count, active / path if path > 0 else 0.0)
    return active, path, dwells


def classify_motion(pair: tuple[Keyframe, Keyframe], transition: Transition) -> MotionKind:
    """Which of the five camera motions a keyframe pair performs.

    Time counts as moving when the end frames differ or the gap loops;
    a speed transition without time movement has no finite duration and
    is rejected.
    """
    first, second = pair
    if transition.kind == DURATION and transition.value == 0:
        return MotionKind.JUMP
    time_moves = first.view.frame != second.view.frame or transition.loops > 0
    if transition.kind == SPEED and not time_moves:
        raise InvalidTransitionError("speed transition requires differing times")
    space_moves = (
        first.view.cx != second.view.cx
        or first.view.cy != second.view.cy
        or first.view.scale != second.view.scale
    )
    if time_moves and space_moves:
        return MotionKind.FULL_MOTION
    if time_moves:
        return MotionKind.TIME_ONLY
    if space_moves:
        return MotionKind.SPACE_ONLY
    return MotionKind.HOLD


def compile_tour(tour: Tour, manifest: DatasetManifest) -> Timeline:
    """Compile a tour into a contiguous, sampleable timeline."""
    if tour.kind != TOUR:
        raise InvalidArgumentError(f"only kind=tour compiles, got kind={tour.kind}")
    if not tour.keyframes:
        raise InvalidArgumentError("cannot compile an empty tour")
    if tour.dataset != manifest.name:
        raise InvalidArgumentError(
            f"tour targets dataset {tour.dataset!r}, manifest is {manifest.name!r}"
        )
    for kf in tour.keyframes:
        validate_view(kf.view, manifest)

    segments = []
    clock = 0.0
    for gap, (first, second) in enumerate(zip(tour.keyframes, tour.keyframes[1:])):
        delta = second.view.frame - first.view.frame
        try:
            active, path, dwells = segment_duration(
                tour.transitions[gap], delta, manifest.fps, manifest.frame_count,
                start_frame=first.view.frame,
            )
        except InvalidTransitionError as exc:
            raise InvalidTransitionError(f"gap {gap}: {exc}", gap_index=gap) from exc
        segment = Segment(
            start_view=first.view,
            end_view=second.view,
            active_seconds=active,
            dwell_events=dwells,
            frame_path=path,
            t_start=clock,
        )
        segments.append(segment)
        clock = segment.t_end
    return Timeline(
        dataset=tour.dataset,
        frame_count=manifest.frame_count,
        segments=tuple(segments),
        total_seconds=clock,
        start_view=tour.keyframes[0].view,
    )


def fly_to(current: View, target: Keyframe, manifest: DatasetManifest) -> Timeline:
    """A fixed 2-second animated hop from the current view to a keyframe.

    Used by slideshows: space-only when the frames agree, otherwise the
    time track interpolates too.  Navigation hops never dwell, so the hop
    always takes exactly 2 seconds.
    """
    validate_view(current, manifest)
    validate_view(target.view, manifest)
    delta = target.view.frame - current.frame
    _active, path, _dwells = segment_duration(
        Transition(DURATION, FLY_TO_SECONDS, 0), delta, manifest.fps,
        manifest.frame_count, start_frame=current.frame,
    )
    segment = Segment(
        start_view=current,
        end_view=target.view,
        active_seconds=FLY_TO_SECONDS,
        dwell_events=(),
        frame_path=path,
        t_start=0.0,
    )
    return Timeline(
        dataset=manifest.name,
        frame_count=manifest.frame_count,
        segments=(segment,),
        total_seconds=FLY_TO_SECONDS,
        start_view=current,
    )


def _active_time(segment: Segment, wall_offset: float) -> float:
    """Map wall time within a segment to active (motion) time, freezing
    inside dwell holds."""
    consumed = 0.0
    for dwell in segment.dwell_events:
        hold_start = dwell.offset_seconds + consumed
        if wall_offset < hold_start:
            break
        if wall_offset <= hold_start + dwell.hold_seconds:
            return dwell.offset_seconds
        consumed += dwell.hold_seconds
    return wall_offset - consumed


def _interpolate(segment: Segment, u: float, frame_count: int) -> View:
    a, b = segment.start_view, segment.end_view
    cx = a.cx + u * (b.cx - a.cx)
    cy = a.cy + u * (b.cy - a.cy)
    scale = a.scale * (b.scale / a.scale) ** u
    frame = (a.frame + u * segment.frame_path) % frame_count
    frame = min(frame, float(frame_count - 1))
    return View(cx=cx, cy=cy, scale=scale, frame=frame)


def sample(timeline: Timeline, wall_time: float) -> View:
    """View at an absolute wall-clock time within the timeline."""
    if wall_time < -_EPS or wall_time > timeline.total_seconds + _EPS:
        raise InvalidArgumentError(
            f"wall time {wall_time} outside [0, {timeline.total_seconds}]"
        )
    wall_time = min(max(wall_time, 0.0), timeline.total_seconds)
    if not timeline.segments:
        return timeline.start_view

    starts = [segment.t_start for segment in timeline.segments]
    index = max(bisect_right(starts, wall_time) - 1, 0)
    segment = timeline.segments[index]
    offset = wall_time - segment.t_start
    # End first: a zero-width trailing jump sampled at its boundary must
    # land on its target, not its source.
    if offset >= segment.wall_seconds:
        return segment.end_view
    if offset <= 0:
        return segment.start_view

    active_t = _active_time(segment, offset)
    if segment.active_seconds <= 0:
        return segment.end_view
    u = active_t / segment.active_seconds
    if u <= 0:
        return segment.start_view
    if u >= 1:
        return segment.end_view
    return _interpolate(segment, u, timeline.frame_count)
