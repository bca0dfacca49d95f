"""Keyframes, transitions, tours, and the editor's list operations.

Tours are immutable values: every operation returns a new ``Tour`` and
leaves the input untouched, so replaying an edit sequence from the same
start always produces a value-equal result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InvalidArgumentError, InvalidStateError, NotFoundError
from .pyramid import DatasetManifest

TOUR = "tour"
SLIDESHOW = "slideshow"

SPEED = "speed"
DURATION = "duration"


@dataclass(frozen=True)
class View:
    """Complete camera state: center, zoom, and time position.

    ``scale`` is screen pixels per native dataset pixel (1.0 = 1:1).
    ``frame`` is a real frame index; authored keyframes hold integers but
    sampling an animation produces fractional positions.
    """

    cx: float
    cy: float
    scale: float
    frame: float

    def __post_init__(self):
        for name in ("cx", "cy", "scale", "frame"):
            value = getattr(self, name)
            object.__setattr__(self, name, float(value))
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"view {name} must be finite")
        if not self.scale > 0:
            raise InvalidArgumentError(f"view scale must be positive, got {self.scale}")
        if self.frame < 0:
            raise InvalidArgumentError(f"view frame must be >= 0, got {self.frame}")


def validate_view(view: View, manifest: DatasetManifest) -> None:
    if view.frame > manifest.frame_count - 1:
        raise InvalidArgumentError(
            f"view frame {view.frame} exceeds last frame {manifest.frame_count - 1}"
        )


@dataclass(frozen=True)
class Keyframe:
    id: str
    view: View
    description: str = ""


@dataclass(frozen=True)
class Transition:
    """How one keyframe gap plays back.

    kind="speed": value is the playback rate relative to the native frame
    rate (1.0 = 100%), and the wall duration follows from it.
    kind="duration": value is the wall duration in seconds (0 = jump), and
    the playback rate follows.  ``loops`` adds that many full passes
    through the entire timelapse before settling on the target frame.
    """

    kind: str
    value: float
    loops: int = 0

    def __post_init__(self):
        if self.kind not in (SPEED, DURATION):
            raise InvalidArgumentError(f"transition kind must be speed|duration, got {self.kind!r}")
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise InvalidArgumentError("transition value must be finite")
        if self.kind == SPEED and not self.value > 0:
            raise InvalidArgumentError(f"speed transition requires value > 0, got {self.value}")
        if self.kind == DURATION and self.value < 0:
            raise InvalidArgumentError(f"duration transition requires value >= 0, got {self.value}")
        if not isinstance(self.loops, int) or isinstance(self.loops, bool) or self.loops < 0:
            raise InvalidArgumentError(f"loops must be a non-negative integer, got {self.loops!r}")


DEFAULT_TRANSITION = Transition(SPEED, 1.0, 0)


@dataclass(frozen=True)
class Tour:
    """An ordered keyframe story: a guided tour or an interactive slideshow.

    Tours carry one transition per keyframe gap; slideshows carry none.
    """

    dataset: str
    kind: str = TOUR
    keyframes: tuple[Keyframe, ...] = ()
    transitions: tuple[Transition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "keyframes", tuple(self.keyframes))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if self.kind not in (TOUR, SLIDESHOW):
            raise InvalidArgumentError(f"tour kind must be tour|slideshow, got {self.kind!r}")
        if self.kind == SLIDESHOW:
            if self.transitions:
                raise InvalidArgumentError("slideshows carry no transitions")
        elif len(self.transitions) != max(0, len(self.keyframes) - 1):
            raise InvalidArgumentError(
                f"tour with {len(self.keyframes)} keyframes needs "
                f"{max(0, len(self.keyframes) - 1)} transitions, got {len(self.transitions)}"
            )
        seen = set()
        for kf in self.keyframes:
            if kf.id in seen:
                raise InvalidArgumentError(f"duplicate keyframe id {kf.id!r}")
            seen.add(kf.id)

    def index_of(self, keyframe_id: str) -> int:
        for i, kf in enumerate(self.keyframes):
            if kf.id == keyframe_id:
                return i
        raise NotFoundError(f"no keyframe with id {keyframe_id!r}")


def _fresh_id(tour: Tour) -> str:
    numeric = [int(kf.id) for kf in tour.keyframes if kf.id.isdigit()]
    return str(max(numeric) + 1 if numeric else 0)


def _checked_view(tour: Tour, view: View, manifest: DatasetManifest | None) -> View:
    if manifest is not None:
        if manifest.name != tour.dataset:
            raise InvalidArgumentError(
                f"manifest {manifest.name!r} does not match tour dataset {tour.dataset!r}"
            )
        validate_view(view, manifest)
    return view


def add_keyframe(tour: Tour, view: View, at: int | None = None,
                 manifest: DatasetManifest | None = None) -> Tour:
    """Insert a keyframe capturing ``view`` (append when ``at`` is omitted).

    In a tour, the inserted keyframe's incoming gap receives the default
    100%-speed transition; inserting at the front puts the default on its
    outgoing gap instead.  The displaced transition stays with its
    destination keyframe.
    """
    view = _checked_view(tour, view, manifest)
    n = len(tour.keyframes)
    if at is None:
        at = n
    if not 0 <= at <= n:
        raise InvalidArgumentError(f"insert index {at} out of range [0, {n}]")
    kf = Keyframe(id=_fresh_id(tour), view=view)
    keyframes = tour.keyframes[:at] + (kf,) + tour.keyframes[at:]
    transitions = tour.transitions
    if tour.kind == TOUR and n >= 1:
        gap = max(at - 1, 0)
        transitions = transitions[:gap] + (DEFAULT_TRANSITION,) + transitions[gap:]
    return replace(tour, keyframes=keyframes, transitions=transitions)


def delete_keyframe(tour: Tour, keyframe_id: str) -> Tour:
    """Remove a keyframe; the two transitions flanking it collapse to the
    earlier one (an end keyframe just drops its single adjacent gap)."""
    i = tour.index_of(keyframe_id)
    keyframes = tour.keyframes[:i] + tour.keyframes[i + 1 :]
    transitions = list(tour.transitions)
    if transitions:
        transitions.pop(i if i < len(transitions) else i - 1)
    return replace(tour, keyframes=keyframes, transitions=tuple(transitions))


def move_keyframe(tour: Tour, keyframe_id: str, to: int) -> Tour:
    """Reorder one keyframe.  Transitions stay attached to gap positions,
    so reordering never invents or loses transition values."""
    i = tour.index_of(keyframe_id)
    n = len(tour.keyframes)
    if not 0 <= to <= n - 1:
        raise InvalidArgumentError(f"move index {to} out of range [0, {n - 1}]")
    keyframes = list(tour.keyframes)
    kf = keyframes.pop(i)
    keyframes.insert(to, kf)
    return replace(tour, keyframes=tuple(keyframes))


def duplicate_keyframe(tour: Tour, keyframe_id: str) -> Tour:
    """Clone a keyframe immediately after itself.  The gap between the
    original and the copy gets the default transition; the copy inherits
    the original's outgoing transition."""
    i = tour.index_of(keyframe_id)
    original = tour.keyframes[i]
    copy = Keyframe(id=_fresh_id(tour), view=original.view, description=original.description)
    keyframes = tour.keyframes[: i + 1] + (copy,) + tour.keyframes[i + 1 :]
    transitions = tour.transitions
    if tour.kind == TOUR:
        transitions = transitions[:i] + (DEFAULT_TRANSITION,) + transitions[i:]
    return replace(tour, keyframes=keyframes, transitions=transitions)


def update_keyframe_view(tour: Tour, keyframe_id: str, view: View,
                         manifest: DatasetManifest | None = None) -> Tour:
    view = _checked_view(tour, view, manifest)
    i = tour.index_of(keyframe_id)
    updated = replace(tour.keyframes[i], view=view)
    return replace(tour, keyframes=tour.keyframes[:i] + (updated,) + tour.keyframes[i + 1 :])


def set_description(tour: Tour, keyframe_id: str, text: str) -> Tour:
    i = tour.index_of(keyframe_id)
    updated = replace(tour.keyframes[i], description=text)
    return replace(tour, keyframes=tour.keyframes[:i] + (updated,) + tour.keyframes[i + 1 :])


def set_transition(tour: Tour, gap_index: int, transition: Transition) -> Tour:
    if tour.kind == SLIDESHOW:
        raise InvalidStateError("slideshows have no transitions to set")
    if not 0 <= gap_index < len(tour.transitions):
        raise InvalidArgumentError(
            f"gap index {gap_index} out of range [0, {len(tour.transitions)})"
        )
    transitions = (
        tour.transitions[:gap_index] + (transition,) + tour.transitions[gap_index + 1 :]
    )
    return replace(tour, transitions=transitions)
