import math
import random

import pytest

from timelapse_studio import timeline as tl
from timelapse_studio import tours
from timelapse_studio.errors import InvalidArgumentError, InvalidTransitionError
from timelapse_studio.pyramid import DatasetManifest
from timelapse_studio.tours import Keyframe, Tour, Transition, View

from oracles import walk_dwell_steps

MANIFEST = DatasetManifest("demo", 512, 512, 256, 2, 30, 10.0)
WIDE_MANIFEST = DatasetManifest("demo", 512, 512, 256, 2, 60, 10.0)


def kf(ident, frame=0.0, cx=100.0, cy=100.0, scale=1.0, desc=""):
    return Keyframe(id=str(ident), view=View(cx=cx, cy=cy, scale=scale, frame=frame), description=desc)


def tour_of(keyframes, transitions, dataset="demo"):
    return Tour(dataset=dataset, kind=tours.TOUR, keyframes=tuple(keyframes),
                transitions=tuple(transitions))


class TestSegmentDuration:
    def test_speed_over_fifty_frames(self):
        active, path, dwells = tl.segment_duration(Transition("speed", 1.0), 50, 10.0, 60)
        assert active == pytest.approx(5.0, abs=1e-9)
        assert path == 50
        assert dwells == ()

    def test_duration_implies_speed(self):
        active, path, _ = tl.segment_duration(Transition("duration", 4.0), 20, 10.0, 60)
        assert active == pytest.approx(4.0, abs=1e-9)
        implied_speed = abs(path) / (10.0 * active)
        assert implied_speed == pytest.approx(0.5, abs=1e-9)

    def test_duration_zero_is_a_jump(self):
        active, path, dwells = tl.segment_duration(Transition("duration", 0.0), 17, 10.0, 60)
        assert active == 0.0
        assert dwells == ()
        assert path == 17

    def test_two_loops_with_equal_endpoints(self):
        active, path, dwells = tl.segment_duration(
            Transition("speed", 1.0, loops=2), 0, 10.0, 30, start_frame=0
        )
        assert path == 60
        assert active == pytest.approx(6.0, abs=1e-9)
        assert len(dwells) == 4
        total = active + sum(d.hold_seconds for d in dwells)
        assert total == pytest.approx(8.0, abs=1e-9)

    def test_dwell_offsets_follow_start_frame(self):
        for start in (0, 7, 15, 29):
            active, path, dwells = tl.segment_duration(
                Transition("speed", 1.0, loops=2), 0, 10.0, 30, start_frame=start
            )
            walker = walk_dwell_steps(start, 0, 2, 30)
            assert len(dwells) == len(walker) == 4
            step_seconds = active / path
            for dwell, step in zip(dwells, walker):
                assert dwell.offset_seconds == pytest.approx(step * step_seconds, abs=1e-9)

    def test_dwell_offsets_strictly_increasing_within_active(self):
        active, _, dwells = tl.segment_duration(
            Transition("duration", 9.0, loops=3), 5, 10.0, 12, start_frame=2
        )
        offsets = [d.offset_seconds for d in dwells]
        assert offsets == sorted(offsets)
        assert len(set(offsets)) == len(offsets)
        assert all(0 <= o <= active + 1e-9 for o in offsets)

    def test_backward_traversal_direct_and_dwell_free(self):
        active, path, dwells = tl.segment_duration(Transition("speed", 2.0), -20, 10.0, 30)
        assert path == -20
        assert active == pytest.approx(1.0, abs=1e-9)
        assert dwells == ()

    def test_loops_force_forward_wraparound(self):
        _, path, _ = tl.segment_duration(
            Transition("speed", 1.0, loops=1), -10, 10.0, 30, start_frame=15
        )
        assert path == 30 + 20

    def test_speed_without_time_movement_rejected(self):
        with pytest.raises(InvalidTransitionError, match="differing times"):
            tl.segment_duration(Transition("speed", 1.0), 0, 10.0, 30)

    def test_loops_require_two_frames(self):
        with pytest.raises(InvalidTransitionError):
            tl.segment_duration(Transition("speed", 1.0, loops=1), 0, 10.0, 1)

    def test_delta_beyond_span_rejected(self):
        with pytest.raises(InvalidArgumentError):
            tl.segment_duration(Transition("speed", 1.0), 30, 10.0, 30)


class TestDwellWalkerAgreement:
    def test_random_segments_match_brute_force_walker(self):
        rng = random.Random(929)
        for _ in range(300):
            frame_count = rng.randint(2, 40)
            start = rng.randrange(frame_count)
            end = rng.randrange(frame_count)
            loops = rng.randint(0, 3)
            fps = rng.choice([5.0, 10.0, 24.0])
            delta = end - start
            if delta == 0 and loops == 0:
                transition = Transition("duration", rng.random() * 5)
            else:
                transition = Transition("speed", 0.5 + rng.random() * 2, loops=loops)
            active, path, dwells = tl.segment_duration(
                transition, delta, fps, frame_count, start_frame=start
            )
            walker = walk_dwell_steps(start, delta, loops, frame_count)
            assert len(dwells) == len(walker)
            if path > 0 and active > 0:
                step_seconds = active / path
                for dwell, step in zip(dwells, walker):
                    assert dwell.offset_seconds == pytest.approx(
                        step * step_seconds, rel=1e-9, abs=1e-9
                    )


class TestClassifyMotion:
    def test_hold(self):
        pair = (kf(0, frame=5), kf(1, frame=5))
        assert tl.classify_motion(pair, Transition("duration", 2.0)) == tl.MotionKind.HOLD

    def test_time_only(self):
        pair = (kf(0, frame=0), kf(1, frame=50))
        assert tl.classify_motion(pair, Transition("speed", 1.0)) == tl.MotionKind.TIME_ONLY

    def test_jump_regardless_of_views(self):
        pair = (kf(0, frame=0, cx=1.0), kf(1, frame=50, cx=400.0))
        assert tl.classify_motion(pair, Transition("duration", 0.0)) == tl.MotionKind.JUMP

    def test_space_only(self):
        pair = (kf(0, frame=5, cx=0.0), kf(1, frame=5, cx=300.0))
        assert tl.classify_motion(pair, Transition("duration", 2.0)) == tl.MotionKind.SPACE_ONLY

    def test_full_motion(self):
        pair = (kf(0, frame=0, cx=0.0), kf(1, frame=9, cx=300.0))
        assert tl.classify_motion(pair, Transition("speed", 1.0)) == tl.MotionKind.FULL_MOTION

    def test_looping_same_frame_is_time_only_not_hold(self):
        pair = (kf(0, frame=5), kf(1, frame=5))
        assert (
            tl.classify_motion(pair, Transition("duration", 4.0, loops=1))
            == tl.MotionKind.TIME_ONLY
        )

    def test_speed_on_frozen_time_rejected(self):
        pair = (kf(0, frame=5), kf(1, frame=5))
        with pytest.raises(InvalidTransitionError):
            tl.classify_motion(pair, Transition("speed", 1.0))


class TestCompileTour:
    def test_hold_segment_total(self):
        tour = tour_of([kf(0, frame=3), kf(1, frame=3)], [Transition("duration", 3.0)])
        compiled = tl.compile_tour(tour, MANIFEST)
        assert compiled.total_seconds == pytest.approx(3.0, abs=1e-9)
        assert len(compiled.segments) == 1

    def test_jump_gap_contributes_nothing(self):
        tour = tour_of(
            [kf(0, frame=0), kf(1, frame=20), kf(2, frame=5, cx=50.0)],
            [Transition("duration", 5.0), Transition("duration", 0.0)],
        )
        compiled = tl.compile_tour(tour, MANIFEST)
        assert compiled.total_seconds == pytest.approx(5.0, abs=1e-9)
        assert compiled.segments[1].active_seconds == 0.0

    def test_single_keyframe_timeline(self):
        tour = tour_of([kf(0, frame=7, cx=42.0)], [])
        compiled = tl.compile_tour(tour, MANIFEST)
        assert compiled.total_seconds == 0.0
        assert compiled.segments == ()
        assert tl.sample(compiled, 0.0) == tour.keyframes[0].view

    def test_empty_tour_rejected(self):
        with pytest.raises(InvalidArgumentError):
            tl.compile_tour(Tour(dataset="demo"), MANIFEST)

    def test_slideshow_rejected(self):
        show = Tour(dataset="demo", kind=tours.SLIDESHOW, keyframes=(kf(0),))
        with pytest.raises(InvalidArgumentError):
            tl.compile_tour(show, MANIFEST)

    def test_invalid_transition_tagged_with_gap(self):
        tour = tour_of(
            [kf(0, frame=0), kf(1, frame=10), kf(2, frame=10)],
            [Transition("speed", 1.0), Transition("speed", 1.0)],
        )
        with pytest.raises(InvalidTransitionError, match="gap 1") as exc_info:
            tl.compile_tour(tour, MANIFEST)
        assert exc_info.value.gap_index == 1

    def test_segments_are_contiguous(self):
        tour = tour_of(
            [kf(0, frame=0), kf(1, frame=29), kf(2, frame=29, cx=400.0)],
            [Transition("speed", 1.0, loops=1), Transition("duration", 2.0)],
        )
        compiled = tl.compile_tour(tour, MANIFEST)
        for earlier, later in zip(compiled.segments, compiled.segments[1:]):
            assert later.t_start == earlier.t_end

    def test_total_includes_dwell_time(self):
        tour = tour_of([kf(0, frame=0), kf(1, frame=0)], [Transition("speed", 1.0, loops=2)])
        compiled = tl.compile_tour(tour, MANIFEST)
        assert compiled.total_seconds == pytest.approx(8.0, abs=1e-9)


class TestSample:
    def test_boundaries_exact(self):
        tour = tour_of(
            [kf(0, frame=0, cx=10.0, scale=0.5), kf(1, frame=20, cx=400.0, scale=2.0)],
            [Transition("speed", 1.0)],
        )
        compiled = tl.compile_tour(tour, MANIFEST)
        assert tl.sample(compiled, 0.0) == tour.keyframes[0].view
        assert tl.sample(compiled, compiled.total_seconds) == tour.keyframes[1].view

    def test_same_location_midpoint_keeps_space(self):
        tour = tour_of(
            [kf(0, frame=0, cx=77.0, cy=33.0, scale=0.75), kf(1, frame=20, cx=77.0, cy=33.0, scale=0.75)],
            [Transition("speed", 1.0)],
        )
        compiled = tl.compile_tour(tour, MANIFEST)
        mid = tl.sample(compiled, compiled.total_seconds / 2)
        assert (mid.cx, mid.cy, mid.scale) == (77.0, 33.0, 0.75)
        assert mid.frame == pytest.approx(10.0, abs=1e-9)

    def test_same_time_midpoint_keeps_frame(self):
        tour = tour_of(
            [kf(0, frame=12, cx=0.0), kf(1, frame=12, cx=300.0)],
            [Transition("duration", 4.0)],
        )
        compiled = tl.compile_tour(tour, MANIFEST)
        mid = tl.sample(compiled, 2.0)
        assert mid.frame == 12.0
        assert mid.cx == pytest.approx(150.0, abs=1e-9)

    def test_scale_interpolates_geometrically(self):
        tour = tour_of(
            [kf(0, frame=0, scale=0.25), kf(1, frame=20, scale=1.0)],
            [Transition("speed", 1.0)],
        )
        compiled = tl.compile_tour(tour, MANIFEST)
        mid = tl.sample(compiled, compiled.total_seconds / 2)
        assert mid.scale == pytest.approx(0.5, rel=1e-9)

    def test_dwell_freezes_everything(self):
        tour = tour_of(
            [kf(0, frame=0, cx=0.0, scale=0.5), kf(1, frame=0, cx=200.0, scale=2.0)],
            [Transition("speed", 1.0, loops=1)],
        )
        compiled = tl.compile_tour(tour, MANIFEST)
        segment = compiled.segments[0]
        assert len(segment.dwell_events) == 2
        dwell = segment.dwell_events[0]
        hold_start = segment.t_start + dwell.offset_seconds
        inside = [tl.sample(compiled, hold_start + f * dwell.hold_seconds) for f in (0.0, 0.3, 0.9)]
        assert inside[0] == inside[1] == inside[2]
        assert inside[0].frame == 29.0

    def test_frame_wraps_and_clamps(self):
        tour = tour_of([kf(0, frame=10), kf(1, frame=10)], [Transition("speed", 1.0, loops=1)])
        compiled = tl.compile_tour(tour, MANIFEST)
        segment = compiled.segments[0]
        # just before the wrap: frame approaches 29 from below and is
        # clamped to at most frame_count - 1 between 29 and 0
        wall = segment.dwell_events[0].offset_seconds + 0.25 * segment.dwell_events[0].hold_seconds
        view = tl.sample(compiled, wall)
        assert view.frame <= 29.0

    def test_out_of_range_rejected(self):
        tour = tour_of([kf(0, frame=0), kf(1, frame=10)], [Transition("speed", 1.0)])
        compiled = tl.compile_tour(tour, MANIFEST)
        with pytest.raises(InvalidArgumentError):
            tl.sample(compiled, -0.5)
        with pytest.raises(InvalidArgumentError):
            tl.sample(compiled, compiled.total_seconds + 0.5)

    def test_boundary_returns_later_segment_start(self):
        tour = tour_of(
            [kf(0, frame=0), kf(1, frame=20), kf(2, frame=5, cx=360.0), kf(3, frame=15, cx=360.0)],
            [Transition("duration", 5.0), Transition("duration", 0.0), Transition("duration", 5.0)],
        )
        compiled = tl.compile_tour(tour, MANIFEST)
        at_jump = tl.sample(compiled, 5.0)
        assert at_jump == tour.keyframes[2].view
        just_past = tl.sample(compiled, 5.0 + 1e-6)
        assert just_past.cx == pytest.approx(360.0, abs=1e-3)

    def test_monotone_frame_in_forward_segment(self):
        tour = tour_of([kf(0, frame=3), kf(1, frame=27)], [Transition("speed", 0.8)])
        compiled = tl.compile_tour(tour, MANIFEST)
        frames = [
            tl.sample(compiled, compiled.total_seconds * i / 200).frame for i in range(201)
        ]
        assert all(a <= b + 1e-12 for a, b in zip(frames, frames[1:]))


class TestDualityProperty:
    def test_speed_and_equivalent_duration_sample_identically(self):
        rng = random.Random(1217)
        for _ in range(50):
            frame_count = rng.randint(2, 60)
            start = rng.randrange(frame_count)
            end = rng.randrange(frame_count)
            loops = rng.randint(0, 2)
            if end == start and loops == 0:
                continue
            speed = 0.25 + rng.random() * 3
            manifest = DatasetManifest("demo", 512, 512, 256, 2, frame_count, 10.0)
            a = kf(0, frame=start, cx=rng.random() * 500, scale=2 ** (rng.random() * 4 - 2))
            b = kf(1, frame=end, cx=rng.random() * 500, scale=2 ** (rng.random() * 4 - 2))
            by_speed = tl.compile_tour(
                tour_of([a, b], [Transition("speed", speed, loops=loops)]), manifest
            )
            implied_duration = by_speed.segments[0].active_seconds
            by_duration = tl.compile_tour(
                tour_of([a, b], [Transition("duration", implied_duration, loops=loops)]),
                manifest,
            )
            assert by_duration.total_seconds == pytest.approx(
                by_speed.total_seconds, rel=1e-12
            )
            for i in range(101):
                t = by_speed.total_seconds * i / 100
                va = tl.sample(by_speed, t)
                vb = tl.sample(by_duration, t)
                assert va.cx == pytest.approx(vb.cx, rel=1e-9, abs=1e-9)
                assert va.cy == pytest.approx(vb.cy, rel=1e-9, abs=1e-9)
                assert va.scale == pytest.approx(vb.scale, rel=1e-9)
                assert va.frame == pytest.approx(vb.frame, rel=1e-9, abs=1e-9)


class TestFlyTo:
    def test_degenerate_fly_is_a_two_second_hold(self):
        view = View(cx=50.0, cy=60.0, scale=1.5, frame=4.0)
        flight = tl.fly_to(view, Keyframe(id="9", view=view), MANIFEST)
        assert flight.total_seconds == 2.0
        for t in (0.0, 0.77, 2.0):
            assert tl.sample(flight, t) == view

    def test_endpoints_exact(self):
        current = View(cx=10.0, cy=10.0, scale=0.5, frame=2.5)
        target = Keyframe(id="9", view=View(cx=400.0, cy=300.0, scale=4.0, frame=20.0))
        flight = tl.fly_to(current, target, MANIFEST)
        assert tl.sample(flight, 0.0) == current
        assert tl.sample(flight, 2.0) == target.view

    def test_midpoint_scale_is_geometric_mean(self):
        current = View(cx=0.0, cy=0.0, scale=0.25, frame=0.0)
        target = Keyframe(id="9", view=View(cx=100.0, cy=0.0, scale=4.0, frame=0.0))
        flight = tl.fly_to(current, target, MANIFEST)
        mid = tl.sample(flight, 1.0)
        assert mid.scale == pytest.approx(math.sqrt(0.25 * 4.0), rel=1e-9)
        assert mid.frame == 0.0

    def test_fly_never_dwells_even_onto_last_frame(self):
        current = View(cx=0.0, cy=0.0, scale=1.0, frame=10.0)
        target = Keyframe(id="9", view=View(cx=0.0, cy=0.0, scale=1.0, frame=29.0))
        flight = tl.fly_to(current, target, MANIFEST)
        assert flight.total_seconds == 2.0
        assert flight.segments[0].dwell_events == ()


def random_valid_tour(rng, frame_count, keyframe_count):
    keyframes = []
    for i in range(keyframe_count):
        keyframes.append(
            kf(
                i,
                frame=float(rng.randrange(frame_count)),
                cx=rng.random() * 512,
                cy=rng.random() * 512,
                scale=2 ** (rng.random() * 6 - 4),
            )
        )
    transitions = []
    for a, b in zip(keyframes, keyframes[1:]):
        loops = rng.choice([0, 0, 0, 1, 2])
        if rng.random() < 0.5 and (a.view.frame != b.view.frame or loops > 0):
            transitions.append(Transition("speed", 0.25 + rng.random() * 2, loops=loops))
        else:
            value = rng.choice([0.0, rng.random() * 6, rng.random() * 6])
            transitions.append(Transition("duration", value, loops=loops))
    return tour_of(keyframes, transitions)


class TestRandomTourProperties:
    def test_boundary_exactness_and_motion_invariants(self):
        rng = random.Random(8080)
        for _ in range(120):
            frame_count = rng.randint(2, 60)
            manifest = DatasetManifest("demo", 512, 512, 256, 2, frame_count, 10.0)
            tour = random_valid_tour(rng, frame_count, rng.randint(2, 6))
            compiled = tl.compile_tour(tour, manifest)

            # boundary exactness at every keyframe; an instantaneous jump
            # collapses its endpoints onto one instant, at which the later
            # segment's start view (the jump target) is the sampled view
            boundaries = [0.0] + [segment.t_end for segment in compiled.segments]
            for index, boundary in enumerate(boundaries):
                terminal = index
                while (
                    terminal < len(compiled.segments)
                    and compiled.segments[terminal].wall_seconds == 0
                ):
                    terminal += 1
                got = tl.sample(compiled, boundary)
                want = tour.keyframes[terminal].view
                assert got.cx == pytest.approx(want.cx, rel=1e-9, abs=1e-9)
                assert got.cy == pytest.approx(want.cy, rel=1e-9, abs=1e-9)
                assert got.scale == pytest.approx(want.scale, rel=1e-9)
                assert got.frame == pytest.approx(want.frame, rel=1e-9, abs=1e-9)

            # per-segment constancy per motion kind
            for i, segment in enumerate(compiled.segments):
                kind = tl.classify_motion(
                    (tour.keyframes[i], tour.keyframes[i + 1]), tour.transitions[i]
                )
                if segment.wall_seconds == 0:
                    assert kind == tl.MotionKind.JUMP
                    continue
                points = [
                    tl.sample(compiled, segment.t_start + segment.wall_seconds * u)
                    for u in (0.1, 0.35, 0.62, 0.9)
                ]
                first = tour.keyframes[i].view
                if kind in (tl.MotionKind.TIME_ONLY, tl.MotionKind.HOLD):
                    for view in points:
                        assert (view.cx, view.cy, view.scale) == (
                            first.cx,
                            first.cy,
                            first.scale,
                        )
                if kind in (tl.MotionKind.SPACE_ONLY, tl.MotionKind.HOLD):
                    for view in points:
                        assert view.frame == first.frame

    def test_dwell_accounting_matches_walker(self):
        rng = random.Random(606)
        for _ in range(80):
            frame_count = rng.randint(2, 40)
            manifest = DatasetManifest("demo", 512, 512, 256, 2, frame_count, 10.0)
            tour = random_valid_tour(rng, frame_count, rng.randint(2, 5))
            compiled = tl.compile_tour(tour, manifest)
            active_total = sum(segment.active_seconds for segment in compiled.segments)
            dwell_count = sum(len(segment.dwell_events) for segment in compiled.segments)
            assert compiled.total_seconds == pytest.approx(
                active_total + 0.5 * dwell_count, rel=1e-12, abs=1e-9
            )
            for i, segment in enumerate(compiled.segments):
                if segment.active_seconds == 0:
                    assert segment.dwell_events == ()
                    continue
                a, b = tour.keyframes[i], tour.keyframes[i + 1]
                walker = walk_dwell_steps(
                    int(a.view.frame),
                    int(b.view.frame - a.view.frame),
                    tour.transitions[i].loops,
                    frame_count,
                )
                assert len(segment.dwell_events) == len(walker)
