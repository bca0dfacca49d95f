import random
from pathlib import Path

import pytest

from timelapse_studio import codec, tours
from timelapse_studio.errors import (
    DecodeError,
    UnsupportedVersionError,
    ValidationError,
)
from timelapse_studio.pyramid import DatasetManifest
from timelapse_studio.tours import Keyframe, Tour, Transition, View

DATA = Path(__file__).parent / "data"

MANIFEST = DatasetManifest("harbor", 2048, 1536, 256, 4, 30, 10.0)


def golden_tour():
    return Tour(
        dataset="harbor",
        kind="tour",
        keyframes=(
            Keyframe(id="0", view=View(512, 384, 0.5, 0), description="Overview of the harbor"),
            Keyframe(
                id="1",
                view=View(900.25, 210.5, 2.0, 29),
                description="Crane unloading at quai n°3",
            ),
        ),
        transitions=(Transition("speed", 1.5, loops=1),),
    )


def random_tour(rng):
    count = rng.randint(1, 6)
    kind = rng.choice([tours.TOUR, tours.SLIDESHOW])
    keyframes = []
    for i in range(count):
        keyframes.append(
            Keyframe(
                id=str(i),
                view=View(
                    cx=rng.uniform(-100, 2000),
                    cy=rng.uniform(-100, 2000),
                    scale=2 ** rng.uniform(-8, 4),
                    frame=float(rng.randrange(30)),
                ),
                description=rng.choice(["", "note", "tåke över 火山", "a b c"]),
            )
        )
    transitions = []
    if kind == tours.TOUR:
        for a, b in zip(keyframes, keyframes[1:]):
            loops = rng.choice([0, 0, 1, 3])
            if rng.random() < 0.5 and (a.view.frame != b.view.frame or loops):
                transitions.append(Transition("speed", rng.uniform(0.1, 4), loops=loops))
            else:
                transitions.append(
                    Transition("duration", rng.choice([0.0, rng.uniform(0, 9)]), loops=loops)
                )
    return Tour(dataset="harbor", kind=kind, keyframes=tuple(keyframes),
                transitions=tuple(transitions))


class TestFormatReal:
    def test_integral_drops_point(self):
        assert codec.format_real(512.0) == "512"
        assert codec.format_real(-3.0) == "-3"
        assert codec.format_real(0.0) == "0"

    def test_fractional_shortest_round_trip(self):
        assert codec.format_real(0.5) == "0.5"
        assert codec.format_real(900.25) == "900.25"
        assert float(codec.format_real(0.1)) == 0.1


class TestGolden:
    def test_fragment_matches_independent_serializer_output(self):
        committed = (DATA / "golden_tour_fragment.txt").read_text().strip()
        assert codec.encode_tour(golden_tour()) == committed

    def test_canonical_bytes_match_committed_document(self):
        committed = (DATA / "golden_tour_canonical.json").read_text(encoding="utf-8").strip()
        document = codec.tour_to_document(golden_tour())
        assert codec.canonical_bytes(document).decode("utf-8") == committed

    def test_golden_fragment_decodes_to_the_tour(self):
        committed = (DATA / "golden_tour_fragment.txt").read_text().strip()
        assert codec.decode_tour(committed, MANIFEST) == golden_tour()


class TestTourRoundTrip:
    def test_thousand_random_tours(self):
        rng = random.Random(20120623)
        for _ in range(1000):
            tour = random_tour(rng)
            fragment = codec.encode_tour(tour)
            assert codec.decode_tour(fragment) == tour

    def test_value_equal_tours_encode_identically(self):
        a = golden_tour()
        b = golden_tour()
        assert a is not b
        assert codec.encode_tour(a) == codec.encode_tour(b)

    def test_canonical_fragment_reencodes_identically(self):
        fragment = codec.encode_tour(golden_tour())
        assert codec.encode_tour(codec.decode_tour(fragment)) == fragment


class TestDecodeErrors:
    def test_truncated_base64(self):
        fragment = codec.encode_tour(golden_tour())
        with pytest.raises(DecodeError):
            codec.decode_tour(fragment[: len(fragment) // 2] + "!!!")

    def test_wrong_prefix(self):
        with pytest.raises(DecodeError):
            codec.decode_tour("view=abc")

    def test_non_json_payload(self):
        import base64

        junk = "tour=" + base64.urlsafe_b64encode(b"not json").rstrip(b"=").decode()
        with pytest.raises(DecodeError):
            codec.decode_tour(junk)

    def test_unknown_version(self):
        doc = codec.tour_to_document(golden_tour())
        doc["version"] = 99
        fragment = "tour=" + codec._b64encode(codec.canonical_bytes(doc))
        with pytest.raises(UnsupportedVersionError):
            codec.decode_tour(fragment)

    def test_transition_length_mismatch(self):
        doc = codec.tour_to_document(golden_tour())
        doc["transitions"] = []
        fragment = "tour=" + codec._b64encode(codec.canonical_bytes(doc))
        with pytest.raises(ValidationError):
            codec.decode_tour(fragment)

    def test_validation_names_the_field(self):
        doc = codec.tour_to_document(golden_tour())
        doc["keyframes"][1]["scale"] = -2
        fragment = "tour=" + codec._b64encode(codec.canonical_bytes(doc))
        with pytest.raises(ValidationError, match=r"keyframes\[1\]"):
            codec.decode_tour(fragment)

    def test_missing_field_named(self):
        doc = codec.tour_to_document(golden_tour())
        del doc["keyframes"][0]["cx"]
        fragment = "tour=" + codec._b64encode(codec.canonical_bytes(doc))
        with pytest.raises(ValidationError, match="cx"):
            codec.decode_tour(fragment)

    def test_frame_beyond_manifest_rejected(self):
        doc = codec.tour_to_document(golden_tour())
        doc["keyframes"][0]["frame"] = 99
        fragment = "tour=" + codec._b64encode(codec.canonical_bytes(doc))
        codec.decode_tour(fragment)  # structurally fine without a manifest
        with pytest.raises(ValidationError, match=r"keyframes\[0\]"):
            codec.decode_tour(fragment, MANIFEST)


class TestViewFragments:
    def test_integral_formatting_contract(self):
        assert codec.encode_view(View(512, 512, 1, 0)) == "v=512,512,1&t=0"

    def test_round_trip_random_views(self):
        rng = random.Random(7)
        for _ in range(300):
            view = View(
                cx=rng.uniform(-1e4, 1e4),
                cy=rng.uniform(-1e4, 1e4),
                scale=2 ** rng.uniform(-10, 6),
                frame=rng.choice([float(rng.randrange(100)), rng.uniform(0, 99)]),
            )
            assert codec.decode_view(codec.encode_view(view)) == view

    def test_missing_scale_rejected(self):
        with pytest.raises(DecodeError):
            codec.decode_view("v=1,2&t=0")

    def test_malformed_number_rejected(self):
        with pytest.raises(DecodeError):
            codec.decode_view("v=1,2,abc&t=0")

    def test_range_checked_against_manifest(self):
        with pytest.raises(DecodeError):
            codec.decode_view("v=1,2,1&t=500", MANIFEST)
