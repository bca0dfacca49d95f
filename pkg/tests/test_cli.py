import json

import pytest
from click.testing import CliRunner

from timelapse_studio.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def loop_dataset(tmp_path_factory):
    """30-frame dataset at fps 10 for the looping-transition example."""
    root = tmp_path_factory.mktemp("cli")
    runner = CliRunner()
    result = runner.invoke(
        main,
        ["fixture", str(root / "frames"), "--width", "32", "--height", "32", "--frames", "30"],
    )
    assert result.exit_code == 0, result.output
    result = runner.invoke(
        main,
        [
            "ingest", str(root / "frames"),
            "--data-dir", str(root / "data"),
            "--name", "clip",
            "--tile-size", "16",
            "--fps", "10",
        ],
    )
    assert result.exit_code == 0, result.output
    return root


def loop_tour_document():
    return {
        "version": 1,
        "dataset": "clip",
        "kind": "tour",
        "keyframes": [
            {"id": "0", "cx": 16.0, "cy": 16.0, "scale": 1, "frame": 0, "desc": ""},
            {"id": "1", "cx": 16.0, "cy": 16.0, "scale": 1, "frame": 0, "desc": ""},
        ],
        "transitions": [{"kind": "speed", "value": 1.0, "loops": 2}],
    }


class TestFixtureAndIngest:
    def test_fixture_writes_frames(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["fixture", str(tmp_path / "f"), "--width", "16", "--height", "16", "--frames", "3"],
        )
        assert result.exit_code == 0
        assert len(list((tmp_path / "f").glob("*.png"))) == 3

    def test_ingest_empty_dir_fails(self, runner, tmp_path):
        (tmp_path / "empty").mkdir()
        result = runner.invoke(
            main,
            ["ingest", str(tmp_path / "empty"), "--data-dir", str(tmp_path / "d"), "--fps", "1"],
        )
        assert result.exit_code != 0
        assert "Error" in result.output

    def test_unknown_flag_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, ["fixture", str(tmp_path / "f"), "--bogus", "1"])
        assert result.exit_code == 2

    def test_data_dir_from_environment(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("STUDIO_DATA_DIR", str(tmp_path / "envdata"))
        pytest.importorskip("PIL")
        runner.invoke(
            main,
            ["fixture", str(tmp_path / "f"), "--width", "16", "--height", "16", "--frames", "2"],
        )
        result = runner.invoke(main, ["ingest", str(tmp_path / "f"), "--fps", "2"])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "envdata" / "f" / "manifest.json").is_file()


class TestCompile:
    def test_loop_example_total_duration(self, runner, loop_dataset, tmp_path):
        tour_file = tmp_path / "tour.json"
        tour_file.write_text(json.dumps(loop_tour_document()))
        result = runner.invoke(
            main, ["compile", str(tour_file), "--data-dir", str(loop_dataset / "data")]
        )
        assert result.exit_code == 0, result.output
        assert "total 8.000 s" in result.output
        assert "time_only" in result.output
        assert "4 dwells" in result.output

    def test_report_directory_artifacts(self, runner, loop_dataset, tmp_path):
        tour_file = tmp_path / "tour.json"
        tour_file.write_text(json.dumps(loop_tour_document()))
        report_dir = tmp_path / "report"
        result = runner.invoke(
            main,
            [
                "compile", str(tour_file),
                "--data-dir", str(loop_dataset / "data"),
                "--report-dir", str(report_dir),
            ],
        )
        assert result.exit_code == 0, result.output
        csv_text = (report_dir / "segments.csv").read_text().splitlines()
        assert csv_text[0].startswith("segment,motion,active_seconds")
        assert "time_only" in csv_text[1]
        assert (report_dir / "timeline.png").stat().st_size > 0

    def test_compile_unknown_dataset_fails(self, runner, tmp_path):
        doc = loop_tour_document()
        tour_file = tmp_path / "tour.json"
        tour_file.write_text(json.dumps(doc))
        result = runner.invoke(main, ["compile", str(tour_file), "--data-dir", str(tmp_path)])
        assert result.exit_code != 0


class TestRender:
    def test_render_writes_expected_frames(self, runner, loop_dataset, tmp_path):
        doc = loop_tour_document()
        doc["transitions"] = [{"kind": "duration", "value": 0.5, "loops": 0}]
        doc["keyframes"][1]["frame"] = 10
        tour_file = tmp_path / "tour.json"
        tour_file.write_text(json.dumps(doc))
        result = runner.invoke(
            main,
            [
                "render", str(tour_file),
                "--data-dir", str(loop_dataset / "data"),
                "--output", str(tmp_path / "out"),
                "--width", "32",
                "--height", "24",
                "--output-fps", "10",
            ],
        )
        assert result.exit_code == 0, result.output
        assert len(list((tmp_path / "out").glob("frame_*.png"))) == 6


class TestCodecCommands:
    def test_encode_decode_round_trip(self, runner, tmp_path):
        doc = loop_tour_document()
        tour_file = tmp_path / "tour.json"
        tour_file.write_text(json.dumps(doc))
        encoded = runner.invoke(main, ["encode", str(tour_file)])
        assert encoded.exit_code == 0
        fragment = encoded.output.strip()
        assert fragment.startswith("tour=")

        decoded = runner.invoke(main, ["decode", fragment])
        assert decoded.exit_code == 0
        round_tripped = json.loads(decoded.output)
        assert round_tripped["dataset"] == "clip"

        re_encoded = runner.invoke(main, ["decode"], input=fragment + "\n")
        assert re_encoded.exit_code == 0
        assert re_encoded.output == decoded.output

    def test_decode_garbage_fails_cleanly(self, runner):
        result = runner.invoke(main, ["decode", "tour=@@@"])
        assert result.exit_code == 1
        assert "Error" in result.output
