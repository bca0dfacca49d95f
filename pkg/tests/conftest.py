import pytest

from timelapse_studio import pyramid


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """256x160, 6 frames, tile 64 (3 levels): quick general-purpose pyramid."""
    root = tmp_path_factory.mktemp("small")
    pyramid.generate_fixture(256, 160, 6, root / "frames")
    manifest = pyramid.ingest_frames(
        root / "frames", root / "data", "small", tile_size=64, fps=10.0
    )
    return root / "data", manifest


@pytest.fixture(scope="session")
def odd_dataset(tmp_path_factory):
    """101x67, 5 frames, tile 32: odd dimensions exercise edge blocks."""
    root = tmp_path_factory.mktemp("odd")
    pyramid.generate_fixture(101, 67, 5, root / "frames")
    manifest = pyramid.ingest_frames(
        root / "frames", root / "data", "odd", tile_size=32, fps=4.0
    )
    return root / "data", manifest


@pytest.fixture(scope="session")
def acceptance_dataset(tmp_path_factory):
    """The desk-scale synthetic timelapse: 1024x1024, 60 frames, fps 10, tile 128."""
    root = tmp_path_factory.mktemp("acceptance")
    pyramid.generate_fixture(1024, 1024, 60, root / "frames")
    manifest = pyramid.ingest_frames(
        root / "frames", root / "data", "fixture", tile_size=128, fps=10.0
    )
    return root / "data", manifest
