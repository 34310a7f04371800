import pytest

from hoopsight.bundle import build_bundle, save_bundle
from hoopsight.synth import make_game, write_game_files


@pytest.fixture(scope="session")
def demo_game():
    return make_game(game_id="demo", frame_count=120, seed=7)


@pytest.fixture(scope="session")
def demo_files(demo_game, tmp_path_factory):
    out = tmp_path_factory.mktemp("gamefiles")
    return write_game_files(demo_game, out)


@pytest.fixture(scope="session")
def demo_bundle(demo_game, demo_files):
    return build_bundle(
        game_id=demo_game.game_id,
        detections_path=demo_files["detections"],
        tracking_path=demo_files["tracking"],
        masks_path=demo_files["masks"],
        shots_path=demo_files["shots"],
        defense_path=demo_files["defense"],
        roster_path=demo_files["roster"],
        keypoints_path=demo_files["keypoints"],
        court_polygon=demo_game.court_polygon)


@pytest.fixture(scope="session")
def demo_bundle_dir(demo_bundle, tmp_path_factory):
    root = tmp_path_factory.mktemp("bundles")
    save_bundle(demo_bundle, root / demo_bundle.game_id)
    return root
