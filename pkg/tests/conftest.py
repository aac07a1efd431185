import pytest

from errandbot.cli import data_path
from errandbot.nlu import TranslatorConfig
from errandbot.world import load_landmarks, load_map

LOBBY_SEEDS = [2, 3, 54, 63, 68]


@pytest.fixture(scope="session")
def office_grid():
    return load_map(data_path("office.grid").read_text())


@pytest.fixture(scope="session")
def office_landmarks(office_grid):
    return load_landmarks(data_path("office.landmarks").read_text(), office_grid)


@pytest.fixture(scope="session")
def mock_translator():
    return TranslatorConfig()


@pytest.fixture
def office_scenario_path():
    return data_path("office.scenario")


@pytest.fixture
def lobby_scenario_path():
    return data_path("lobby.scenario")
