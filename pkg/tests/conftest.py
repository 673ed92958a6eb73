import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from geocontext import DEFAULT_CONFIG, fixtures
from geocontext.geotext import Gazetteer


@pytest.fixture(scope="session")
def landmarks():
    return fixtures.build_landmarks(100)


@pytest.fixture(scope="session")
def fixture_store(landmarks):
    return fixtures.build_store(landmarks, DEFAULT_CONFIG)


@pytest.fixture(scope="session")
def fixture_gazetteer(landmarks):
    return Gazetteer.from_records(landmarks)
