import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from testlimits import build_model

HERE = Path(__file__).parent
DATA = HERE / "data"
STUBS = HERE / "stubs"

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def stub(name):
    return str(STUBS / name)


@pytest.fixture
def diamond():
    return build_model(
        ["bot", "a", "b", "top"],
        [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
        "bot",
        "top",
    )


@pytest.fixture
def chain5():
    names = ["bot", "s1", "s2", "s3", "top"]
    return build_model(names, list(zip(names, names[1:])), "bot", "top")
