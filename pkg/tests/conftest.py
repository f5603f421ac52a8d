from __future__ import annotations

from pathlib import Path

import pytest

from knowhow import Model, parse_model

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def load_model(name: str) -> Model:
    return parse_model((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def ex1() -> Model:
    return load_model("ex1.lts")


@pytest.fixture(scope="session")
def ex2_left() -> Model:
    return load_model("ex2-left.lts")


@pytest.fixture(scope="session")
def ex2_right() -> Model:
    return load_model("ex2-right.lts")
