from pathlib import Path

import pytest

from sosakit import parse_jsonld, parse_turtle

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load(name: str):
    text = (FIXTURES / name).read_text(encoding="utf-8")
    return parse_jsonld(text) if name.endswith(".jsonld") else parse_turtle(text)


@pytest.fixture
def fixture_graph():
    return load
