from __future__ import annotations

import json
from pathlib import Path

import pytest

from circloop import Demand, parse_economy, parse_plan
from circloop.generate import generate_economy, top_level_demand

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

# Product ids in the fixture economy.
S, RS, PL, G, GR, B = range(6)


def load_fixture():
    return parse_economy((DATA / "fixture_economy.json").read_text())


def fixture_doc() -> dict:
    return json.loads((DATA / "fixture_economy.json").read_text())


def fixture_plan(economy):
    return parse_plan((DATA / "fixture_plan.json").read_text(), economy)


def generated(seed: int, **kwargs):
    doc = generate_economy(seed, **kwargs)
    economy = parse_economy(doc)
    demand = Demand({economy.product_ids[d["product"]]: d["units"] for d in top_level_demand(doc)})
    return economy, demand


@pytest.fixture
def fixture_economy():
    return load_fixture()


@pytest.fixture
def fixture_demand():
    return Demand({B: 1.0})


ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    """Log one acceptance line and fail the calling test if the criterion is not met."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
