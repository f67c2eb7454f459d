import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
EXAMPLES = ROOT / "examples"
GOLDEN = Path(__file__).resolve().parent / "golden"
sys.path.insert(0, str(Path(__file__).resolve().parent))

from transdigraph.document import Structure  # noqa: E402
from transdigraph.syntax import parse_spec  # noqa: E402

CORPUS = sorted(p.name for p in EXAMPLES.glob("*.tdg"))


def structure(name: str, window: int = 50, text: str | None = None) -> Structure:
    if text is None:
        text = (EXAMPLES / name).read_text()
    return Structure(parse_spec(text), window=window)


@pytest.fixture
def fig1():
    return structure("fig1.tdg", window=8)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
