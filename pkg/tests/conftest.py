import pytest

from acceptance_log import LINES


def pytest_terminal_summary(terminalreporter):
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def output_root(tmp_path, monkeypatch):
    root = tmp_path / "out"
    monkeypatch.setenv("SCORCH_OUTPUT_ROOT", str(root))
    return root
