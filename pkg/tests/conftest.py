import pytest

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def c4():
    from csmp.graph import Graph
    from csmp.instance import Instance
    # a=0 b=1 c=2 d=3, main a->c, blocker on b
    return Instance(Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)]), ((0, 2),), (1,), 1)
