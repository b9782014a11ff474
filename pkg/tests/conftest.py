import pytest

from sonetls.instance import parse_instance

T1_TEXT = "3 3 10\n1 2 2\n2 3 3\n1 3 4\n"


def t1(capacity: int = 10):
    return parse_instance(T1_TEXT).with_capacity(capacity)


@pytest.fixture
def T1():
    return t1()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
