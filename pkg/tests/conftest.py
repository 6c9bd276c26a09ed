import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import FRAGMENT_TEXT, TINY_W_TEXT, tiny_w  # noqa: E402


@pytest.fixture
def tiny():
    return tiny_w()


@pytest.fixture
def tiny_text():
    return TINY_W_TEXT


@pytest.fixture
def fragment_text():
    return FRAGMENT_TEXT


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
