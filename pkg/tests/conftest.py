import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from cbgt.model import CbgtInstance
from cbgt.systems import Uniform

from tests.instances import six_vertex_graph

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=1000, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

F = Fraction


@pytest.fixture
def example1():
    rates = [F(1, 10), F(1, 5), F(1, 2), F(1, 2), F(3, 10)]
    return CbgtInstance(tuple("abcde"), Uniform(5, 2), tuple(rates))


@pytest.fixture
def graph10():
    return six_vertex_graph()


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
