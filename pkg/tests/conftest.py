import hypothesis.strategies as st
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

unit_rationals = st.fractions(min_value=0, max_value=1, max_denominator=3**7 * 16)
unit_points = st.tuples(unit_rationals, unit_rationals)
levels = st.integers(min_value=1, max_value=6)


_acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.module.__name__.endswith("test_acceptance"):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _acceptance.append(f"{'PASS' if rep.passed else 'FAIL'}  {doc}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance:
            terminalreporter.write_line(line)
