import pytest

from heightrel.endo_algebra import make_quadratic_field, make_quaternion


def builtin_algebras():
    """The four reference algebras, one per Albert type."""
    return {
        "I": make_quadratic_field(5, "trivial"),
        "II": make_quaternion(1, 1, "orthogonal", (0, 1, 0, 0)),
        "III": make_quaternion(-1, -1, "canonical"),
        "IV": make_quadratic_field(-1, "conjugation"),
    }


@pytest.fixture(scope="session")
def algebras():
    return builtin_algebras()


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[number][1])
