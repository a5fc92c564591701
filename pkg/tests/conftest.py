"""Shared test plumbing: the acceptance-criteria scoreboard.

Acceptance tests report their verdict through the `criterion` fixture;
the collected lines are printed as a section at the end of the pytest
run, one line per criterion, so a full-suite log shows the whole
scoreboard at a glance.
"""

import pytest

_DESCRIPTIONS = {
    1: "coupled thermoelastic energy decay on the held cracked square",
    2: "mechanical fracture energy decay with nonnegative damage dissipation",
    3: "frozen-temperature fracture energy decay (thermoelastic driver)",
    4: "fully coupled fracture energy decay, both dissipations nonnegative",
    5: "three models coincide when coupling and thermal data vanish",
    6: "damage irreversible and bounded on every acceptance run",
    7: "crack speed ordering across the three fracture models",
    8: "surface energy at fixed time nondecreasing in coupling strength",
    9: "thermal sign pattern and energy-density ordering on the L-shape",
    10: "near-tip dilatation matches the analytic angular profile",
    11: "manufactured-solution convergence orders and assembly oracles",
    12: "crack path curvature grows with the imposed thermal gradient",
}

_RESULTS: dict[int, tuple[str, str]] = {}


def _check(num: int, passed: bool, detail: str = "") -> None:
    _RESULTS[num] = ("PASS" if passed else "FAIL", detail)
    assert passed, f"criterion {num} ({_DESCRIPTIONS[num]}): {detail}"


@pytest.fixture
def criterion():
    """Record one acceptance verdict and assert it."""
    return _check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc in sorted(_DESCRIPTIONS.items()):
        verdict, detail = _RESULTS.get(num, ("not run", ""))
        line = f"{num:>2}  {desc:<68} {verdict}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
