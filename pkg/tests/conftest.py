import json
import re
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from subnormal.moments import AtomicMeasure
from subnormal.mspace import MeasureSpace, SelfMap

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_acceptance: dict[int, list[bool]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    m = _CRITERION.search(report.nodeid)
    if m and "test_acceptance" in report.nodeid:
        _acceptance.setdefault(int(m.group(1)), []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        outcomes = _acceptance[number]
        status = "PASS" if all(outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status} ({sum(outcomes)}/{len(outcomes)} tests)")


# shared strategies -----------------------------------------------------------

positive_fractions = st.builds(
    Fraction, st.integers(min_value=1, max_value=40), st.integers(min_value=1, max_value=12)
)


@st.composite
def finite_systems(draw, max_points: int = 12):
    """Complete finite spaces: every point has an image, positive rational masses."""
    n = draw(st.integers(min_value=1, max_value=max_points))
    masses = {i: draw(positive_fractions) for i in range(n)}
    image = {i: draw(st.integers(min_value=0, max_value=n - 1)) for i in range(n)}
    return MeasureSpace.from_masses(masses), SelfMap(image)


@st.composite
def atomic_measures(draw, max_atoms: int = 4, allow_zero: bool = False):
    k = draw(st.integers(min_value=1, max_value=max_atoms))
    lo = 0 if allow_zero else 1
    atoms = draw(
        st.lists(
            st.builds(Fraction, st.integers(min_value=lo, max_value=12), st.integers(1, 4)),
            min_size=k,
            max_size=k,
            unique=True,
        )
    )
    weights = [draw(positive_fractions) for _ in atoms]
    total = sum(weights)
    return AtomicMeasure.of((t, w / total) for t, w in zip(atoms, weights))


@pytest.fixture
def write_json(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return write
