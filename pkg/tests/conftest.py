import pytest
from hypothesis import settings
from hypothesis import strategies as st

from infinite_bins.config import Configuration, LazyInfiniteConfiguration

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@st.composite
def configurations(draw, min_total=1, max_total=30):
    total = draw(st.integers(min_total, max_total))
    mask = draw(st.integers(0, (1 << (total - 1)) - 1))
    bins, c = [], 1
    for i in range(total - 1):
        if mask >> i & 1:
            bins.append(c)
            c = 1
        else:
            c += 1
    bins.append(c)
    return Configuration(tuple(bins))


@st.composite
def lazy_configurations(draw, max_base=5, max_window=8):
    base = draw(st.integers(1, max_base))
    window = draw(st.lists(st.integers(1, 6), max_size=max_window))
    return LazyInfiniteConfiguration(base, tuple(window))


@pytest.fixture(scope="session")
def acceptance_lines():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
