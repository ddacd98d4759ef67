import pytest

from forest.parser import parse_forest

MIN_POS_SRC = """\
// m, n >= 0, x=m, y=n, i=0, min=0, found=0
min += x;
from ((i=0) or 0) to ((i=x) or (found=1)) {
    if (i=y) {
        min -= x;
        min += y;
        found += 1
    } else {skip}
}
// min = MIN(m, n)
"""

MIN_NEG_SRC = """\
// m, n <= 0, x=m, y=n, i=0, min=0, found=0
min += y;
from ((i=0) or 0) to ((i=-x) or (found=1)) {
  if (i=-y) { // |y| < |x| -> x < y
    min -= y;
    min += x;
    found += 1
  } else {skip}
}
"""

SHIFT_LOOP = "from(i=-4 or 0)to(i=1 or 0){j+=1}"
SIGN = "from (i=0 or 0) to (i=x or !(s=0)) {s+=1}"


@pytest.fixture
def min_pos_term():
    return parse_forest(MIN_POS_SRC)


@pytest.fixture
def min_neg_term():
    return parse_forest(MIN_NEG_SRC)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
