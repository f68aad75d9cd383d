from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from distcalc.expr import DIRAC, PROP, SIGN, Factor, Term
from distcalc.value import Value

#: filled by test_acceptance, printed at the end of the run
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nonzero_fractions = fractions.filter(bool)

monomials = st.tuples(
    st.integers(-3, 3), st.integers(0, 2), st.integers(0, 1), st.integers(0, 2)
)
values = st.dictionaries(monomials, fractions, max_size=4).map(Value)

_tags = st.lists(st.sampled_from("abcxyz"), max_size=2)


@st.composite
def factors(draw) -> Factor:
    kind = draw(st.sampled_from([PROP, PROP, PROP, DIRAC, SIGN]))
    tags = () if kind == SIGN else tuple(draw(_tags))
    return Factor(kind, tags, draw(st.integers(1, 2)))


terms = st.builds(
    lambda fs, c: Term(Value.const(c), tuple(fs), True),
    st.lists(factors(), min_size=1, max_size=5),
    nonzero_fractions,
)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, text = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
