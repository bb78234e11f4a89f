import random

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import strategies as st

from ordmat import gen
from ordmat.matgroup import Mat, random_word
from ordmat.ring import RingDescriptor, RingElem

Q = RingDescriptor(1)
Q2 = RingDescriptor(2)


def rationals(lo=-20, hi=20, max_den=9):
    return st.builds(mpq, st.integers(lo, hi), st.integers(1, max_den))


def elems(k, nonneg=False, unit=False):
    lo = 0 if nonneg else -20
    base = rationals(lo=lo)
    if unit:
        base = base.filter(lambda q: q != 0)
    return st.lists(base, min_size=k, max_size=k).map(lambda xs: RingElem(tuple(xs)))


rings = st.sampled_from([Q, Q2, RingDescriptor(3)])
seeds = st.integers(0, 2**32 - 1)


def gamma_of(n, ring, seed):
    return gen.gamma_element(n, ring, random.Random(seed))


def word_of(n, ring, seed, max_len=6):
    return random_word(n, ring, random.Random(seed), max_len)


def to_sympy(m: Mat, c: int = 0) -> sympy.Matrix:
    """Independent oracle: one component as a sympy Rational matrix."""
    comp = m.comps[c]
    return sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in row] for row in comp])


def from_sympy_comps(mats) -> Mat:
    n = mats[0].rows
    return Mat(n, tuple(tuple(tuple(mpq(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1]))
                                    for x in mat.row(i)) for i in range(n)) for mat in mats))


@pytest.fixture
def q():
    return Q


@pytest.fixture
def q2():
    return Q2


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
