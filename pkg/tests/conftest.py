import os
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from sixform import OMEGA1, OMEGA2, OMEGA3  # noqa: E402
from sixform.acs import NORMAL_FORM  # noqa: E402
from sixform.exterior import KForm  # noqa: E402
from sixform.kernels import TRIPLES  # noqa: E402

SIGMA_TEXT = (
    "dx1^dx2^dx3 + dx1^dx4^dx5 + dx2^dx4^dx6 "
    "+ sin(x3 + x4)*dx3^dx5^dx6 + sin(x3 + x4)*dx4^dx5^dx6"
)


@pytest.fixture
def omega1():
    return OMEGA1


@pytest.fixture
def omega2():
    return OMEGA2


@pytest.fixture
def omega3():
    return OMEGA3


@pytest.fixture
def omega_n():
    return NORMAL_FORM


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def random_rational_form(rng, density=0.6, span=4):
    coeffs = {}
    for idx in TRIPLES:
        if rng.random() < density:
            coeffs[idx] = Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, 4)))
    return KForm(6, 3, coeffs)


def random_rational_vector(rng, n=6, span=5):
    v = np.empty(n, dtype=object)
    for i in range(n):
        v[i] = Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, 3)))
    return v


def random_invertible(rng, n=6, span=3):
    from sixform import linalg

    while True:
        m = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                m[i, j] = Fraction(int(rng.integers(-span, span + 1)))
        if linalg.rank(m) == n:
            return m


@st.composite
def three_forms(draw):
    coeffs = draw(st.dictionaries(st.sampled_from(TRIPLES), rationals, max_size=20))
    return KForm(6, 3, coeffs)


@st.composite
def vectors(draw, n=6):
    comps = draw(st.lists(rationals, min_size=n, max_size=n))
    v = np.empty(n, dtype=object)
    v[:] = comps
    return v


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
