import random
from fractions import Fraction

import pytest

from ratdiff.core import SequenceSpec, SystemSpec

FIG1_INITIAL = [-2, -3, -4, 1, Fraction(-1, 2), Fraction(-1, 3), Fraction(-1, 4), 1]
FIG2_INITIAL = [2, 3, 4, 1, Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), 1]

NONZERO = [v for v in range(-5, 6) if v != 0]


def const_spec(k, A, B, initial, form="u"):
    return SystemSpec(k, SequenceSpec.constant(A), SequenceSpec.constant(B), tuple(initial), form)


@pytest.fixture
def fig1():
    return const_spec(2, 2, -1, FIG1_INITIAL)


@pytest.fixture
def fig2():
    return const_spec(2, 2, 1, FIG2_INITIAL)


def small_rational(rng):
    return Fraction(rng.choice(NONZERO), rng.choice(NONZERO))


def random_spec(rng, k=None):
    """k in {1,2,3}; constant or period-4 coefficients; both forms; A = +-1 forced now and then."""
    k = k or rng.choice([1, 2, 3])
    if rng.random() < 0.5:
        roll = rng.random()
        a = Fraction(1) if roll < 0.2 else Fraction(-1) if roll < 0.4 else small_rational(rng)
        A = SequenceSpec.constant(a)
        B = SequenceSpec.constant(small_rational(rng))
    else:
        A = SequenceSpec.periodic(small_rational(rng) for _ in range(4))
        B = SequenceSpec.periodic(small_rational(rng) for _ in range(4))
    initial = tuple(small_rational(rng) for _ in range(4 * k))
    form = "eta" if rng.random() < 0.3 else "u"
    return SystemSpec(k, A, B, initial, form)


@pytest.fixture
def rng():
    return random.Random(20260417)


# -- acceptance summary -----------------------------------------------------

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    def record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
