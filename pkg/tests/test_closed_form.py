from fractions import Fraction

import pytest

from ratdiff.closed_form import (
    ClosedFormQuery,
    applicable_evaluators,
    compare,
    eval_eta,
    eval_special_a1,
    eval_special_a_minus1,
    eval_u_constant,
    eval_u_general,
)
from ratdiff.core import SequenceSpec, SystemSpec, ZeroDenominator, iterate, map_eta_index

from conftest import FIG1_INITIAL, const_spec, random_spec


def direct_u(spec, n, i):
    """Literal nested products and sums, no accumulation."""
    k, t, q = spec.k, i % 4, i // 4
    A, B = spec.A.term, spec.B.term
    P = Fraction(1)
    for j in range(k):
        P *= spec.initial[t + 4 * j]

    def bracket(upper):
        prod = Fraction(1)
        for k1 in range(upper):
            prod *= A(4 * k1 + t)
        total = Fraction(0)
        for l in range(upper):
            tail = Fraction(1)
            for k2 in range(l + 1, upper):
                tail *= A(4 * k2 + t)
            total += B(4 * l + t) * tail
        return prod + P * total

    value = spec.initial[i]
    for s in range(n):
        value *= bracket(k * s + q) / bracket(k * s + q + 1)
    return value


def test_u_general_examples(fig1):
    assert eval_u_general(const_spec(1, 2, 0, [3, 1, 1, 1]), 2, 0) == Fraction(3, 4)
    assert eval_u_general(const_spec(1, 1, 1, [1, 1, 1, 1]), 3, 0) == Fraction(1, 4)
    periodic = SystemSpec(2, SequenceSpec.periodic([2, 2, 2, 2]), SequenceSpec.constant(-1), FIG1_INITIAL)
    assert eval_u_general(periodic, 1, 0) == -2


def test_u_constant_examples(fig1):
    assert eval_u_constant(const_spec(1, 1, 1, [1, 1, 1, 1]), 5, 0) == Fraction(1, 6)
    assert eval_u_constant(fig1, 3, 5) == Fraction(-1, 3)
    for i in range(8):
        assert eval_u_constant(fig1, 0, i) == fig1.initial[i]


def test_eta_examples(fig1):
    spec = const_spec(1, 1, 1, [1, 1, 1, 1], form="eta")
    # eta[1] = eta[4*1*1 - 4 + 1 + 0]
    assert eval_eta(spec, 1, 0) == Fraction(1, 2)
    eta_fig1 = fig1.to_eta_form()
    assert eval_eta(eta_fig1, 1, 0) == -2
    for i in range(8):
        assert eval_eta(eta_fig1, 0, i) == eta_fig1.initial[i]


def test_special_a1_examples():
    spec = const_spec(1, 1, 1, [1, 1, 1, 1], form="eta")
    assert [eval_special_a1(spec, n, 3) for n in range(4)] == [1, Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)]
    flat = const_spec(2, 1, 0, [Fraction(1, 3)] * 8)
    assert {eval_special_a1(flat, n, 5) for n in range(6)} == {Fraction(1, 3)}
    spec2 = const_spec(2, 1, 1, [1] * 8, form="eta")
    orbit = iterate(spec2, 40)
    for n in range(5):
        assert eval_special_a1(spec2, n, 7) == orbit[8 * n + 7]
    # i = 7 has floor(i/4) = 1: first factor is (1 + 1)/(1 + 2)
    assert eval_special_a1(spec2, 1, 7) == Fraction(2, 3)


def test_special_a_minus1_examples():
    spec = const_spec(3, -1, Fraction(2, 3), [Fraction(v, 2) for v in range(1, 13)], form="eta")
    for j in range(12):
        for n in (0, 2, 4):
            assert eval_special_a_minus1(spec, n, j) == spec.initial[11 - j]
    # k even with b*prod = 2: unit bracket, every value returns after 4k steps
    unit = const_spec(2, -1, 1, [2, 4, -1, Fraction(1, 2), 1, Fraction(1, 2), -2, 4], form="eta")
    for j in range(8):
        assert eval_special_a_minus1(unit, 3, j) == unit.initial[7 - j]
    # k = 1, b = 1: alternation against the oracle
    alt = const_spec(1, -1, 1, [2, 3, 4, Fraction(1, 2)], form="eta")
    orbit = iterate(alt, 40)
    for n in range(10):
        for j in range(4):
            assert eval_special_a_minus1(alt, n, j) == orbit[map_eta_index(1, 4 * n - j)]


def test_special_a_minus1_forbidden_bracket():
    spec = const_spec(2, -1, 1, [1, 2, 3, 4, 1, 2, 3, 4])
    # residue 0 has product 1, so the bracket is 0; j with tau(j) = 3 reads u[0], u[4]
    with pytest.raises(ZeroDenominator):
        eval_special_a_minus1(spec, 1, 7)


def test_zero_denominator_reported():
    spec = const_spec(1, 1, 1, [Fraction(-1, 2), 1, 1, 1])
    with pytest.raises(ZeroDenominator) as exc:
        eval_u_general(spec, 2, 0)
    assert exc.value.index == 1
    with pytest.raises(ZeroDenominator):
        eval_u_constant(spec, 2, 0)


def test_query_record(fig1):
    q = ClosedFormQuery(fig1, 2, 3)
    assert q.target_index == 19
    assert ClosedFormQuery(fig1.to_eta_form(), 2, 3).target_index == 12
    with pytest.raises(ValueError):
        ClosedFormQuery(fig1, 0, 8)


def test_accumulation_matches_direct_form(rng):
    for _ in range(40):
        spec = random_spec(rng).to_u_form()
        for n in range(4):
            for i in range(spec.order):
                try:
                    expected = direct_u(spec, n, i)
                except ZeroDivisionError:
                    continue
                assert eval_u_general(spec, n, i) == expected


def test_specialisations_agree(rng):
    checked = 0
    while checked < 60:
        spec = random_spec(rng)
        if not spec.is_constant:
            continue
        orbit = iterate(spec, 12 * spec.order)
        evaluators = applicable_evaluators(spec)
        for idx in range(len(orbit)):
            n, i = divmod(idx, spec.order)
            values = {name: f(spec, n, i) for name, f in evaluators}
            assert set(values.values()) == {orbit[idx]}, (spec, idx, values)
        checked += 1


def test_index_coherence(rng):
    for _ in range(30):
        spec = random_spec(rng)
        for n in range(4):
            for i in range(spec.order):
                try:
                    u_val = eval_u_general(spec, n, i)
                except ZeroDivisionError:
                    continue
                assert eval_eta(spec, n, i) == u_val
                # the eta index 4kn-4k+1+i maps back to u index 4kn+i
                assert map_eta_index(spec.k, spec.order * n - spec.order + 1 + i) == spec.order * n + i


def test_compare_fig1(fig1):
    report = compare(fig1, 80)
    assert report.ok and report.checked == 81
    assert report.oracle_status == "complete"
    assert set(report.evaluators.values()) == {"u_constant"}


def test_compare_harmonic():
    report = compare(const_spec(1, 1, 1, [1, 1, 1, 1]), 48)
    assert report.ok and report.evaluators[10] == "a1"


def test_compare_forbidden_truncates():
    report = compare(const_spec(1, 1, 1, [Fraction(-1, 2), 1, 1, 1]), 20)
    assert report.oracle_status == "forbidden_at(8)"
    assert report.checked == 8 and report.ok


def test_compare_detects_corruption(fig1):
    def broken(spec, n, i):
        v = eval_u_constant(spec, n, i)
        return v + 1 if spec.order * n + i == 13 else v

    report = compare(fig1, 40, evaluator=broken, name="broken")
    assert [m[0] for m in report.mismatches] == [13]
