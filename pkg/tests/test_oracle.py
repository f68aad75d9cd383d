from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distcalc import integrals
from distcalc.expr import Expr, integral, prop, sign
from distcalc.oracle import (
    DistributionalIntegrandError,
    QuadratureSpec,
    check_table,
    mollified_delta_check,
    numeric_integral,
    truncation_bound,
    value_at,
)
from distcalc.reduce import KNOWN_INTEGRALS, PAPER_RULES, regular_integral, reduce_to_value

OMEGAS = [Fraction(1, 2), Fraction(1), Fraction(3)]


@pytest.mark.parametrize("omega", OMEGAS, ids=str)
def test_table_matches_quadrature(omega):
    entries = check_table(omega)
    assert {e.integrand.split(":")[0] for e in entries} == set(KNOWN_INTEGRALS.regular_names())
    for e in entries:
        assert e.abs_error < 1e-8, e
        assert e.truncation_bound < 1e-12


@pytest.mark.parametrize("omega", [0.5, 2.0])
def test_doubling_the_window_changes_nothing(omega):
    e = integrals.quartic_two_dots()
    short, _ = numeric_integral(e, QuadratureSpec(omega, half_width=20 / omega))
    long, _ = numeric_integral(e, QuadratureSpec(omega, half_width=40 / omega))
    assert abs(short - long) < 1e-10


def test_short_window_bound_is_honest():
    # a deliberately short window: the reported bound must cover the true error
    omega = 1.0
    e = integrals.propagator_square()
    spec = QuadratureSpec(omega, half_width=3.0)
    est, bound = numeric_integral(e, spec)
    exact = value_at(KNOWN_INTEGRALS.entries["prop2"][1], Fraction(1))
    assert abs(est - exact) <= bound
    assert truncation_bound(e, spec) == pytest.approx(2 * (1 / 4) * math.exp(-6) / 2)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2), st.sampled_from(OMEGAS))
def test_closed_form_matches_quadrature(n0, n1, s, omega):
    if n0 + n1 == 0:
        return
    units = [prop()] * n0 + [prop("a")] * n1 + [sign()] * s
    est, _ = numeric_integral(integral(*units), QuadratureSpec(float(omega)))
    assert abs(est - value_at(regular_integral(units), omega)) < 1e-9


def test_singular_combination_is_not_evaluated_numerically():
    with pytest.raises(DistributionalIntegrandError):
        numeric_integral(integrals.eps_square_delta(), QuadratureSpec(1.0))
    with pytest.raises(DistributionalIntegrandError):
        numeric_integral(integrals.watermelon_i2(False), QuadratureSpec(1.0))


def test_no_decay_rejected():
    with pytest.raises(ValueError, match="no decay"):
        numeric_integral(Expr.of(integral(sign(), sign())), QuadratureSpec(1.0))


def test_nonpositive_omega():
    with pytest.raises(ValueError):
        QuadratureSpec(0.0)


def test_regular_pieces_of_i2_after_reduction():
    # the reduced I2 equals the quadrature of its regular ingredients, Δ̇⁴ and Δ̇²Δ²
    omega = Fraction(3, 2)
    spec = QuadratureSpec(float(omega))
    four, _ = numeric_integral(integrals.quartic_four_dots(), spec)
    two, _ = numeric_integral(integrals.quartic_two_dots(), spec)
    # I2 = -1/2 ∫Δ̇⁴ - 1/2 ω² ∫Δ̇²Δ² + I/(16ω) with I = 0
    numeric = -0.5 * four - 0.5 * float(omega) ** 2 * two
    exact = value_at(reduce_to_value(integrals.watermelon_i2(), PAPER_RULES), omega)
    assert abs(numeric - exact) < 1e-10


@pytest.mark.parametrize("sigma", [1.0, 0.3])
def test_mollified_delta(sigma):
    rungs = mollified_delta_check(sigma, rungs=3)
    assert [r.sigma for r in rungs] == pytest.approx([sigma, sigma / 10, sigma / 100])
    for r in rungs:
        assert r.delta_square_ratio == pytest.approx(1 / math.sqrt(2), abs=1e-8)
        assert r.delta_square_ratio_exact == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        assert r.eps_square_delta == pytest.approx(1 / 3, abs=1e-8)


def test_mollifier_rejects_bad_sigma():
    with pytest.raises(ValueError):
        mollified_delta_check(0.0)


def test_entry_json():
    (e,) = check_table(1, names=["i5"])
    assert set(e.to_json()) == {"integrand", "omega", "exact", "numeric", "abs_error", "truncation_bound"}
