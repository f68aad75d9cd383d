from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distcalc.propagator import PropClosedForm, at_origin, eval_smooth, mixed_derivative_smooth
from distcalc.value import DELTA0, OMEGA, Value

omegas = st.floats(0.2, 5.0)
taus = st.floats(0.05, 6.0)


@given(omegas, taus)
def test_field_equation_away_from_origin(w, tau):
    # second difference of Δ reproduces ω²Δ for τ ≠ 0
    h = 1e-4
    lap = (eval_smooth(0, tau + h, w) - 2 * eval_smooth(0, tau, w) + eval_smooth(0, tau - h, w)) / h**2
    assert lap == pytest.approx(w**2 * eval_smooth(0, tau, w), rel=1e-5, abs=1e-9)
    assert eval_smooth(2, tau, w) == pytest.approx(w**2 * eval_smooth(0, tau, w), rel=1e-12)


@given(omegas, taus)
def test_first_derivative_matches_difference_quotient(w, tau):
    h = 1e-6
    fd = (eval_smooth(0, tau + h, w) - eval_smooth(0, tau - h, w)) / (2 * h)
    assert eval_smooth(1, tau, w) == pytest.approx(fd, rel=1e-6, abs=1e-12)


@given(omegas, taus)
def test_parity(w, tau):
    assert eval_smooth(0, -tau, w) == eval_smooth(0, tau, w)
    assert eval_smooth(1, -tau, w) == -eval_smooth(1, tau, w)
    assert eval_smooth(2, -tau, w) == eval_smooth(2, tau, w)


def test_jump_of_first_derivative_is_the_delta_weight():
    # Δ̇(0+) - Δ̇(0-) = -1 is the coefficient of δ in Δ̈ = -δ + ω²Δ
    w, eps = 1.7, 1e-12
    jump = eval_smooth(1, eps, w) - eval_smooth(1, -eps, w)
    assert jump == pytest.approx(PropClosedForm(w, 2).delta_weight)
    assert eval_smooth(1, 0.0, w) == 0.0


def test_unit_normalization():
    # ∫Δ = 1/ω² (zero-momentum value of 1/(k² + ω²))
    w = 0.8
    x = np.linspace(-60, 60, 400_001)
    assert np.trapezoid(eval_smooth(0, x, w), x) == pytest.approx(1 / w**2, rel=1e-6)


def test_mixed_derivative_smooth_part():
    # ⟨q̇(τ)q̇(0)⟩ = δ(τ) - (ω/2)e^{-ω|τ|}: its smooth part is -ω²Δ
    w, x = 2.0, np.array([-1.0, 0.3, 2.0])
    assert np.allclose(mixed_derivative_smooth(x, w), -eval_smooth(2, x, w))
    assert np.allclose(mixed_derivative_smooth(x, w), -w / 2 * np.exp(-w * np.abs(x)))


def test_values_at_origin():
    assert at_origin(0) == Value.monomial(Fraction(1, 2), omega=-1)
    assert at_origin(1).is_zero()
    assert at_origin(2) == -DELTA0 + OMEGA * Fraction(1, 2)
    # Δ̈(0) = -δ(0) + ω²Δ(0)
    assert at_origin(2) == -DELTA0 + OMEGA**2 * at_origin(0)
    assert math.isclose(eval_smooth(0, 0.0, 4.0), float(at_origin(0).subs(omega=4).constant()))


def test_array_input():
    out = eval_smooth(0, [0.0, 1.0], 1.0)
    assert out.shape == (2,)


@pytest.mark.parametrize("w", [0.0, -1.0])
def test_nonpositive_omega_rejected(w):
    with pytest.raises(ValueError):
        eval_smooth(0, 1.0, w)
    with pytest.raises(ValueError):
        PropClosedForm(w)


def test_unknown_derivative_order():
    with pytest.raises(ValueError):
        eval_smooth(3, 0.5, 1.0)
    with pytest.raises(ValueError):
        at_origin(3)
