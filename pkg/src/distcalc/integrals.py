"""Named integrands of the second-order calculation.

``tagged=True`` builds the d-dimensional contraction pattern (vertex tags
``a``/``b``); ``tagged=False`` collapses every derivative onto the single
strict one-dimensional tag, where Δ_ab and Δ_aa can no longer be told apart.
"""

from __future__ import annotations

from fractions import Fraction

from .expr import STRICT_TAG, Expr, Term, dirac, integral, prop, sign
from .value import OMEGA, Value


def _tags(tagged: bool) -> tuple[str, str]:
    return ("a", "b") if tagged else (STRICT_TAG, STRICT_TAG)


def watermelon_i1(tagged: bool = True) -> Expr:
    """∫ Δ² Δ_ab²."""
    a, b = _tags(tagged)
    return Expr.of(integral(prop(), prop(), prop(a, b), prop(a, b)))


def watermelon_i2(tagged: bool = True) -> Expr:
    """∫ Δ Δ_a Δ_b Δ_ab."""
    a, b = _tags(tagged)
    return Expr.of(integral(prop(), prop(a), prop(b), prop(a, b)))


def delta_square_weighted() -> Expr:
    """∫ Δ² δ², the divergent piece split off from I1."""
    return Expr.of(integral(prop(), prop(), dirac(), dirac()))


def watermelon_i1_regular(tagged: bool = True) -> Expr:
    """I1 with its δ² piece removed."""
    return watermelon_i1(tagged) - delta_square_weighted()


def eps_square_delta() -> Expr:
    """∫ ε² δ."""
    return Expr.of(integral(sign(), sign(), dirac()))


def anomalous(tagged: bool = True) -> Expr:
    """∫ Δ² Δ_ab² - ∫ Δ² Δ_aa²; identically zero once tags collapse."""
    a, b = _tags(tagged)
    return Expr.of(
        integral(prop(), prop(), prop(a, b), prop(a, b)),
        integral(prop(), prop(), prop(a, a), prop(a, a), coeff=-1),
    )


def _strict(*ntags: int, coeff: Value | int = 1) -> Term:
    return integral(*(prop(*[STRICT_TAG] * n) for n in ntags), coeff=coeff)


def regular_two_point() -> Expr:
    """∫ [Δ̇² + ω²Δ²]."""
    return Expr.of(_strict(1, 1), _strict(0, 0, coeff=OMEGA**2))


def quartic() -> Expr:
    """∫ Δ⁴."""
    return Expr.of(_strict(0, 0, 0, 0))


def quartic_two_dots() -> Expr:
    """∫ Δ̇² Δ²."""
    return Expr.of(_strict(1, 1, 0, 0))


def quartic_four_dots() -> Expr:
    """∫ Δ̇⁴."""
    return Expr.of(_strict(1, 1, 1, 1))


def propagator_square() -> Expr:
    """∫ Δ²."""
    return Expr.of(_strict(0, 0))


def delta_square_identity() -> Expr:
    """∫ [Δ̈² + 2ω²Δ̇² + ω⁴Δ²], equal to ∫δ²."""
    return Expr.of(_strict(2, 2), _strict(1, 1, coeff=2 * OMEGA**2), _strict(0, 0, coeff=OMEGA**4))


#: name -> (builder taking `tagged`, description)
NAMED = {
    "I1R": (watermelon_i1_regular, "∫Δ²[Δ_ab² - δ²]"),
    "I1": (watermelon_i1, "∫Δ²Δ_ab²"),
    "I2": (watermelon_i2, "∫ΔΔ_aΔ_bΔ_ab"),
    "I": (lambda tagged: eps_square_delta(), "∫ε²δ"),
    "Ian": (anomalous, "∫Δ²Δ_ab² - ∫Δ²Δ_aa²"),
    "i2": (lambda tagged: regular_two_point(), "∫[Δ̇² + ω²Δ²]"),
    "i5": (lambda tagged: quartic(), "∫Δ⁴"),
    "ibis": (lambda tagged: quartic_two_dots(), "∫Δ̇²Δ²"),
    "i10": (lambda tagged: quartic_four_dots(), "∫Δ̇⁴"),
    "i3": (lambda tagged: delta_square_identity(), "∫[Δ̈² + 2ω²Δ̇² + ω⁴Δ²]"),
}


def named_integral(name: str, tagged: bool = True) -> Expr:
    try:
        build, _ = NAMED[name]
    except KeyError:
        raise KeyError(f"unknown integral {name!r}; choose from {', '.join(NAMED)}") from None
    return build(tagged)


def delta_origin_cube() -> Value:
    """Δ(0)³ = 1/(8ω³)."""
    return Value.monomial(Fraction(1, 8), omega=-3)
