"""Rule engine reducing integrals over products of distributions to values.

The reduction of one integrand is a fixed strategy:

1. field equation on every contracted propagator, Δ_aaS -> -δ_S + ω²Δ_S;
2. derivatives on δ are moved off by parts;
3. Dirac rule for δ and δ² (ε(0) = 0, ∫ε²δ = I, ∫fδ² = f(0)·D2);
4. partial integration on mixed derivatives Δ_ab, restricted by the rule set;
5. regular integrals by direct substitution of the closed forms.

Partial integration may return the integrand itself with some coefficient c;
that equation is solved for the integrand (divide by 1 - c). Moves that loop
back to an integrand still under reduction are abandoned and the next move is
tried.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

from . import integrals
from .expr import (
    DIRAC,
    PROP,
    SIGN,
    Expr,
    Factor,
    Term,
    canonical_factors,
    dirac,
    expand_units,
    local,
    prop,
)
from .value import D2, DELTA_AT_ORIGIN, ONE, OMEGA, ZERO, Value

DEFAULT_MAX_DEPTH = 32


class ReductionError(Exception):
    pass


class IrreducibleProductError(ReductionError):
    pass


class RuleViolationError(ReductionError):
    pass


class NoDecayError(ReductionError):
    pass


class NonterminationError(ReductionError):
    pass


class _Cycle(Exception):
    pass


class Variant(str, Enum):
    PAPER = "paper"
    NAIVE_PI = "naive-pi"
    NO_PI = "no-pi"
    VANISHING_EPS = "vanishing-eps"


_DEFAULT_I = {
    Variant.PAPER: Fraction(0),
    Variant.NAIVE_PI: Fraction(1, 3),
    Variant.NO_PI: Fraction(1, 4),
    Variant.VANISHING_EPS: Fraction(0),
}
_POLICY = {
    Variant.PAPER: "rule1",
    Variant.NAIVE_PI: "free",
    Variant.NO_PI: "forbidden",
    Variant.VANISHING_EPS: "forbidden",
}


@dataclass(frozen=True)
class RuleSet:
    variant: Variant
    eps_square_delta: Fraction
    tagged: bool

    @classmethod
    def named(
        cls,
        name: str | Variant,
        *,
        eps_square_delta: Fraction | None = None,
        tagged: bool | None = None,
    ) -> RuleSet:
        v = Variant(name)
        return cls(
            v,
            _DEFAULT_I[v] if eps_square_delta is None else Fraction(eps_square_delta),
            v is Variant.PAPER if tagged is None else tagged,
        )

    @property
    def partial_integration(self) -> str:
        return _POLICY[self.variant]

    @property
    def name(self) -> str:
        return self.variant.value


PAPER_RULES = RuleSet.named(Variant.PAPER)
ALL_RULES = tuple(RuleSet.named(v) for v in Variant)


def default_max_depth() -> int:
    raw = os.environ.get("DISTCALC_MAX_DEPTH")
    return int(raw) if raw else DEFAULT_MAX_DEPTH


# -- field equation ----------------------------------------------------------


def _drop_pair(tags: tuple[str, ...]) -> tuple[str, ...]:
    for t in tags:
        if tags.count(t) >= 2:
            rest = list(tags)
            rest.remove(t)
            rest.remove(t)
            return tuple(rest)
    raise ValueError(f"no contracted pair in {tags}")


def _eom_expand(coeff: Value, units: list[Factor]) -> list[Term]:
    for i, f in enumerate(units):
        if f.kind == PROP and f.is_contracted():
            rest = _drop_pair(f.tags)
            head, tail = units[:i], units[i + 1 :]
            return _eom_expand(-coeff, head + [dirac(*rest)] + tail) + _eom_expand(
                coeff * OMEGA**2, head + [prop(*rest)] + tail
            )
    return [Term(coeff, tuple(units), True)]


def apply_eom(e: Expr) -> Expr:
    """Replace every contracted propagator by -δ + ω²Δ and expand."""
    out: list[Term] = []
    for t in e:
        if t.integrated:
            out.extend(_eom_expand(t.coeff, t.units()))
        else:
            out.append(t)
    return Expr(out)


# -- partial integration -----------------------------------------------------


def _ambiguous(units: Sequence[Factor]) -> bool:
    return any(f.kind in (DIRAC, SIGN) or (f.kind == PROP and f.nderiv >= 2) for f in units)


def _creates_contraction(e: Expr) -> bool:
    return any(f.kind == PROP and f.is_contracted() for t in e for f in t.factors)


def integrate_by_parts(t: Term, target: int, rs: RuleSet, tag: str | None = None) -> Expr:
    """Move one derivative off the factor at ``target`` (index into ``t.units()``).

    Boundary terms vanish because every integrand decays exponentially, which
    is asserted by requiring at least one propagator factor.
    """
    if not t.integrated:
        raise ValueError("partial integration needs an integrated term")
    units = t.units()
    if not any(f.kind == PROP for f in units):
        raise NoDecayError(f"no decay: {t.text()} carries no propagator factor")
    f = units[target]
    if not f.tags:
        raise ValueError(f"factor {f.text()} carries no derivative")
    tag = f.tags[0] if tag is None else tag
    if tag not in f.tags:
        raise ValueError(f"factor {f.text()} has no derivative {tag!r}")
    if f.kind == PROP and rs.partial_integration == "forbidden" and _ambiguous(units):
        raise RuleViolationError(
            f"partial integration forbidden on ambiguous integral {t.text()} under {rs.name}"
        )
    left = list(f.tags)
    left.remove(tag)
    lowered = Factor(f.kind, tuple(left))
    rest = units[:target] + units[target + 1 :]
    out = []
    for j, g in enumerate(rest):
        if g.kind == SIGN:
            new, weight = dirac(), 2
        else:
            new, weight = Factor(g.kind, g.tags + (tag,)), 1
        factors = (lowered, *rest[:j], new, *rest[j + 1 :])
        out.append(Term(-t.coeff * weight, factors, True))
    result = Expr(out)
    if f.kind == PROP and rs.partial_integration == "rule1" and not _creates_contraction(result):
        raise RuleViolationError(
            f"rule-1 violation: moving ∂{tag} off {f.text()} in {t.text()} "
            "does not enable the field equation"
        )
    return result


def solve_for_self(t: Term, e: Expr) -> Expr:
    """Given ∫t = e, where e may contain c·∫t, return (e - c·∫t)/(1 - c)."""
    key = (True, canonical_factors(t.factors))
    c = e.coefficient(key) / t.coeff
    c = c.constant()
    if c == 1:
        raise ValueError(f"degenerate relation: {t.text()} cancels itself")
    rest = Expr(s for s in e if s.key != key)
    return rest.scale(Value.const(1 / (1 - c)))


# -- Dirac rules -------------------------------------------------------------


def _delta_value(units: Sequence[Factor], rs: RuleSet, text: str) -> Value:
    diracs = [f for f in units if f.kind == DIRAC]
    n0 = sum(1 for f in units if f.kind == PROP and f.nderiv == 0)
    n1 = sum(1 for f in units if f.kind == PROP and f.nderiv == 1)
    eps = n1 + sum(1 for f in units if f.kind == SIGN)
    if any(f.kind == PROP and f.nderiv >= 2 for f in units):
        raise IrreducibleProductError(f"irreducible singular product: second derivative times δ in {text}")
    smooth = DELTA_AT_ORIGIN**n0 * Fraction(-1, 2) ** n1
    if len(diracs) == 1:
        if eps == 0:
            return smooth
        if eps == 1:
            return ZERO
        if eps == 2:
            return smooth * Value.const(rs.eps_square_delta)
        raise IrreducibleProductError(f"irreducible singular product: ε^{eps} δ in {text}")
    if len(diracs) == 2 and eps == 0:
        return smooth * D2
    raise IrreducibleProductError(f"irreducible singular product: δ^{len(diracs)} ε^{eps} in {text}")


def _delta_ready(units: Sequence[Factor]) -> bool:
    return any(f.kind == DIRAC for f in units) and not any(
        (f.kind == DIRAC and f.tags) or (f.kind == PROP and f.is_contracted()) for f in units
    )


def apply_delta_rules(e: Expr, rs: RuleSet, finalize: bool = False) -> Expr:
    """Evaluate every δ-bearing integral that has no derivative left on δ."""
    out: list[Term] = []
    for t in e:
        units = t.units()
        if t.integrated and _delta_ready(units):
            out.append(local(t.coeff * _delta_value(units, rs, t.text())))
        else:
            out.append(t)
    if finalize:
        out = [Term(t.coeff.finalize(), t.factors, t.integrated) for t in out]
    return Expr(out)


# -- regular integrals -------------------------------------------------------


def regular_integral(units: Sequence[Factor]) -> Value:
    """∫ Δ^n0 Δ̇^n1 ε^s by direct substitution of the closed forms."""
    if any(f.kind == DIRAC or (f.kind == PROP and f.nderiv >= 2) for f in units):
        raise ValueError("not a regular integrand")
    n0 = sum(1 for f in units if f.kind == PROP and f.nderiv == 0)
    n1 = sum(1 for f in units if f.kind == PROP and f.nderiv == 1)
    s = sum(1 for f in units if f.kind == SIGN)
    k = n0 + n1
    if k == 0:
        raise NoDecayError("no decay: integrand carries no propagator factor")
    if (n1 + s) % 2:
        return ZERO
    # (1/2ω)^n0 (-1/2)^n1 ∫ e^{-kω|τ|} dτ
    coeff = Fraction(1, 2**k) * (-1) ** n1 * Fraction(2, k)
    return Value.monomial(coeff, omega=-n0 - 1)


class KnownIntegralTable:
    """Regular integrals and the δ² identity, keyed by canonical integrand."""

    def __init__(self) -> None:
        d0 = DELTA_AT_ORIGIN
        self.entries: dict[str, tuple[Expr, Value]] = {
            "i2": (integrals.regular_two_point(), d0),
            "i5": (integrals.quartic(), d0**3 / OMEGA**2 * Fraction(1, 4)),
            "ibis": (integrals.quartic_two_dots(), d0**3 * Fraction(1, 4)),
            "i10": (integrals.quartic_four_dots(), OMEGA**2 * d0**3 * Fraction(1, 4)),
            "prop2": (integrals.propagator_square(), d0 / OMEGA**2 * Fraction(1, 2)),
            "i3": (integrals.delta_square_identity(), D2),
        }
        self._by_expr = {e: v for e, v in self.entries.values()}

    def lookup(self, e: Expr) -> Value | None:
        return self._by_expr.get(e)

    def regular_names(self) -> list[str]:
        return [n for n in self.entries if n != "i3"]


KNOWN_INTEGRALS = KnownIntegralTable()


# -- driver ------------------------------------------------------------------

Move = tuple[int, str]


def _text(factors: tuple[Factor, ...]) -> str:
    return Term(ONE, factors, True).text()


@dataclass
class Reducer:
    rules: RuleSet
    max_depth: int = field(default_factory=default_max_depth)
    move_order: Callable[[list[Move]], list[Move]] | None = None
    trace: list[dict] = field(default_factory=list)
    max_depth_reached: int = 0
    _cache: dict = field(default_factory=dict, repr=False)
    _stack: list = field(default_factory=list, repr=False)

    def value(self, e: Expr) -> Value:
        total = ZERO
        for t in e:
            if not t.integrated:
                total = total + t.coeff
                continue
            try:
                total = total + t.coeff * self._term_value(t.factors, 1)
            except _Cycle:
                raise IrreducibleProductError(
                    f"irreducible singular product: no terminating reduction of {t.text()}"
                ) from None
        return total

    def _log(self, rule: str, factors: tuple[Factor, ...], after: Expr | Value) -> None:
        self.trace.append({"rule": rule, "before": _text(factors), "after": str(after)})

    def _term_value(self, factors: tuple[Factor, ...], depth: int) -> Value:
        if factors in self._cache:
            return self._cache[factors]
        if depth > self.max_depth:
            raise NonterminationError(
                f"nontermination guard: depth {depth} exceeds {self.max_depth} at {_text(factors)}"
            )
        if factors in self._stack:
            raise _Cycle(factors)
        self.max_depth_reached = max(self.max_depth_reached, depth)
        self._stack.append(factors)
        try:
            v = self._reduce(factors, depth)
        finally:
            self._stack.pop()
        self._cache[factors] = v
        return v

    def _sum(self, e: Expr, depth: int) -> Value:
        total = ZERO
        for t in e:
            total = total + (t.coeff * self._term_value(t.factors, depth + 1) if t.integrated else t.coeff)
        return total

    def _solve(self, factors: tuple[Factor, ...], e: Expr, depth: int) -> Value:
        c = e.coefficient((True, factors)).constant()
        if c == 1:
            raise _Cycle(factors)
        rest = Expr(t for t in e if t.key != (True, factors))
        if c:
            self._log("solve", factors, rest.scale(Value.const(1 / (1 - c))))
        return self._sum(rest, depth) * (1 / (1 - c))

    def _reduce(self, factors: tuple[Factor, ...], depth: int) -> Value:
        units = expand_units(factors)
        term = Term(ONE, factors, True)

        if any(f.kind == PROP and f.is_contracted() for f in units):
            e = apply_eom(Expr.of(term))
            self._log("eom", factors, e)
            return self._sum(e, depth)

        for i, f in enumerate(units):
            if f.kind == DIRAC and f.tags:
                e = integrate_by_parts(term, i, self.rules)
                self._log("ibp-dirac", factors, e)
                return self._solve(factors, e, depth)

        if any(f.kind == DIRAC for f in units):
            v = _delta_value(units, self.rules, term.text())
            self._log("dirac", factors, v)
            return v

        if any(f.is_mixed() for f in units):
            return self._partial_integration(factors, units, depth)

        known = KNOWN_INTEGRALS.lookup(Expr.of(term))
        v = known if known is not None else regular_integral(units)
        self._log("table" if known is not None else "regular", factors, v)
        return v

    def candidate_moves(self, units: list[Factor]) -> list[Move]:
        moves: list[Move] = []
        seen: set[tuple[Factor, str]] = set()
        for i, f in enumerate(units):
            if f.kind != PROP:
                continue
            for tag in dict.fromkeys(f.tags):
                if (f, tag) not in seen:
                    seen.add((f, tag))
                    moves.append((i, tag))
        return moves

    def _partial_integration(self, factors, units, depth) -> Value:
        term = Term(ONE, factors, True)
        if self.rules.partial_integration == "forbidden":
            raise IrreducibleProductError(
                f"irreducible singular product: {term.text()} needs partial integration, "
                f"forbidden under {self.rules.name}"
            )
        moves = self.candidate_moves(units)
        if self.move_order is not None:
            moves = self.move_order(moves)
        looped = False
        for i, tag in moves:
            try:
                e = integrate_by_parts(term, i, self.rules, tag)
            except RuleViolationError:
                continue
            self._log("ibp", factors, e)
            try:
                return self._solve(factors, e, depth)
            except _Cycle:
                self._log("ibp-abandoned", factors, e)
                looped = True
        if looped:
            raise _Cycle(factors)
        raise IrreducibleProductError(
            f"irreducible singular product: no admissible partial integration for {term.text()}"
        )


def reduce_to_value(
    e: Expr,
    rs: RuleSet,
    *,
    max_depth: int | None = None,
    move_order: Callable[[list[Move]], list[Move]] | None = None,
) -> Value:
    r = Reducer(rs, max_depth if max_depth is not None else default_max_depth(), move_order)
    return r.value(e)


def derive_eps_square_delta(variant: Variant | str) -> Fraction:
    """Recompute the value of ∫ε²δ each rule-set variant is forced to adopt."""
    v = Variant(variant)
    if v in (Variant.PAPER, Variant.VANISHING_EPS):
        # Dirac rule with ε(0) = 0, resp. ε²(0) = 0
        return Fraction(0)

    def i2_strict(i: Fraction) -> Value:
        rs = RuleSet.named(v, eps_square_delta=i, tagged=False)
        return reduce_to_value(integrals.watermelon_i2(False), rs)

    base = i2_strict(Fraction(0))
    slope = i2_strict(Fraction(1)) - base
    if v is Variant.NAIVE_PI:
        # I2 by unrestricted parts, Δ̈Δ̇² = (Δ̇³)'/3, must agree with I2 by the field equation
        (t,) = integrals.watermelon_i2(False)
        target = next(i for i, f in enumerate(t.units()) if f.nderiv == 2)
        parts = solve_for_self(t, integrate_by_parts(t, target, RuleSet.named(v)))
        target_value = reduce_to_value(parts, RuleSet.named(v, eps_square_delta=Fraction(0)))
    else:
        # I2 must satisfy I1R + 4 I2 = -7/(32ω) with I1R from the field equation
        rs = RuleSet.named(v, eps_square_delta=Fraction(0), tagged=False)
        i1r = reduce_to_value(integrals.watermelon_i1_regular(False), rs)
        target_value = (Value.monomial(Fraction(-7, 32), omega=-1) - i1r) * Fraction(1, 4)
    return ((target_value - base) / slope).constant()
