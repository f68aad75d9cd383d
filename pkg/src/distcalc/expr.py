"""Products of distributions under a single time integral.

A :class:`Term` is ``coeff · ∫dτ F1(τ) F2(τ) ...`` where each factor is a
derivative of the propagator Δ, a derivative of δ, or the sign distribution ε.
Derivatives are recorded as index tags; two equal tags on one factor mean a
contracted (Laplacian) pair, which is what lets the field equation act.

Local terms (``integrated=False``) carry no factors: everything evaluated at
the origin has already been folded into the coefficient.

Canonical text form, one term per summand::

    expr   := "0" | term (" + " term)*
    term   := "(" value ")" [" ∫" (" " factor)*]
    factor := "D[" tags "]" | "d[" tags "]" | "e"

``D`` is a propagator, ``d`` a Dirac δ, ``e`` the sign function; repeated
factors are written out, e.g. ``(-1/2) ∫ D[ab] D[ab] D[] D[]``.
"""

from __future__ import annotations

import itertools
import re
import string
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .value import ONE, ZERO, Value

PROP = "prop"
DIRAC = "dirac"
SIGN = "sign"
_KIND_RANK = {PROP: 0, DIRAC: 1, SIGN: 2}
_KIND_LETTER = {PROP: "D", DIRAC: "d"}

#: tag used for every derivative in strict one-dimensional mode
STRICT_TAG = "t"
CANONICAL_TAGS = string.ascii_lowercase


@dataclass(frozen=True)
class Factor:
    kind: str
    tags: tuple[str, ...] = ()
    power: int = 1

    def __post_init__(self) -> None:
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.kind == SIGN and self.tags:
            raise ValueError("ε carries no derivative; use dε/dτ = 2δ")
        if self.power < 1:
            raise ValueError("factor power must be positive")
        object.__setattr__(self, "tags", tuple(sorted(self.tags)))

    @property
    def nderiv(self) -> int:
        return len(self.tags)

    def is_contracted(self) -> bool:
        """Two equal tags: the field equation applies."""
        return len(set(self.tags)) < len(self.tags)

    def is_mixed(self) -> bool:
        return self.kind == PROP and len(self.tags) >= 2 and not self.is_contracted()

    def unit(self) -> Factor:
        return Factor(self.kind, self.tags)

    def with_tags(self, tags: Iterable[str]) -> Factor:
        return Factor(self.kind, tuple(tags), self.power)

    def sort_key(self) -> tuple:
        return (_KIND_RANK[self.kind], -len(self.tags), self.tags, -self.power)

    def text(self) -> str:
        if self.kind == SIGN:
            return "e"
        return f"{_KIND_LETTER[self.kind]}[{''.join(self.tags)}]"

    def __str__(self) -> str:
        return " ".join([self.text()] * self.power)


def prop(*tags: str) -> Factor:
    return Factor(PROP, tags)


def dirac(*tags: str) -> Factor:
    return Factor(DIRAC, tags)


def sign() -> Factor:
    return Factor(SIGN)


def expand_units(factors: Iterable[Factor]) -> list[Factor]:
    out: list[Factor] = []
    for f in factors:
        out.extend([f.unit()] * f.power)
    return out


def _merge(units: list[Factor]) -> tuple[Factor, ...]:
    out: list[Factor] = []
    for f in units:
        if out and out[-1].unit() == f:
            out[-1] = Factor(f.kind, f.tags, out[-1].power + 1)
        else:
            out.append(f)
    return tuple(out)


def canonical_factors(factors: Iterable[Factor]) -> tuple[Factor, ...]:
    """Sort factors and rename tags to a, b, c, ... minimizing the sorted form."""
    units = expand_units(factors)
    seen: list[str] = []
    for f in units:
        for t in f.tags:
            if t not in seen:
                seen.append(t)
    if len(seen) > len(CANONICAL_TAGS):
        raise ValueError("too many distinct derivative tags")
    names = CANONICAL_TAGS[: len(seen)]
    best: list[Factor] | None = None
    best_key: list[tuple] | None = None
    for perm in itertools.permutations(names):
        rename = dict(zip(seen, perm))
        cand = sorted(
            (f.with_tags(rename[t] for t in f.tags) for f in units), key=Factor.sort_key
        )
        key = [f.sort_key() for f in cand]
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return _merge(best or [])


@dataclass(frozen=True)
class Term:
    coeff: Value
    factors: tuple[Factor, ...] = ()
    integrated: bool = True

    def __post_init__(self) -> None:
        if not self.integrated and self.factors:
            raise ValueError("local terms must have their factors folded into the coefficient")

    @property
    def key(self) -> tuple[bool, tuple[Factor, ...]]:
        return (self.integrated, self.factors)

    def units(self) -> list[Factor]:
        return expand_units(self.factors)

    def text(self) -> str:
        head = f"({self.coeff})"
        if not self.integrated:
            return head
        return " ".join([head, "∫", *map(str, self.factors)]).rstrip()

    def __str__(self) -> str:
        return self.text()


def canonicalize(t: Term) -> Term:
    if not t.integrated:
        return t
    return Term(t.coeff, canonical_factors(t.factors), True)


def integral(*factors: Factor, coeff: Value | int = 1) -> Term:
    c = coeff if isinstance(coeff, Value) else Value.const(coeff)
    return canonicalize(Term(c, tuple(factors), True))


def local(value: Value | int) -> Term:
    return Term(value if isinstance(value, Value) else Value.const(value), (), False)


class Expr:
    """Finite sum of canonical terms with merged coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[Term] = ()):
        acc: dict[tuple, Value] = {}
        for t in terms:
            t = canonicalize(t)
            acc[t.key] = acc.get(t.key, ZERO) + t.coeff
        self._terms = {k: v for k, v in acc.items() if not v.is_zero()}

    @classmethod
    def of(cls, *terms: Term) -> Expr:
        return cls(terms)

    @classmethod
    def from_mapping(cls, m: Mapping[tuple, Value]) -> Expr:
        return cls(Term(v, k[1], k[0]) for k, v in m.items())

    def terms(self) -> list[Term]:
        keys = sorted(self._terms, key=_term_order)
        return [Term(self._terms[k], k[1], k[0]) for k in keys]

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms())

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, t: Term | tuple) -> Value:
        key = canonicalize(t).key if isinstance(t, Term) else t
        return self._terms.get(key, ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def local_value(self) -> Value:
        return self._terms.get((False, ()), ZERO)

    def is_local(self) -> bool:
        return all(not k[0] for k in self._terms)

    def __add__(self, other: Expr) -> Expr:
        return add(self, other)

    def __neg__(self) -> Expr:
        return Expr(Term(-t.coeff, t.factors, t.integrated) for t in self)

    def __sub__(self, other: Expr) -> Expr:
        return add(self, -other)

    def __mul__(self, other: Expr) -> Expr:
        return mul(self, other)

    def scale(self, v: Value | int) -> Expr:
        return Expr(Term(t.coeff * v, t.factors, t.integrated) for t in self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Expr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def text(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(t.text() for t in self)

    def __str__(self) -> str:
        return self.text()

    def __repr__(self) -> str:
        return f"Expr({self.text()!r})"

    def to_json(self) -> list[dict]:
        return [
            {
                "coeff": t.coeff.to_json(),
                "integrated": t.integrated,
                "factors": [
                    {"kind": f.kind, "tags": "".join(f.tags), "power": f.power} for f in t.factors
                ],
            }
            for t in self
        ]

    @classmethod
    def from_json(cls, rows: list[dict]) -> Expr:
        return cls(
            Term(
                Value.from_json(r["coeff"]),
                tuple(Factor(f["kind"], tuple(f["tags"]), int(f["power"])) for f in r["factors"]),
                bool(r["integrated"]),
            )
            for r in rows
        )

    @classmethod
    def parse(cls, text: str) -> Expr:
        text = text.strip()
        if text == "0":
            return cls()
        return cls(_parse_term(chunk) for chunk in _split_terms(text))


def _term_order(key: tuple) -> tuple:
    integrated, factors = key
    return (integrated, [f.sort_key() for f in factors])


def _split_terms(text: str) -> list[str]:
    # split on " + (" at paren depth zero
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(" + (", i):
            out.append(text[start:i])
            start = i + 3
    out.append(text[start:])
    return out


_FACTOR_TOKEN = re.compile(r"^(D|d)\[([a-z]*)\]$|^e$")


def _parse_term(chunk: str) -> Term:
    chunk = chunk.strip()
    if not chunk.startswith("("):
        raise ValueError(f"term must start with '(': {chunk!r}")
    depth = 0
    for i, ch in enumerate(chunk):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0:
            break
    coeff = Value.parse(chunk[1:i])
    rest = chunk[i + 1 :].split()
    if not rest:
        return local(coeff)
    if rest[0] != "∫":
        raise ValueError(f"expected '∫' in {chunk!r}")
    factors = []
    for tok in rest[1:]:
        m = _FACTOR_TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad factor token {tok!r}")
        if tok == "e":
            factors.append(sign())
        else:
            factors.append(Factor(PROP if m.group(1) == "D" else DIRAC, tuple(m.group(2))))
    return Term(coeff, tuple(factors), True)


def add(a: Expr, b: Expr) -> Expr:
    return Expr([*a, *b])


def mul(a: Expr, b: Expr) -> Expr:
    out = []
    for s in a:
        for t in b:
            if s.integrated and t.integrated:
                raise ValueError("unfactorized double integral")
            out.append(Term(s.coeff * t.coeff, s.factors + t.factors, s.integrated or t.integrated))
    return Expr(out)


ZERO_EXPR = Expr()
ONE_EXPR = Expr.of(local(ONE))
