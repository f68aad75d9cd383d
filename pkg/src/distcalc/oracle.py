"""Numerical cross-checks of the regular integrals by adaptive quadrature."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, special

from .expr import DIRAC, PROP, SIGN, Expr, Term
from .propagator import eval_smooth
from .reduce import KNOWN_INTEGRALS
from .value import Value


class DistributionalIntegrandError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    omega: float
    abs_tol: float = 1e-10
    half_width: float | None = None
    limit: int = 200

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValueError(f"ω must be positive, got {self.omega}")

    @property
    def T(self) -> float:
        return self.half_width if self.half_width is not None else 40.0 / self.omega


def _term_integrand(t: Term, omega: float):
    units = t.units()
    for f in units:
        if f.kind == DIRAC or (f.kind == PROP and f.nderiv >= 2):
            raise DistributionalIntegrandError(f"distributional integrand: {t.text()}")
    coeff = float(t.coeff.subs(omega=Fraction(omega)).constant())
    n = [f.nderiv for f in units if f.kind == PROP]
    s = sum(1 for f in units if f.kind == SIGN)

    def fn(tau: float) -> float:
        out = coeff * np.sign(tau) ** s
        for k in n:
            out *= eval_smooth(k, tau, omega)
        return out

    # |Δ| ≤ e^{-ω|τ|}/2ω and |Δ̇| ≤ e^{-ω|τ|}/2
    envelope = abs(coeff) * math.prod(1 / (2 * omega) if k == 0 else 0.5 for k in n)
    return fn, len(n), envelope


def numeric_integral(integrand: Expr | Term, spec: QuadratureSpec) -> tuple[float, float]:
    """Quadrature over [-T, 0] and [0, T]; returns (estimate, error bound).

    The bound adds the quadrature error estimates and the neglected tails,
    2·M·e^{-kωT}/(kω) for an integrand bounded by M·e^{-kω|τ|}.
    """
    terms = [integrand] if isinstance(integrand, Term) else list(integrand)
    estimate = bound = 0.0
    for t in terms:
        if not t.integrated:
            raise ValueError("numeric_integral needs integrated terms")
        fn, k, envelope = _term_integrand(t, spec.omega)
        if k == 0:
            raise ValueError(f"no decay: {t.text()}")
        for lo, hi in ((-spec.T, 0.0), (0.0, spec.T)):
            val, err = integrate.quad(fn, lo, hi, epsabs=spec.abs_tol / 4, epsrel=0, limit=spec.limit)
            estimate += val
            bound += err
        bound += 2 * envelope * math.exp(-k * spec.omega * spec.T) / (k * spec.omega)
    return estimate, bound


def truncation_bound(integrand: Expr | Term, spec: QuadratureSpec) -> float:
    terms = [integrand] if isinstance(integrand, Term) else list(integrand)
    total = 0.0
    for t in terms:
        _, k, envelope = _term_integrand(t, spec.omega)
        total += 2 * envelope * math.exp(-k * spec.omega * spec.T) / (k * spec.omega)
    return total


@dataclass(frozen=True)
class OracleEntry:
    integrand: str
    omega: str
    exact: float
    numeric: float
    abs_error: float
    truncation_bound: float

    def to_json(self) -> dict:
        return asdict(self)


def check_table(omega: Fraction | int, names: list[str] | None = None, abs_tol: float = 1e-10) -> list[OracleEntry]:
    """Compare every regular table entry with quadrature at one ω."""
    omega = Fraction(omega)
    spec = QuadratureSpec(float(omega), abs_tol=abs_tol)
    out = []
    for name in names or KNOWN_INTEGRALS.regular_names():
        e, v = KNOWN_INTEGRALS.entries[name]
        exact = float(v.subs(omega=omega).constant())
        numeric, _ = numeric_integral(e, spec)
        out.append(
            OracleEntry(
                integrand=f"{name}: {e.text()}",
                omega=str(omega),
                exact=exact,
                numeric=numeric,
                abs_error=abs(numeric - exact),
                truncation_bound=truncation_bound(e, spec),
            )
        )
    return out


def value_at(v: Value, omega: Fraction) -> float:
    return float(v.subs(omega=omega).constant())


# -- mollified δ ---------------------------------------------------------------


def _gaussian(tau, sigma: float):
    return np.exp(-0.5 * (tau / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))


def _mollified_sign(tau, sigma: float):
    # -1 + 2∫_{-∞}^τ δ_σ
    return special.erf(tau / (sigma * math.sqrt(2)))


@dataclass(frozen=True)
class MollifierRung:
    sigma: float
    delta_square_ratio: float
    delta_square_ratio_exact: float
    eps_square_delta: float


def mollified_delta_check(sigma: float, rungs: int = 4) -> list[MollifierRung]:
    """Gaussian δ_σ on a ladder σ, σ/10, ...: ∫δ_σ²/δ_σ(0) and ∫ε_σ²δ_σ.

    Heuristic only. The first ratio is 1/√2 for every σ, not the 1 that
    δ² = δ(0)δ would require, and the second tends to 1/3; mollification by
    itself does not single out the values the rules assign.
    """
    if not sigma > 0:
        raise ValueError("σ must be positive")
    out = []
    for r in range(rungs):
        s = sigma / 10**r
        lim = 40 * s
        sq, _ = integrate.quad(lambda x: _gaussian(x, s) ** 2, -lim, lim, epsabs=0, epsrel=1e-13, points=[0.0])
        eps2, _ = integrate.quad(
            lambda x: _mollified_sign(x, s) ** 2 * _gaussian(x, s), -lim, lim, epsabs=0, epsrel=1e-13, points=[0.0]
        )
        peak = float(_gaussian(0.0, s))
        exact_sq = 1 / (2 * s * math.sqrt(math.pi))
        out.append(MollifierRung(s, sq / peak, exact_sq / peak, eps2))
    return out
