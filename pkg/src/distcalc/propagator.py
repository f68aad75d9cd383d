"""Closed forms of the harmonic-oscillator correlation functions.

Derivatives are taken with respect to the single argument τ = τ₁ - τ₂.
The second derivative splits into a distributional part -δ(τ) and a smooth
part ω²Δ(τ); only the smooth part is ever evaluated numerically here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .value import DELTA0, DELTA_AT_ORIGIN, OMEGA, ZERO, Value


def _check_omega(omega: float) -> None:
    if not omega > 0:
        raise ValueError(f"ω must be positive, got {omega}")


def eval_smooth(n: int, tau, omega: float):
    """Smooth part of the n-th derivative of Δ at τ (scalar or array)."""
    _check_omega(omega)
    tau = np.asarray(tau, dtype=float)
    decay = np.exp(-omega * np.abs(tau))
    if n == 0:
        out = decay / (2 * omega)
    elif n == 1:
        # np.sign(0) == 0 encodes ε(0) = 0
        out = -0.5 * np.sign(tau) * decay
    elif n == 2:
        out = omega * decay / 2
    else:
        raise ValueError(f"derivative order must be 0, 1 or 2, got {n}")
    return out.item() if out.ndim == 0 else out


def mixed_derivative_smooth(tau, omega: float):
    """Smooth part of ∂τ∂τ'Δ(τ - τ'), i.e. of δ(τ) - (ω/2)e^{-ω|τ|}."""
    _check_omega(omega)
    tau = np.asarray(tau, dtype=float)
    out = -omega * np.exp(-omega * np.abs(tau)) / 2
    return out.item() if out.ndim == 0 else out


def at_origin(n: int) -> Value:
    """Δ, Δ̇, Δ̈ at τ = 0 as exact values (δ(0) kept formal)."""
    if n == 0:
        return DELTA_AT_ORIGIN
    if n == 1:
        return ZERO
    if n == 2:
        return -DELTA0 + OMEGA**2 * DELTA_AT_ORIGIN
    raise ValueError(f"derivative order must be 0, 1 or 2, got {n}")


@dataclass(frozen=True)
class PropClosedForm:
    omega: float
    n: int = 0

    def __post_init__(self) -> None:
        _check_omega(self.omega)
        if self.n not in (0, 1, 2):
            raise ValueError(f"derivative order must be 0, 1 or 2, got {self.n}")

    @property
    def delta_weight(self) -> int:
        """Coefficient of δ(τ) in the n-th derivative."""
        return -1 if self.n == 2 else 0

    def __call__(self, tau):
        return eval_smooth(self.n, tau, self.omega)
