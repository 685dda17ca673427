"""Market parameter types and the time-discretization map.

A discrete market is the quintuple (n, D, mu, sigma, sigma_hat): n i.i.d.
Gaussian price increments with mean mu and variance sigma^2, a D-step
information delay, and a static option pricing rule under which the terminal
price is Normal(S0, n * sigma_hat^2).  Its continuous counterpart is a
Bachelier price on [0, 1] with delay H, drift theta, volatility varsigma and
pricing volatility varsigma_hat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError


@dataclass(frozen=True)
class DiscreteMarket:
    """Discrete-time Gaussian market with a trading-information delay."""

    n: int
    delay: int
    mu: float
    sigma: float
    sigma_hat: float
    s0: float = 0.0


@dataclass(frozen=True)
class ContinuousMarket:
    """Bachelier market on [0, 1] observed with constant delay H."""

    H: float
    theta: float
    varsigma: float
    varsigma_hat: float
    p0: float = 0.0


def validate_discrete(m: DiscreteMarket) -> DiscreteMarket:
    """Return ``m`` unchanged if all invariants hold, else raise DomainError."""
    if m.n < 1:
        raise DomainError(f"n must be >= 1, got {m.n}")
    if m.delay < 0:
        raise DomainError(f"delay must be non-negative, got {m.delay}")
    if m.delay >= m.n:
        raise DomainError(f"delay must be < n, got delay={m.delay}, n={m.n}")
    if not m.sigma > 0:
        raise DomainError(f"sigma must be positive, got {m.sigma}")
    if not m.sigma_hat > 0:
        raise DomainError(f"sigma_hat must be positive, got {m.sigma_hat}")
    return m


def validate_continuous(c: ContinuousMarket) -> ContinuousMarket:
    """Return ``c`` unchanged if all invariants hold, else raise DomainError."""
    if not 0.0 < c.H <= 1.0:
        raise DomainError(f"H must lie in (0, 1], got {c.H}")
    if not c.varsigma > 0:
        raise DomainError(f"varsigma must be positive, got {c.varsigma}")
    if not c.varsigma_hat > 0:
        raise DomainError(f"varsigma_hat must be positive, got {c.varsigma_hat}")
    return c


def delay_steps(H: float, n: int) -> int:
    """Smallest integer m with m / n >= H, i.e. ceil(H * n).

    The ceiling is taken on an exact rational reconstruction of H's decimal
    form: float(H) * n can overshoot an exact multiple (0.07 * 100 is
    7.000000000000001) and a naive ceiling would misfire.
    """
    frac = Fraction(str(H)) * n
    return int(math.ceil(frac)) if frac.denominator != 1 else int(frac)


def discretize(c: ContinuousMarket, n: int) -> DiscreteMarket:
    """Sample the continuous market on the n-point grid {1/n, ..., 1}.

    The delay becomes D = ceil(H * n), the per-step drift theta / n and the
    per-step volatilities varsigma / sqrt(n), varsigma_hat / sqrt(n).
    """
    validate_continuous(c)
    if n < 2:
        raise DomainError(f"discretization needs n >= 2, got {n}")
    D = delay_steps(c.H, n)
    if D >= n:
        raise DomainError(
            f"delay ceil(H*n) = {D} must be < n = {n}; H = {c.H} is too large for this n"
        )
    root_n = math.sqrt(n)
    return DiscreteMarket(
        n=n,
        delay=D,
        mu=c.theta / n,
        sigma=c.varsigma / root_n,
        sigma_hat=c.varsigma_hat / root_n,
        s0=c.p0,
    )
