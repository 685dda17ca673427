"""Explicit solution of the delayed semistatic hedging problem.

For the market (n, D, mu, sigma, sigma_hat) the scalar a is the largest root
of the quadratic

    D (D+1) z^2 + (2D + 1 - D (D+1) sigma^2 / (n sigma_hat^2)) z
        + 1 - sigma^2 / sigma_hat^2 = 0            (a = sigma^2/sigma_hat^2 - 1 for D = 0),

the weight sequence is b_1 = ... = b_D = a, b_i = a / (a D + 1) * sum of the
previous D weights, and the optimal strategy holds

    gamma_i = mu / sigma^2 + (1 / sigma^2) sum_{j < i} (b_{i-j} - a) X_j

stocks plus the static quadratic option (a / (2 sigma^2)) (S_n - S_0)^2.
The achieved expected utility is

    u = -exp(n (a sigma_hat^2 - mu^2) / (2 sigma^2)) * |A|^(-1/2)

with |A| the closed-form Toeplitz determinant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import (
    DomainError,
    IntegrabilityError,
    LengthMismatch,
    NumericalError,
    OptimizerFailure,
    SizeError,
)
from .market import DiscreteMarket, validate_discrete
from .toeplitz import SymToeplitz, build_matrix, log_det_closed_form

# Residual guard for the explicit root; theory guarantees a real root, so a
# discriminant below -CLAMP (relative) means the inputs are inconsistent.
DISCRIMINANT_CLAMP = 1e-12
ROOT_RESIDUAL_TOL = 1e-12

BRUTE_FORCE_MAX_N = 3


@dataclass(frozen=True)
class QuadraticCoeffs:
    """Coefficients (qa, qb, qc) of the quadratic equation solved by a."""

    qa: float
    qb: float
    qc: float

    def residual(self, z: float) -> float:
        return self.qa * z * z + self.qb * z + self.qc

    @property
    def scale(self) -> float:
        return max(abs(self.qa), abs(self.qb), abs(self.qc))


@dataclass(frozen=True)
class HedgeSolution:
    """Root a, weights b_1..b_{n-1}, static coefficient, Merton ratio, value."""

    a: float
    b: np.ndarray
    static_coeff: float
    merton: float
    value: float


@dataclass(frozen=True)
class StrategyWeights:
    """Convolution form of the optimal strategy.

    gamma_i = merton + sum_{j=1..i-1} kernel[i-j] x_j with kernel[i] = (b_i - a) / sigma^2
    (1-based lags; kernel[1..D] are exact zeros, which is what makes the
    strategy measurable for the delayed filtration), plus the static payoff
    static_coeff * (S_n - S_0)^2.
    """

    merton: float
    kernel: np.ndarray
    static_coeff: float


def quadratic_coeffs(m: DiscreteMarket) -> QuadraticCoeffs:
    D = m.delay
    ratio2 = m.sigma**2 / m.sigma_hat**2
    return QuadraticCoeffs(
        qa=float(D * (D + 1)),
        qb=2 * D + 1 - D * (D + 1) * ratio2 / m.n,
        qc=1.0 - ratio2,
    )


def solve_a(m: DiscreteMarket) -> float:
    """Largest root of the hedging quadratic, via the explicit expression."""
    validate_discrete(m)
    D = m.delay
    if m.sigma == m.sigma_hat:
        return 0.0  # consistent pricing; the formula only recovers this up to rounding
    if D == 0:
        return m.sigma**2 / m.sigma_hat**2 - 1.0
    q = quadratic_coeffs(m)
    disc = q.qb * q.qb - 4.0 * q.qa * q.qc
    if disc < 0.0:
        if disc < -DISCRIMINANT_CLAMP * max(1.0, q.qb * q.qb, abs(4.0 * q.qa * q.qc)):
            raise NumericalError(f"negative discriminant {disc} for {m}")
        disc = 0.0
    a = m.sigma**2 / (2 * m.n * m.sigma_hat**2) + (math.sqrt(disc) - 2 * D - 1) / (2 * q.qa)
    if a * (D + 1) + 1.0 <= 0.0:
        raise NumericalError(f"root a = {a} violates a > -1/(D+1) for {m}")
    # evaluating the quadratic at the rounded root leaves ~ |q'(a)| |a| eps,
    # so the sanity net scales with the root magnitude
    if abs(q.residual(a)) > ROOT_RESIDUAL_TOL * q.scale * max(1.0, abs(a)):
        raise NumericalError(f"root residual {q.residual(a)} too large for {m}")
    return a


def weights_b(m: DiscreteMarket, a: float, count: int) -> np.ndarray:
    """First ``count`` weights b_1, b_2, ... via the depth-D recursion.

    The window sum of the last D weights is updated in O(1) per step.
    """
    D = m.delay
    if D == 0:
        return np.zeros(count)
    if a * (D + 1) + 1.0 <= 0.0:
        raise DomainError(f"a = {a} violates a > -1/(D+1) for D = {D}")
    b = np.empty(count)
    b[: min(D, count)] = a
    if count <= D:
        return b
    ratio = a / (a * D + 1.0)
    window = a * D  # sum of b_{i-D} .. b_{i-1}
    for i in range(D, count):
        b[i] = ratio * window
        window += b[i] - b[i - D]
    return b


def solve(m: DiscreteMarket) -> HedgeSolution:
    """Assemble the full explicit solution for the market."""
    a = solve_a(m)
    b = weights_b(m, a, m.n - 1) if m.n > 1 else np.zeros(0)
    return HedgeSolution(
        a=a,
        b=b,
        static_coeff=a / (2.0 * m.sigma**2),
        merton=m.mu / m.sigma**2,
        value=value(m),
    )


def strategy(m: DiscreteMarket) -> StrategyWeights:
    """Optimal strategy in convolution form."""
    a = solve_a(m)
    b = weights_b(m, a, m.n - 1) if m.n > 1 else np.zeros(0)
    return StrategyWeights(
        merton=m.mu / m.sigma**2,
        kernel=(b - a) / m.sigma**2,
        static_coeff=a / (2.0 * m.sigma**2),
    )


def value(m: DiscreteMarket) -> float:
    """Optimal expected exponential utility (strictly negative)."""
    a = solve_a(m)
    exponent = m.n * (a * m.sigma_hat**2 - m.mu**2) / (2.0 * m.sigma**2)
    return -math.exp(exponent - 0.5 * log_det_closed_form(a, m.delay, m.n))


def hedge_matrix(m: DiscreteMarket) -> SymToeplitz:
    """The Toeplitz matrix A whose inverse drives the dual measure."""
    a = solve_a(m)
    tail = weights_b(m, a, m.n - 1) if m.n > 1 else np.zeros(0)
    return build_matrix(a, tail, m.n)


def evaluate_paths(w: StrategyWeights, m: DiscreteMarket, x: np.ndarray):
    """Holdings and terminal wealth for a batch of increment paths.

    ``x`` has shape (paths, n); returns (gammas with the same shape, V with
    shape (paths,)).  The static leg costs its pricing-measure expectation
    static_coeff * n * sigma_hat^2.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != m.n:
        raise LengthMismatch(f"expected paths of length n={m.n}, got shape {x.shape}")
    count, n = x.shape
    gammas = np.empty_like(x)
    for i in range(n):
        acc = np.full(count, w.merton)
        if i > 0:
            # kernel[0] is lag 1; gamma_{i+1} sees increments x_0 .. x_{i-1}
            acc += x[:, :i] @ w.kernel[i - 1 :: -1]
        gammas[:, i] = acc
    total = x.sum(axis=1)
    v = w.static_coeff * total**2 + (gammas * x).sum(axis=1) - w.static_coeff * n * m.sigma_hat**2
    return gammas, v


def evaluate_on_path(w: StrategyWeights, m: DiscreteMarket, x: np.ndarray):
    """Holdings gamma_1..gamma_n and terminal value V for one path of increments."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) != m.n:
        raise LengthMismatch(f"expected {m.n} increments, got shape {x.shape}")
    gammas, v = evaluate_paths(w, m, x[None, :])
    return gammas[0], float(v[0])


def brute_force_optimum(m: DiscreteMarket):
    """Numerically maximize expected utility over quadratic-static strategies.

    The search family is f(s) = q (s - S0)^2 + l (s - S0) plus holdings that
    are affine in the increments observable under the delayed filtration;
    the theoretical optimum lies inside it.  Expectations are evaluated with
    the closed Gaussian form, and the search is Nelder-Mead from several
    starts.  Only n <= BRUTE_FORCE_MAX_N is allowed.
    """
    from .mc import analytic_quadratic_utility  # local import, mc depends on this module

    validate_discrete(m)
    n = m.n
    if n > BRUTE_FORCE_MAX_N:
        raise SizeError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    # gamma_i may load on x_j exactly when j <= i - 1 - D (1-based).
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, i - m.delay)]
    dim = 2 + n + len(pairs)

    def assemble(p):
        q, l = p[0], p[1]
        g = np.asarray(p[2 : 2 + n])
        quad = 2.0 * q * np.ones((n, n))
        for (i, j), h in zip(pairs, p[2 + n :]):
            quad[i - 1, j - 1] += h
            quad[j - 1, i - 1] += h
        lin = l * np.ones(n) + g
        const = -q * n * m.sigma_hat**2
        return quad, lin, const

    def negative_utility(p):
        try:
            return -analytic_quadratic_utility(*assemble(p), m)
        except IntegrabilityError:
            return 1e6  # outside the integrable region

    best = None
    for shift in (0.0, 0.1, -0.1):
        res = minimize(
            negative_utility,
            np.full(dim, shift),
            method="Nelder-Mead",
            options=dict(xatol=1e-10, fatol=1e-13, maxiter=40000, maxfev=40000),
        )
        if best is None or res.fun < best.fun:
            best = res
    if best is None or not np.isfinite(best.fun) or best.fun >= 1e6:
        raise OptimizerFailure("no integrable optimum found")
    return -best.fun, list(best.x)
