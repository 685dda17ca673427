"""Seeded path simulation and the closed-form Gaussian expectation oracle.

Paths are generated with the counter-based Philox 4x64 generator and an
inverse-CDF transform of open-interval uniforms, so a (market, count, seed)
triple reproduces bit-identical increments on any platform and path p owns
the contiguous counter slice [p*n, (p+1)*n).

For a quadratic wealth V(x) = (1/2) x'Qx + c'x + k and X ~ N(mu 1, sigma^2 I),

    E[-exp(-V)] = -exp(-k) |I + sigma^2 Q|^(-1/2)
                  * exp((1/2) b' M^-1 b - n mu^2 / (2 sigma^2)),

with M = I/sigma^2 + Q and b = mu/sigma^2 1 - c, valid iff I + sigma^2 Q is
positive definite (checked by attempting a Cholesky factorization).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import IntegrabilityError, LengthMismatch
from .market import DiscreteMarket, validate_discrete
from .solver import StrategyWeights, evaluate_paths

GENERATOR_ID = "philox4x64/ndtri-v1"


@dataclass(frozen=True)
class PathBatch:
    """Batch of i.i.d. Gaussian increment paths, reproducible from the seed."""

    n: int
    count: int
    seed: int
    increments: np.ndarray  # shape (count, n)


@dataclass(frozen=True)
class UtilityReport:
    """Empirical expected utility of a strategy with its analytic companion."""

    empirical_mean: float
    std_error: float
    analytic: float | None
    n_paths: int
    seed: int
    ess: float  # effective sample size of the exp(-V) weights

    def to_json(self) -> dict:
        return {
            "empirical_mean": self.empirical_mean,
            "std_error": self.std_error,
            "analytic": self.analytic,
            "n_paths": self.n_paths,
            "seed": self.seed,
            "ess": self.ess,
        }


def generate(m: DiscreteMarket, count: int, seed: int) -> PathBatch:
    """Draw ``count`` increment paths of length n from Normal(mu, sigma^2)."""
    validate_discrete(m)
    if count < 1:
        raise LengthMismatch(f"count must be >= 1, got {count}")
    gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    raw = gen.integers(0, 2**64, size=(count, m.n), dtype=np.uint64)
    # top 53 bits, centered: uniform on the open interval (0, 1)
    uniform = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    increments = m.mu + m.sigma * ndtri(uniform)
    return PathBatch(n=m.n, count=count, seed=seed, increments=increments)


def estimate_utility(batch: PathBatch, w: StrategyWeights, m: DiscreteMarket) -> UtilityReport:
    """Empirical mean and standard error of -exp(-V) over the batch.

    The analytic expectation of the same quadratic strategy is attached when
    it exists.  Accumulation relies on numpy's pairwise summation, which is
    deterministic for a given batch.
    """
    if batch.n != m.n:
        raise LengthMismatch(f"batch has n={batch.n}, market has n={m.n}")
    _, v = evaluate_paths(w, m, batch.increments)
    y = -np.exp(-v)
    mean = float(np.mean(y))
    stderr = float(np.std(y, ddof=1) / math.sqrt(batch.count)) if batch.count > 1 else 0.0
    ess = float(np.sum(np.abs(y)) ** 2 / np.sum(y * y))
    try:
        analytic = analytic_quadratic_utility(*strategy_quadratic_form(w, m), m)
    except IntegrabilityError:
        analytic = None
    return UtilityReport(
        empirical_mean=mean,
        std_error=stderr,
        analytic=analytic,
        n_paths=batch.count,
        seed=batch.seed,
        ess=ess,
    )


def strategy_quadratic_form(w: StrategyWeights, m: DiscreteMarket):
    """(Q, linear, constant) with V(x) = (1/2) x'Qx + linear.x + constant.

    The convolution part contributes w_|i-j| off the diagonal and the static
    quadratic adds 2*static_coeff everywhere; the constant is the negated
    price of the static leg.
    """
    n = m.n
    lag = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    kernel_full = np.concatenate([[0.0], w.kernel])  # lag 0 contributes nothing
    quad = kernel_full[lag] + 2.0 * w.static_coeff * np.ones((n, n))
    linear = np.full(n, w.merton)
    constant = -w.static_coeff * n * m.sigma_hat**2
    return quad, linear, constant


def analytic_quadratic_utility(
    quad: np.ndarray, linear: np.ndarray, constant: float, m: DiscreteMarket
) -> float:
    """E[-exp(-V)] in closed form for quadratic V under the market Gaussian."""
    n = m.n
    quad = np.asarray(quad, dtype=float)
    linear = np.asarray(linear, dtype=float)
    if quad.shape != (n, n) or linear.shape != (n,):
        raise LengthMismatch(f"form shapes {quad.shape}, {linear.shape} do not match n={n}")
    sig2 = m.sigma**2
    matrix = np.eye(n) / sig2 + quad
    try:
        chol = np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError as exc:
        raise IntegrabilityError("I + sigma^2 Q is not positive definite") from exc
    b = np.full(n, m.mu / sig2) - linear
    solved = np.linalg.solve(matrix, b)
    log_det = n * math.log(sig2) + 2.0 * float(np.sum(np.log(np.diag(chol))))
    exponent = -constant - 0.5 * log_det + 0.5 * float(b @ solved) - 0.5 * n * m.mu**2 / sig2
    return -math.exp(exponent)
