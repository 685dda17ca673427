"""Continuous-limit weight kernel and limit value for vanishing step size.

As the trading grid is refined, n * a_n converges to alpha / (1 - alpha H)
where alpha depends only on the delay H and the ratio varsigma / varsigma_hat,
and the scaled weights converge to the function kappa on [0, 1] that solves
the delay equation

    kappa_t = alpha * integral of kappa over [t - H, t]   for t >= H,

with constant history kappa_t = alpha / (1 - alpha H) on [0, H).  Solving by
the method of steps gives an exponential polynomial on each interval
[kH, (k+1)H):

    kappa_t = alpha/(1 - alpha H)
              + exp(alpha (t - kH)) * sum_{j=0}^{k-1} c_{k-j} (-alpha)^j (t - kH)^j / j!,

with c_1 = -alpha and c_{k+1} = exp(alpha H) * sum_{j=0}^{k-1} c_{k-j} (-alpha H)^j / j!.
kappa jumps at H and is continuous on [H, 1].  The limit expected utility is

    U = -exp((1/2)(-theta^2/varsigma^2
              + alpha (varsigma_hat^2 / (varsigma^2 (1 - alpha H)) + H - 1))) * sqrt(1 - alpha H)

and the limit static option is alpha / (2 varsigma^2 (1 - alpha H)) * (P_1 - P_0)^2.

An independent RK4 method-of-steps integrator and the first ten c_k in closed
form are provided as cross-check oracles for the recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .market import ContinuousMarket, validate_continuous


def alpha(H: float, varsigma: float, varsigma_hat: float) -> float:
    """The limit root scale alpha(H, varsigma, varsigma_hat).

    Equals (1/H) (1 - 2 / (H x + sqrt((H x)^2 + 4 x (1 - H)))) with
    x = varsigma^2 / varsigma_hat^2.  The numerator is expanded through its
    conjugate when H x <= 2 so that equal volatilities give exactly zero
    instead of a cancellation residue.
    """
    if not 0.0 < H <= 1.0:
        raise DomainError(f"H must lie in (0, 1], got {H}")
    if not (varsigma > 0 and varsigma_hat > 0):
        raise DomainError("volatilities must be positive")
    x = varsigma**2 / varsigma_hat**2
    hx = H * x
    root = math.sqrt(hx * hx + 4.0 * x * (1.0 - H))
    if hx <= 2.0:
        numerator = 4.0 * (x - 1.0) / (root + 2.0 - hx)
    else:
        numerator = (hx - 2.0) + root
    return numerator / (H * (hx + root))


def interval_count(H: float) -> int:
    """K = ceil(1/H), computed on the exact decimal rational of H."""
    frac = 1 / Fraction(str(H))
    return int(math.ceil(frac)) if frac.denominator != 1 else int(frac)


def c_coefficients(alpha_value: float, H: float) -> np.ndarray:
    """The K = ceil(1/H) interval constants c_1..c_K of the kernel.

    c[k] (0-based) holds c_{k+1}.  Each step of the recurrence accumulates
    c_{k-j} (-alpha H)^j / j! with an incrementally updated term, so no
    explicit factorials appear.
    """
    K = interval_count(H)
    c = np.zeros(K)
    if K >= 1:
        c[0] = -alpha_value
    growth = math.exp(alpha_value * H)
    for k in range(1, K):
        term = 1.0
        total = 0.0
        for j in range(k):
            total += c[k - 1 - j] * term
            term *= (-alpha_value * H) / (j + 1)
        c[k] = growth * total
    return c


@dataclass(frozen=True)
class KernelSpec:
    """alpha, delay H, interval count K, and the interval constants c_1..c_K."""

    alpha: float
    H: float
    K: int
    c: np.ndarray

    @property
    def level(self) -> float:
        """Constant value of kappa on [0, H)."""
        return self.alpha / (1.0 - self.alpha * self.H)


def kernel_spec(H: float, varsigma: float, varsigma_hat: float) -> KernelSpec:
    a = alpha(H, varsigma, varsigma_hat)
    return KernelSpec(alpha=a, H=H, K=interval_count(H), c=c_coefficients(a, H))


def spec_for_market(c: ContinuousMarket) -> KernelSpec:
    validate_continuous(c)
    return kernel_spec(c.H, c.varsigma, c.varsigma_hat)


def _piece(t: float, k: int, spec: KernelSpec) -> float:
    """Evaluate interval k's exponential polynomial at t (no domain snapping).

    Evaluating a piece outside [kH, (k+1)H) yields its one-sided analytic
    continuation, which is what quadrature needs at breakpoints.
    """
    if k <= 0:
        return spec.level
    u = t - k * spec.H
    term = 1.0
    total = 0.0
    for j in range(k):
        total += spec.c[k - 1 - j] * term
        term *= (-spec.alpha) * u / (j + 1)
    return spec.level + math.exp(spec.alpha * u) * total


def _interval_index(t: float, spec: KernelSpec) -> int:
    # Right-continuous everywhere except t = 1 (and t = KH when 1/H is an
    # integer), which belongs to the last interval by left-evaluation.
    return min(int(math.floor(t / spec.H)), spec.K - 1)


def kappa(t: float, spec: KernelSpec) -> float:
    """The kernel kappa at t in [0, 1]; exactly the constant level for t < H."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t}")
    if t < spec.H:
        return spec.level
    return _piece(t, _interval_index(t, spec), spec)


def gamma_kernel(u: float, spec: KernelSpec) -> float:
    """Strategy weight at lag u: kappa_u minus the constant level (0 below H)."""
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"lag must lie in [0, 1], got {u}")
    if u < spec.H:
        return 0.0
    return _piece(u, _interval_index(u, spec), spec) - spec.level


def _simpson_piece(spec: KernelSpec, k: int, lo: float, hi: float, panels: int) -> float:
    """Composite Simpson of interval k's piece over [lo, hi]."""
    nodes = np.linspace(lo, hi, 2 * panels + 1)
    vals = np.array([_piece(t, k, spec) for t in nodes])
    h = (hi - lo) / (2 * panels)
    return h / 3.0 * (vals[0] + vals[-1] + 4.0 * vals[1:-1:2].sum() + 2.0 * vals[2:-2:2].sum())


def integrate_kappa(spec: KernelSpec, lo: float, hi: float, quadsteps: int) -> float:
    """Integral of kappa over [lo, hi], split at multiples of H.

    Each smooth piece is integrated with its own polynomial (one-sided at the
    jump in H) and gets a share of ``quadsteps`` Simpson panels proportional
    to its length.
    """
    if hi < lo:
        raise DomainError(f"empty integration range [{lo}, {hi}]")
    if hi == lo:
        return 0.0
    breaks = sorted({lo, hi} | {k * spec.H for k in range(spec.K + 1) if lo < k * spec.H < hi})
    total = 0.0
    for left, right in zip(breaks[:-1], breaks[1:]):
        k = _interval_index(0.5 * (left + right), spec)
        panels = max(1, int(math.ceil(quadsteps * (right - left) / spec.H)))
        total += _simpson_piece(spec, k, left, right, panels)
    return total


def kappa_integral_residual(t: float, spec: KernelSpec, quadsteps: int = 2000) -> float:
    """kappa_t - alpha * integral of kappa over [t - H, t] (zero in theory)."""
    if not spec.H <= t <= 1.0:
        raise DomainError(f"t must lie in [H, 1], got {t}")
    return kappa(t, spec) - spec.alpha * integrate_kappa(spec, t - spec.H, t, quadsteps)


def limit_value(c: ContinuousMarket) -> float:
    """Limit of the optimal expected utility as the trading frequency grows."""
    validate_continuous(c)
    a = alpha(c.H, c.varsigma, c.varsigma_hat)
    one_minus = 1.0 - a * c.H
    exponent = 0.5 * (
        -c.theta**2 / c.varsigma**2
        + a * (c.varsigma_hat**2 / (c.varsigma**2 * one_minus) + c.H - 1.0)
    )
    return -math.exp(exponent) * math.sqrt(one_minus)


def limit_static_coeff(c: ContinuousMarket) -> float:
    """Limit coefficient of (P_1 - P_0)^2 in the static option."""
    validate_continuous(c)
    a = alpha(c.H, c.varsigma, c.varsigma_hat)
    return a / (2.0 * c.varsigma**2 * (1.0 - a * c.H))


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------

def kappa_ode_grid(spec: KernelSpec, step: float = 1e-4):
    """Integrate the delay equation kappa' = alpha (kappa_t - kappa_{t-H}) by RK4.

    Method of steps: each interval [kH, (k+1)H] is an ODE whose delayed term
    is read from the previous interval's stored grid (4-point Lagrange for the
    half-step stages).  The initial value at t = H is alpha * H * level,
    taken from the integral equation itself, so the integrator shares nothing
    with the series representation.  Returns (ts, values) on [H, min(KH, 1)].
    """
    H, K, al = spec.H, spec.K, spec.alpha
    m = max(4, int(math.ceil(H / step)))
    h = H / m
    history = np.full(m + 1, spec.level)  # kappa on [0, H], left limit at H

    def interp(values: np.ndarray, q: float) -> float:
        base = min(max(int(math.floor(q)) - 1, 0), len(values) - 4)
        xs = np.arange(base, base + 4, dtype=float)
        w = [
            np.prod([(q - xs[k]) / (xs[j] - xs[k]) for k in range(4) if k != j])
            for j in range(4)
        ]
        return float(sum(w[j] * values[base + j] for j in range(4)))

    y = al * H * spec.level
    ts, ys = [H], [y]
    for interval in range(1, K):
        current = np.empty(m + 1)
        current[0] = y
        t0 = interval * H
        for i in range(m):
            g0 = history[i]
            g_half = interp(history, i + 0.5)
            g1 = history[i + 1]
            k1 = al * (y - g0)
            k2 = al * (y + 0.5 * h * k1 - g_half)
            k3 = al * (y + 0.5 * h * k2 - g_half)
            k4 = al * (y + h * k3 - g1)
            y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            current[i + 1] = y
            ts.append(t0 + (i + 1) * h)
            ys.append(y)
        history = current
    ts = np.array(ts)
    ys = np.array(ys)
    keep = ts <= 1.0 + 1e-12
    return ts[keep], ys[keep]


def c_closed_forms(alpha_value: float, H: float) -> np.ndarray:
    """First ten interval constants in closed form (cross-check oracle)."""
    a = alpha_value
    E = math.exp(a * H)
    z = a * H
    return np.array(
        [
            -a,
            -E * a,
            E * a * (z - E),
            E * a * (-(z**2) + 4 * E * z - 2 * E**2) / 2,
            E * (-6 * E**3 + (18 * E**2 + z * (z - 12 * E)) * z) * a / 6,
            -E * a * (z**4 - 32 * E * z**3 + 108 * E**2 * z**2 - 96 * z * E**3 + 24 * E**4) / 24,
            E * a * (
                -120 * E**5
                + z * (z**4 - 80 * E * z**3 + 540 * E**2 * z**2 - 960 * z * E**3 + 600 * E**4)
            ) / 120,
            -E * a / 720 * (
                720 * E**6
                + z * (
                    z**5 - 192 * E * z**4 + 2430 * E**2 * z**3
                    - 7680 * z**2 * E**3 + 9000 * z * E**4 - 4320 * E**5
                )
            ),
            E * a / 5040 * (
                -5040 * E**7
                + z * (
                    z**6 - 448 * E * z**5 + 10206 * E**2 * z**4 - 53760 * z**3 * E**3
                    + 105000 * z**2 * E**4 - 90720 * z * E**5 + 35280 * E**6
                )
            ),
            -E * a / 40320 * (
                40320 * E**8
                + z * (
                    z**7 - 1024 * E * z**6 + 40824 * E**2 * z**5 - 344064 * z**4 * E**3
                    + 1050000 * z**3 * E**4 - 1451520 * z**2 * E**5
                    + 987840 * z * E**6 - 322560 * E**7
                )
            ),
        ]
    )
