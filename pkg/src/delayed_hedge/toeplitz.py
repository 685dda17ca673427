"""Symmetric Toeplitz matrix A, its banded inverse, and dense oracles.

A is defined by A_ij = r_|i-j| with first row r = (a + 1, b_1, ..., b_{n-1});
its inverse is D-banded and is reconstructed explicitly from the vector v
that solves A v = e_0:

    v_0 = (a D + 1) / (a (D + 1) + 1),
    v_1 = ... = v_D = -a / (a (D + 1) + 1),
    v_{D+1} = ... = v_{n-1} = 0,

    [A^-1]_ij = (1/v_0) ( sum_{k=1..i^j} v_{i-k} v_{j-k}
                          - sum_{k=1..(i^j)-1} v_{n-i+k} v_{n-j+k} ),

with 1-based i, j and i^j = min(i, j).  The closed-form determinant is
|A| = (1 + (D+1) a)^{n-D} / (1 + D a)^{n-D-1}.

Dense inversion / determinant oracles (pivoted LAPACK via numpy) live here
too so that every closed form can be cross-checked on the same matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import IO

import numpy as np

from .errors import DomainError, SingularMatrix, SizeError

# Exhaustive minor enumeration is combinatorial; beyond this size it is
# pointless (the property is structural and small n already exercises it).
MINOR_ENUMERATION_LIMIT = 12

# Dense oracles refuse matrices whose condition estimate exceeds this.
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class SymToeplitz:
    """Symmetric Toeplitz matrix stored by its first row."""

    first_row: np.ndarray

    @property
    def n(self) -> int:
        return len(self.first_row)

    def to_dense(self) -> np.ndarray:
        idx = np.abs(np.subtract.outer(np.arange(self.n), np.arange(self.n)))
        return self.first_row[idx]


def build_matrix(a: float, tail: np.ndarray, n: int) -> SymToeplitz:
    """Assemble A from the root a and the weight tail (b_1, ..., b_{n-1})."""
    tail = np.asarray(tail, dtype=float)
    if len(tail) < n - 1:
        raise DomainError(f"need {n - 1} tail weights, got {len(tail)}")
    first_row = np.concatenate([[a + 1.0], tail[: n - 1]])
    return SymToeplitz(first_row=first_row)


def v_vector(a: float, delay: int, n: int) -> np.ndarray:
    """First column of A^-1 (the solution of A v = e_0)."""
    denom = a * (delay + 1) + 1.0
    if denom <= 0.0:
        raise DomainError(
            f"a = {a} violates a > -1/(D+1) for D = {delay}; v is undefined"
        )
    v = np.zeros(n)
    v[0] = (a * delay + 1.0) / denom
    v[1 : delay + 1] = -a / denom
    return v


def inverse_via_v(a: float, delay: int, n: int) -> np.ndarray:
    """Full inverse of A from the v-vector formula.

    The two partial sums telescope along diagonals,
    B[i, j] = B[i-1, j-1] + (v_i v_j - v_{n-i} v_{n-j}) / v_0 (0-based),
    which fills the matrix in O(n^2).  Out-of-band increments are exact zero
    products, so the result is D-banded to the bit.
    """
    if not 0 <= delay < n:
        raise DomainError(f"need 0 <= delay < n, got delay={delay}, n={n}")
    v = v_vector(a, delay, n)
    v0 = v[0]
    inv = np.empty((n, n))
    inv[0, :] = v
    inv[:, 0] = v
    for i in range(1, n):
        inv[i, 1:] = inv[i - 1, : n - 1] + (v[i] * v[1:] - v[n - i] * v[n - 1 : 0 : -1]) / v0
    return inv


def log_det_closed_form(a: float, delay: int, n: int) -> float:
    """log |A| = (n - D) log(1 + (D+1) a) - (n - D - 1) log(1 + D a)."""
    if a * (delay + 1) + 1.0 <= 0.0:
        raise DomainError(f"a = {a} violates a > -1/(D+1) for D = {delay}")
    return (n - delay) * math.log1p((delay + 1) * a) - (n - delay - 1) * math.log1p(delay * a)


def det_closed_form(a: float, delay: int, n: int) -> float:
    """|A| = (1 + (D+1) a)^(n-D) / (1 + D a)^(n-D-1), always positive."""
    return math.exp(log_det_closed_form(a, delay, n))


def check_banded(matrix: np.ndarray, delay: int, tol: float) -> bool:
    """True iff every entry with |i - j| > delay is below tol * max |entry|."""
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    mask = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) > delay
    if not mask.any():
        return True
    scale = np.max(np.abs(matrix))
    return bool(np.all(np.abs(matrix[mask]) <= tol * scale))


def check_vanishing_minors(matrix: SymToeplitz, delay: int, tol: float = 1e-9) -> bool:
    """Exhaustively test that all sub-(D+1)-minors with i_1 > j_{D+1} - D vanish.

    Each minor is normalized by the Hadamard bound (product of row norms) of
    its submatrix, so the tolerance is scale invariant.  Raises SizeError for
    n > MINOR_ENUMERATION_LIMIT.
    """
    n = matrix.n
    if n > MINOR_ENUMERATION_LIMIT:
        raise SizeError(f"minor enumeration capped at n <= {MINOR_ENUMERATION_LIMIT}, got {n}")
    k = delay + 1
    if k > n:
        return True
    dense = matrix.to_dense()
    subsets = [np.array(c) for c in combinations(range(n), k)]
    # 1-based condition i_1 > j_{D+1} - D reads i[0] > j[-1] - delay in 0-based form.
    pairs = [(rows, cols) for rows in subsets for cols in subsets if rows[0] > cols[-1] - delay]
    chunk = 4096
    for start in range(0, len(pairs), chunk):
        block = pairs[start : start + chunk]
        sub = np.stack([dense[np.ix_(r, c)] for r, c in block])
        dets = np.linalg.det(sub)
        row_norms = np.linalg.norm(sub, axis=2)
        scale = np.maximum(np.prod(row_norms, axis=1), 1e-300)
        if np.any(np.abs(dets) > tol * scale):
            return False
    return True


def _require_well_conditioned(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {matrix.shape}")
    cond = np.linalg.cond(matrix, 1)
    if not np.isfinite(cond) or cond >= CONDITION_LIMIT:
        raise SingularMatrix(f"condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.0e}")
    return matrix


def dense_inverse(matrix: np.ndarray) -> np.ndarray:
    """Inverse by pivoted elimination; oracle for inverse_via_v."""
    return np.linalg.inv(_require_well_conditioned(matrix))


def dense_det(matrix: np.ndarray) -> float:
    """Determinant by pivoted elimination; oracle for det_closed_form."""
    return float(np.linalg.det(_require_well_conditioned(matrix)))


def dump_csv(matrix: np.ndarray, stream: IO[str]) -> None:
    """Debug dump, one row per line, full '%.17g' precision."""
    for row in np.atleast_2d(np.asarray(matrix, dtype=float)):
        stream.write(",".join("%.17g" % x for x in row) + "\n")
