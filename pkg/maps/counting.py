"""
Counts of rooted type-II triangulations of an ℓ-gon with n inner vertices.

Root-triangle decomposition: the triangle on the root edge either has a new
inner vertex as its apex (leaving an (ℓ+1)-gon with n-1 inner vertices) or
has boundary vertex k as apex (splitting into a k-gon and an (ℓ-k+1)-gon):

    T(ℓ, n) = T(ℓ+1, n-1) + Σ_{k=2}^{ℓ-1} Σ_{n1} T(k, n1)·T(ℓ-k+1, n-n1)

with the degenerate 2-gon T(2, 0) = 1 (two edges glued) and T(2, n) = T(3, n-1).
"""

from functools import lru_cache
from math import factorial

import numpy as np
from scipy.special import gammaln

BOLTZMANN_WEIGHT = 2.0 / 27.0


@lru_cache(maxsize=64)
def _decomposition_table(ell: int, n: int) -> tuple[dict[int, int], ...]:
    rows: list[dict[int, int]] = []
    for m in range(n + 1):
        row: dict[int, int] = {2: 1 if m == 0 else rows[m - 1][3]}
        for p in range(3, ell + n - m + 1):
            total = rows[m - 1][p + 1] if m >= 1 else 0
            for k in range(2, p):
                for n1 in range(m + 1):
                    left  = row[k] if n1 == m else rows[n1][k]
                    right = row[p - k + 1] if n1 == 0 else rows[m - n1][p - k + 1]
                    total += left * right
            row[p] = total
        rows.append(row)
    return tuple(rows)


def count_triangulations(ell: int, n: int) -> int:
    """Exact count from the root-triangle decomposition (Python big integers)."""
    if ell < 2 or n < 0:
        raise ValueError(f"count_triangulations needs ℓ >= 2 and n >= 0, got ({ell}, {n})")
    return _decomposition_table(ell, n)[n][ell]


def closed_form_count(ell: int, n: int) -> int:
    """2^{n+1}(2ℓ-3)!(2ℓ-4+3n)! / ((ℓ-2)!² n! (2ℓ+2n-2)!)."""
    if ell < 2 or n < 0:
        raise ValueError(f"closed_form_count needs ℓ >= 2 and n >= 0, got ({ell}, {n})")
    num = 2 ** (n + 1) * factorial(2 * ell - 3) * factorial(2 * ell - 4 + 3 * n)
    den = factorial(ell - 2) ** 2 * factorial(n) * factorial(2 * ell + 2 * n - 2)
    return num // den


def log_count(ell, n):
    """Vectorised log T(ℓ, n) from the closed form; ℓ >= 2, n >= 0."""
    ell = np.asarray(ell, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    return (
        (n + 1) * np.log(2.0)
        + gammaln(2 * ell - 2)
        + gammaln(2 * ell - 3 + 3 * n)
        - 2 * gammaln(ell - 1)
        - gammaln(n + 1)
        - gammaln(2 * ell + 2 * n - 1)
    )


def boltzmann_log_weights(ell: int, n_max: int) -> np.ndarray:
    """log( T(ℓ,k)·(2/27)^k ) for k = 0..n_max."""
    k = np.arange(n_max + 1)
    return log_count(ell, k) + k * np.log(BOLTZMANN_WEIGHT)
