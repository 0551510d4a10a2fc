"""Coefficient recursion for the polynomial ansatz in X_2.

With psi = p(x) exp(-int X_N) and p = sum_m a_m X_2^m, the eigenvalue equation
becomes one linear condition per power X_2^m, m = 0..M+N-2.  Row m reads

    -(m+2)(m+1) C_1^2 a_{m+2}
    + sum_{n=0}^{N-3} 2 C_{N-1-n} / (n! C_1^{N-3}) (m-n+1) a_{m-n+1}
    + sum_{n=0}^{N-4} (1+alpha)/n! C_{N-2-n} / C_1^{N-3} a_{m-n}
    + (2m-N+3+alpha(N-1)) / ((N-1)! C_1^{N-3}) a_{m-N+2}
    - E a_m  = 0

with a_k = 0 outside 0..M.  The row helpers only use +, * and / by scalars, so
``a`` and ``E`` may be numpy ``Polynomial`` objects (used to get the energy
condition as a polynomial).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .group import BetaVector, CasimirSet, betas_from_casimirs, casimirs


def alpha_for(N: int, M: int) -> float:
    """alpha = -1 - 2M/(N-1), forced by the top row for N >= 3."""
    if N < 3:
        raise ValueError("alpha is unconstrained for the harmonic case N = 2")
    if M < 0:
        raise ValueError("M must be >= 0")
    return -1.0 - 2.0 * M / (N - 1)


def derive_alpha_and_topcoeff(N: int, M: int) -> tuple[float, float]:
    """Return ``(alpha, c)`` with a_{M-1} = c * E * a_M.

    c is -1 for N = 3 and 0 otherwise.
    """
    return alpha_for(N, M), (-1.0 if N == 3 else 0.0)


@dataclass(frozen=True)
class QesProblem:
    """Hamiltonian X_0^2 + X_N^2 + alpha X_{N-1} with a degree-M ansatz."""

    N: int
    M: int
    alpha: float
    betas: BetaVector
    symmetrized: bool = False
    casimirs: CasimirSet = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        betas = self.betas if isinstance(self.betas, BetaVector) else BetaVector(self.betas)
        object.__setattr__(self, "betas", betas)
        if betas.N != self.N:
            raise ValueError(f"expected {self.N} betas, got {betas.N}")
        if self.M < 0:
            raise ValueError("M must be >= 0")
        if self.N >= 3 and abs(self.alpha - alpha_for(self.N, self.M)) > 1e-12:
            raise ValueError(
                f"alpha={self.alpha} inconsistent with N={self.N}, M={self.M} "
                f"(need {alpha_for(self.N, self.M)})"
            )
        object.__setattr__(self, "casimirs", casimirs(betas))

    @classmethod
    def from_betas(cls, betas, M: int, alpha: float | None = None, symmetrized=False):
        betas = betas if isinstance(betas, BetaVector) else BetaVector(betas)
        if alpha is None:
            alpha = alpha_for(betas.N, M)
        return cls(betas.N, M, float(alpha), betas, symmetrized)

    @classmethod
    def from_casimirs(cls, C, M: int, beta2: float = 0.0, alpha=None, symmetrized=False):
        return cls.from_betas(betas_from_casimirs(C, beta2), M, alpha, symmetrized)


def row_scale(N: int, C1: float) -> float:
    """(N-1)! C_1^(N-3); rows are compared after multiplying by this."""
    return factorial(N - 1) * float(C1) ** (N - 3)


def _get(a, k):
    return a[k] if 0 <= k < len(a) else 0.0


def row_terms(m: int, N: int, alpha: float, C, E, a) -> list:
    """Individual terms of row m (their sum is the row residual)."""
    C1 = C[0]
    p = C1 ** (N - 3)
    terms = [-(m + 2) * (m + 1) * C1**2 * _get(a, m + 2)]
    for n in range(N - 2):
        terms.append(2 * C[N - 2 - n] / (factorial(n) * p) * (m - n + 1) * _get(a, m - n + 1))
    for n in range(N - 3):
        terms.append((1 + alpha) / factorial(n) * C[N - 3 - n] / p * _get(a, m - n))
    terms.append(lowest_coefficient(m, N, alpha, C1) * _get(a, m - N + 2))
    terms.append(-E * _get(a, m))
    return terms


def lowest_coefficient(m: int, N: int, alpha: float, C1: float) -> float:
    """Coefficient of a_{m-N+2} in row m."""
    return (2 * m - N + 3 + alpha * (N - 1)) / (factorial(N - 1) * C1 ** (N - 3))


def recursion_rows(N: int, M: int, alpha: float, C, E, a) -> list:
    """Row residuals for m = 0..M+N-2 (generic arithmetic)."""
    C = tuple(C)
    if C[0] == 0:
        raise ZeroDivisionError("C_1 = 0")
    rows = []
    for m in range(M + N - 1):
        terms = row_terms(m, N, alpha, C, E, a)
        total = terms[0]
        for t in terms[1:]:
            total = total + t
        rows.append(total)
    return rows


def residual_vector(problem: QesProblem, C, E: float, a) -> np.ndarray:
    """Residual of every recursion row for a candidate (a, E, C)."""
    C = tuple(float(c) for c in C)
    if len(C) != problem.N - 1:
        raise ValueError(f"need {problem.N - 1} Casimirs, got {len(C)}")
    a = [float(v) for v in a]
    if len(a) != problem.M + 1:
        raise ValueError(f"need {problem.M + 1} coefficients, got {len(a)}")
    return np.array(recursion_rows(problem.N, problem.M, problem.alpha, C, float(E), a))


def scaled_residual(problem: QesProblem, C, E: float, a) -> float:
    """Largest row residual relative to that row's largest term.

    Rows are first multiplied by (N-1)! C_1^(N-3); the denominator is
    max(1, largest |term|).
    """
    C = tuple(float(c) for c in C)
    a = [float(v) for v in a]
    s = abs(row_scale(problem.N, C[0]))
    worst = 0.0
    for m in range(problem.M + problem.N - 1):
        terms = np.array(row_terms(m, problem.N, problem.alpha, C, float(E), a)) * s
        worst = max(worst, abs(terms.sum()) / max(1.0, np.abs(terms).max()))
    return worst


def residual_vector_harmonic(M: int, beta1: float, alpha: float, E: float, a) -> np.ndarray:
    """Harmonic rows (m+2)(m+1) b1^2 a_{m+2} - ((2m+1+alpha) b1 - E) a_m."""
    if not beta1 > 0:
        raise ValueError("beta_1 must be positive")
    a = [float(v) for v in a]
    return np.array(
        [
            (m + 2) * (m + 1) * beta1**2 * _get(a, m + 2) - ((2 * m + 1 + alpha) * beta1 - E) * _get(a, m)
            for m in range(M + 1)
        ]
    )
