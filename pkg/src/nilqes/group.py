"""The nilpotent group G_N, its polynomial generators and Casimir invariants.

Group elements are pairs ``(a, b)`` with ``b`` an N-vector.  In the induced
representation labelled by ``beta = (beta_1, ..., beta_N)`` the generators
X_1..X_N act as multiplication by polynomials in x,

    X_k(x) = sum_{j=0}^{k-1} beta_{k-j} x^j / j!,

and X_0 = i d/dx.  Polynomials are dense coefficient sequences, constant term
first.  Factorials are exact integers; when the inputs are ``Fraction`` the
coefficient arithmetic stays exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial

# relative size below which a float Casimir is treated as exact cancellation
ROUNDING_SNAP = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class BetaVector:
    """Representation labels beta_1..beta_N of an irrep of G_N."""

    beta: tuple

    def __init__(self, beta):
        object.__setattr__(self, "beta", tuple(beta))
        if len(self.beta) < 2:
            raise ValueError("need N >= 2 representation labels")

    @property
    def N(self) -> int:
        return len(self.beta)

    def __getitem__(self, k: int):
        """1-based access, ``betas[1]`` is beta_1."""
        if not 1 <= k <= self.N:
            raise IndexError(f"beta index {k} outside 1..{self.N}")
        return self.beta[k - 1]

    def __iter__(self):
        return iter(self.beta)

    def __len__(self):
        return self.N

    def as_array(self) -> np.ndarray:
        return np.array([float(b) for b in self.beta])


@dataclass(frozen=True)
class CasimirSet:
    """Casimir values C_1..C_{N-1}."""

    C: tuple

    def __init__(self, C):
        object.__setattr__(self, "C", tuple(C))
        if len(self.C) < 1:
            raise ValueError("need at least C_1")

    @property
    def N(self) -> int:
        return len(self.C) + 1

    def __getitem__(self, k: int):
        if not 1 <= k <= len(self.C):
            raise IndexError(f"Casimir index {k} outside 1..{len(self.C)}")
        return self.C[k - 1]

    def __iter__(self):
        return iter(self.C)

    def __len__(self):
        return len(self.C)


@dataclass(frozen=True)
class GroupElement:
    a: float
    b: tuple

    def __init__(self, a, b):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", tuple(b))

    @classmethod
    def identity(cls, N: int) -> "GroupElement":
        return cls(0.0, (0.0,) * N)

    def allclose(self, other: "GroupElement", atol: float = 1e-12) -> bool:
        return (
            len(self.b) == len(other.b)
            and abs(self.a - other.a) <= atol
            and np.allclose(self.b, other.b, rtol=0, atol=atol)
        )


def _as_betas(betas) -> BetaVector:
    return betas if isinstance(betas, BetaVector) else BetaVector(betas)


def matrix_A(a: float, N: int) -> np.ndarray:
    """Upper-triangular N x N matrix with entries a^(j-i)/(j-i)!."""
    if N < 2:
        raise ValueError("N must be >= 2")
    A = np.zeros((N, N))
    for d in range(N):
        val = a**d / factorial(d)
        idx = np.arange(N - d)
        A[idx, idx + d] = val
    return A


def group_product(g1: GroupElement, g2: GroupElement, N: int | None = None) -> GroupElement:
    n = len(g1.b)
    if len(g2.b) != n or (N is not None and N != n):
        raise ValueError(f"dimension mismatch: {len(g1.b)} vs {len(g2.b)} (N={N})")
    b = np.asarray(g1.b, float) + matrix_A(g1.a, n) @ np.asarray(g2.b, float)
    return GroupElement(g1.a + g2.a, b)


def group_inverse(g: GroupElement, N: int | None = None) -> GroupElement:
    n = len(g.b)
    if N is not None and N != n:
        raise ValueError(f"dimension mismatch: element has {n} b-components, N={N}")
    b = -(matrix_A(-g.a, n) @ np.asarray(g.b, float))
    return GroupElement(-g.a, b + 0.0)


def generator_coeffs(k: int, betas) -> list:
    """Monomial coefficients of X_k, exact if the betas are exact."""
    betas = _as_betas(betas)
    if not 1 <= k <= betas.N:
        raise ValueError(f"generator index {k} outside 1..{betas.N}")
    return [Fraction(1, factorial(j)) * betas[k - j] if isinstance(betas[k - j], (int, Fraction))
            else betas[k - j] / factorial(j) for j in range(k)]


def generator_poly(k: int, betas) -> Polynomial:
    """X_k as a polynomial in x of degree k-1."""
    return Polynomial([float(c) for c in generator_coeffs(k, betas)])


def antiderivative_XN(betas) -> Polynomial:
    """Integral of X_N from 0 to x: beta_N x + ... + beta_1 x^N / N!."""
    return generator_poly(_as_betas(betas).N, betas).integ()


def casimir(k: int, betas):
    """Casimir C_k for k = 1..N-1 (exact for exact betas)."""
    betas = _as_betas(betas)
    if not 1 <= k <= betas.N - 1:
        raise ValueError(f"Casimir index {k} outside 1..{betas.N - 1}")
    b1, b2 = betas[1], betas[2]
    if k == 1:
        return b1
    exact = all(isinstance(b, (int, Fraction)) for b in betas)
    one = Fraction(1) if exact else 1.0
    terms = [one * (-1) ** n / factorial(n) * b1 ** (k - 1 - n) * b2**n * betas[k + 1 - n] for n in range(k - 1)]
    terms.append(one * (-1) ** (k - 1) * (k - 1) / (factorial(k - 1) * k) * b2**k)
    total = sum(terms, 0 * one)
    if not exact and abs(total) <= ROUNDING_SNAP * sum(abs(t) for t in terms):
        # cancellation down to rounding noise: the intended value is 0
        return 0.0
    return total


def casimirs(betas) -> CasimirSet:
    betas = _as_betas(betas)
    return CasimirSet(casimir(k, betas) for k in range(1, betas.N))


def reexpress_Xk(k: int, C) -> tuple[np.ndarray, float]:
    """Write C_1^(k-2) X_k as a polynomial in X_2.

    Returns ``(coeffs, scale)`` where ``coeffs[n]`` multiplies X_2^n and
    ``scale = C_1^(k-2)``, so that X_k = sum(coeffs[n] X_2^n) / scale.
    Valid for 3 <= k <= N (uses C_1..C_{k-1}).
    """
    C = C if isinstance(C, CasimirSet) else CasimirSet(C)
    if not 3 <= k <= C.N:
        raise ValueError(f"k={k} outside 3..{C.N}")
    if C[1] == 0:
        raise ZeroDivisionError("C_1 = 0: X_k cannot be re-expressed")
    coeffs = np.zeros(k)
    for n in range(k - 2):
        coeffs[n] = C[k - 1 - n] / factorial(n)
    coeffs[k - 1] = 1.0 / factorial(k - 1)
    return coeffs, float(C[1]) ** (k - 2)


def scale_betas(t: float, betas) -> BetaVector:
    """beta_k -> t^(N+1-k) beta_k."""
    if not t > 0:
        raise ValueError("scale factor t must be positive")
    betas = _as_betas(betas)
    N = betas.N
    return BetaVector(t ** (N + 1 - k) * betas[k] for k in range(1, N + 1))


def representation_apply(
    g: GroupElement, betas, phi: Callable[[np.ndarray], np.ndarray], x
) -> np.ndarray | complex:
    """(U_g phi)(x) = exp(-i beta^T A(x) b) phi(x + a), vectorized over x."""
    beta = _as_betas(betas).as_array()
    b = np.asarray(g.b, float)
    if b.shape != beta.shape:
        raise ValueError("group element and representation have different N")
    N = beta.size
    xs = np.atleast_1d(np.asarray(x, float))
    # beta^T A(x) b = sum_{i<=j} beta_i x^(j-i)/(j-i)! b_j
    phase = np.zeros_like(xs)
    for d in range(N):
        phase += xs**d / factorial(d) * np.dot(beta[: N - d], b[d:])
    out = np.exp(-1j * phase) * phi(xs + g.a)
    return out if np.ndim(x) else complex(out[0])


def polynomial_in_X2(coeffs: Sequence[float], betas) -> Polynomial:
    """Convert sum_m coeffs[m] X_2^m into monomials of x."""
    betas = _as_betas(betas)
    X2 = Polynomial([float(betas[2]), float(betas[1])])
    out = Polynomial([0.0])
    power = Polynomial([1.0])
    for c in coeffs:
        out = out + float(c) * power
        power = power * X2
    return out


def betas_from_casimirs(C, beta2: float) -> BetaVector:
    """Invert the Casimir map given beta_2.

    C_k is linear in beta_{k+1} with coefficient beta_1^(k-1), so the betas
    follow one at a time from beta_1 = C_1.
    """
    C = C if isinstance(C, CasimirSet) else CasimirSet(C)
    if not C[1] > 0:
        raise ValueError("C_1 = beta_1 must be positive")
    N = C.N
    beta = [C[1], beta2] + [0 * C[1]] * (N - 2)
    for k in range(2, N):
        rest = casimir(k, beta)
        beta[k] = (C[k] - rest) / C[1] ** (k - 1)
    return BetaVector(beta)
