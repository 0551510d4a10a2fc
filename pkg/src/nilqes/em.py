"""Charged particle in polynomial E and B fields, reduced to the 1D problem.

The 3D Hamiltonian

    -d_x^2 + (-i d_y - A(x))^2 - d_z^2 + alpha X_{N-1}(x),
    A(x) = beta_{N-1} x + ... + beta_1 x^(N-1)/(N-1)!

commutes with P_y and P_z.  On the fiber with momenta (p_y, p_z) it becomes
the 1D operator with beta_N = -p_y, shifted in energy by p_z^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .group import BetaVector, generator_poly
from .oracle import _psi_and_second
from .recursion import QesProblem


@dataclass(frozen=True)
class EmProblem:
    """Field parameters beta_1..beta_{N-1}; beta_N is played by -p_y."""

    N: int
    M: int
    alpha: float
    betas: tuple
    p_y: float = 0.0
    p_z: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if self.N < 2:
            raise ValueError("N >= 2 required")
        if len(self.betas) != self.N - 1:
            raise ValueError(f"need N-1 = {self.N - 1} betas, got {len(self.betas)}")

    def full_betas(self) -> BetaVector:
        return BetaVector(self.betas + (0.0 - float(self.p_y),))

    def vector_potential(self) -> Polynomial:
        """A(x), so that X_N = A(x) - p_y."""
        return generator_poly(self.N, self.full_betas()) + self.p_y


def em_fields(x, prob: EmProblem):
    """(E, B) at x, each of shape (3,) + shape(x)."""
    xs = np.asarray(x, float)
    betas = prob.full_betas()
    zero = np.zeros_like(xs)
    Bz = generator_poly(prob.N - 1, betas)(xs) + zero
    Ex = -prob.alpha * generator_poly(prob.N - 2, betas)(xs) + zero if prob.N >= 3 else zero
    return np.array([Ex, zero, zero]), np.array([zero, zero, Bz])


def reduce_to_1d(prob: EmProblem, script_E: float) -> tuple[QesProblem, float]:
    """Fiber at (p_y, p_z): beta_N = -p_y and E = script_E - p_z^2."""
    problem = QesProblem.from_betas(prob.full_betas(), prob.M, alpha=prob.alpha)
    return problem, float(script_E) - prob.p_z**2


def lift_to_3d(E: float, p_z: float) -> float:
    return float(E) + float(p_z) ** 2


def _check_fiber(sol, p_y):
    bN = sol.problem.betas[sol.problem.N]
    if abs(bN + p_y) > 1e-12 * max(1.0, abs(p_y)):
        raise ValueError(f"solution has beta_N = {bN}, fiber needs beta_N = -p_y = {-p_y}")


def plane_wave_eigenfunction(x, y, z, sol, p_y: float, p_z: float):
    """(1/2pi) exp(i p_y y + i p_z z) psi_E(x)."""
    _check_fiber(sol, p_y)
    if sol.problem.symmetrized:
        raise ValueError("the field mapping applies to unsymmetrized problems")
    xs, ys, zs = np.broadcast_arrays(*(np.asarray(v, float) for v in (x, y, z)))
    psi, _ = _psi_and_second(xs, np.asarray(sol.a, float), sol.problem.betas)
    return np.exp(1j * (p_y * ys + p_z * zs)) * psi / (2 * math.pi)


def em_residual(sol, p_y: float, p_z: float, pts) -> tuple[float, float]:
    """Apply the 3D Hamiltonian analytically to the plane-wave state.

    ``pts`` is an (n, 3) array of points.  Returns ``(script_E, residual)``
    with residual = max |H Phi - script_E Phi| / max |Phi|.
    """
    _check_fiber(sol, p_y)
    pts = np.atleast_2d(np.asarray(pts, float))
    x, y, z = pts.T
    N = sol.problem.N
    alpha = sol.problem.alpha
    em = EmProblem(N, sol.problem.M, alpha, tuple(sol.problem.betas)[:-1], p_y, p_z)
    A = em.vector_potential()(x)
    psi, d2psi = _psi_and_second(x, np.asarray(sol.a, float), sol.problem.betas)
    phase = np.exp(1j * (p_y * y + p_z * z)) / (2 * math.pi)
    phi = phase * psi
    # d_y -> i p_y and d_z -> i p_z on the plane wave
    d_xx = phase * d2psi
    d_y, d_yy = 1j * p_y * phi, -(p_y**2) * phi
    d_zz = -(p_z**2) * phi
    magnetic = -d_yy + 2j * A * d_y + A**2 * phi
    XN1 = generator_poly(N - 1, sol.problem.betas)(x)
    H_phi = -d_xx + magnetic - d_zz + alpha * XN1 * phi
    script_E = lift_to_3d(sol.E, p_z)
    return script_E, float(np.abs(H_phi - script_E * phi).max() / np.abs(phi).max())
