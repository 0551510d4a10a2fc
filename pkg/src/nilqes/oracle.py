"""Independent numerical checks in the position basis.

Nothing here uses the recursion.  Potentials and wavefunctions are expanded
directly in x, second derivatives are taken analytically, and spectra come
from a central-difference discretization with Dirichlet walls.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from math import factorial

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, linalg

from .group import BetaVector, antiderivative_XN, generator_poly, polynomial_in_X2
from .symmetric import parity_wavefunction_eval, tilde_betas


@dataclass(frozen=True)
class PotentialSpec:
    """V = X_N^2 + alpha X_{N-1}, optionally evaluated at |x|."""

    N: int
    alpha: float
    betas: BetaVector
    symmetrized: bool = False

    def __post_init__(self):
        betas = self.betas if isinstance(self.betas, BetaVector) else BetaVector(self.betas)
        object.__setattr__(self, "betas", betas)
        if betas.N != self.N:
            raise ValueError(f"expected {self.N} betas, got {betas.N}")

    @classmethod
    def zero_energy(cls, N: int, M: int) -> "PotentialSpec":
        """x^(2N-2) - (2M+N-1)|x|^(N-2), the potential with an E=0 level."""
        alpha = -1.0 - 2.0 * M / (N - 1)
        betas = (float(factorial(N - 1)),) + (0.0,) * (N - 1)
        return cls(N, alpha, betas, symmetrized=(N % 2 == 1))

    @classmethod
    def from_solution(cls, sol) -> "PotentialSpec":
        p = sol.problem
        return cls(p.N, p.alpha, p.betas, p.symmetrized)

    def polynomial(self) -> Polynomial:
        XN = generator_poly(self.N, self.betas)
        XN1 = generator_poly(self.N - 1, self.betas) if self.N > 1 else Polynomial([0.0])
        return XN * XN + self.alpha * XN1


def potential_eval(x, spec: PotentialSpec):
    xs = np.asarray(x, float)
    if spec.symmetrized:
        xs = np.abs(xs)
    out = spec.polynomial()(xs)
    return out if np.ndim(x) else float(out)


def _check_domain(sol, xs):
    p = sol.problem
    if p.N % 2 == 1 and not p.symmetrized and np.any(xs < 0):
        raise ValueError("odd N without symmetrization is only defined for x >= 0")


def wavefunction_eval(x, sol):
    """p(X_2) exp(-int_0^x X_N); parity-continued for symmetrized problems."""
    xs = np.asarray(x, float)
    _check_domain(sol, xs)
    if sol.problem.symmetrized:
        if sol.parity is None:
            raise ValueError("symmetrized solution without a parity")
        return parity_wavefunction_eval(x, sol)
    p = polynomial_in_X2(sol.a, sol.problem.betas)
    F = antiderivative_XN(sol.problem.betas)
    out = p(xs) * np.exp(-F(xs))
    return out if np.ndim(x) else float(out)


def _branch_pieces(a, betas):
    """(p, X_N, X_{N-1}, F) as polynomials in x for one side of the origin."""
    N = betas.N
    p = polynomial_in_X2(a, betas)
    XN = generator_poly(N, betas)
    XN1 = generator_poly(N - 1, betas) if N > 1 else Polynomial([0.0])
    return p, XN, XN1, antiderivative_XN(betas)


def _psi_and_second(xs, a, betas, sign=1.0):
    p, XN, XN1, F = _branch_pieces(a, betas)
    w = np.exp(-F(xs))
    psi = p(xs) * w
    # (p e^{-F})'' = (p'' - 2 X_N p' - X_{N-1} p + X_N^2 p) e^{-F}
    d2 = (p.deriv(2)(xs) - 2 * XN(xs) * p.deriv(1)(xs) - XN1(xs) * p(xs) + XN(xs) ** 2 * p(xs)) * w
    return sign * psi, sign * d2


def schrodinger_residual(sol, xs) -> float:
    """max |-psi'' + (V - E) psi| / max |psi| over the sample points."""
    xs = np.asarray(xs, float)
    _check_domain(sol, xs)
    prob = sol.problem
    spec = PotentialSpec.from_solution(sol)
    a = np.asarray(sol.a, float)
    psi = np.empty_like(xs)
    d2 = np.empty_like(xs)
    pos = xs >= 0 if prob.symmetrized else np.ones(xs.shape, bool)
    psi[pos], d2[pos] = _psi_and_second(xs[pos], a, prob.betas)
    if not pos.all():
        N = prob.N
        twisted = a * np.array([(-1.0) ** ((N + 1) * m) for m in range(a.size)])
        sign = 1.0 if sol.parity == "even" else -1.0
        psi[~pos], d2[~pos] = _psi_and_second(xs[~pos], twisted, tilde_betas(prob.betas), sign)
    res = -d2 + (potential_eval(xs, spec) - sol.E) * psi
    scale = np.abs(psi).max()
    if scale == 0:
        raise ValueError("wavefunction vanishes at every sample point")
    return float(np.abs(res).max() / scale)


def chebyshev_points(n: int, lo: float, hi: float) -> np.ndarray:
    k = np.arange(n)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos((2 * k + 1) * np.pi / (2 * n))


def _tail_action(spec: PotentialSpec, E: float, L: float, sign: float, samples: int = 2001) -> float:
    """WKB action from the outermost classically allowed point to sign*L."""
    xs = sign * np.linspace(0.0, L, samples)
    excess = potential_eval(xs, spec) - E
    allowed = np.nonzero(excess < 0)[0]
    start = allowed[-1] if allowed.size else 0
    return float(integrate.trapezoid(np.sqrt(np.clip(excess[start:], 0.0, None)), np.abs(xs[start:])))


def box_half_width(spec: PotentialSpec, E_target: float, margin: float = 50.0, L_min: float = 3.0,
                   action: float = 18.0) -> float:
    """Smallest L >= L_min (multiple of 0.5) that confines states up to E_target.

    Requires V(+-L) >= E_target + margin and a tail of WKB action >= ``action``
    beyond the outermost turning point on each side, so that a wall placed
    next to a deep well is pushed outwards.
    """
    L = math.ceil(L_min * 2) / 2
    while True:
        high = min(potential_eval(L, spec), potential_eval(-L, spec)) >= E_target + margin
        if high and min(_tail_action(spec, E_target, L, s) for s in (1.0, -1.0)) >= action:
            return L
        L += 0.5
        if L > 1e4:
            raise ValueError("potential does not confine within |x| < 1e4")


@dataclass(frozen=True)
class FdSpectrum:
    L: float
    n: int
    x: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray
    vectors: np.ndarray = field(repr=False)
    wall_mass: float
    wall_warning: bool

    def __len__(self):
        return len(self.eigenvalues)

    def __getitem__(self, i):
        return self.eigenvalues[i]


def fd_eigensolve(spec: PotentialSpec, L: float, n: int, k: int, wall_tol: float = 1e-6) -> FdSpectrum:
    """Lowest k eigenvalues of -d^2/dx^2 + V on n interior points of [-L, L].

    An even ``n`` is bumped to n + 1 so that x = 0 is a grid point (the
    symmetrized potentials have a kink there).  ``wall_warning`` is set when
    the lowest eigenvector has more than ``wall_tol`` of its mass in the
    outer 2% of the box on either side.
    """
    if not L > 0:
        raise ValueError("L must be positive")
    if n < 200:
        raise ValueError("n must be >= 200")
    if n % 2 == 0:
        n += 1
    h = 2.0 * L / (n + 1)
    x = -L + h * np.arange(1, n + 1)
    d = 2.0 / h**2 + potential_eval(x, spec)
    e = np.full(n - 1, -1.0 / h**2)
    k = min(k, n)
    w, v = linalg.eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1))
    edge = max(1, int(0.02 * n))
    mass = v[:, 0] ** 2
    wall = float(max(mass[:edge].sum(), mass[-edge:].sum()) / mass.sum())
    if wall > wall_tol:
        warnings.warn(f"box L={L} too small: ground state wall mass {wall:.2e}", RuntimeWarning, stacklevel=2)
    return FdSpectrum(L, n, x, w, v, wall, wall > wall_tol)


def count_nodes(values, rel_floor: float = 1e-9) -> int:
    """Strict sign changes, ignoring samples below rel_floor * max|values|."""
    v = np.asarray(values, float)
    v = v[np.abs(v) >= rel_floor * np.abs(v).max()]
    return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


def count_nodes_solution(sol, L: float | None = None, samples: int = 20001) -> int:
    """Node count of an analytic eigenfunction sampled on [-L, L]."""
    if L is None:
        L = box_half_width(PotentialSpec.from_solution(sol), sol.E)
    lo = 0.0 if (sol.problem.N % 2 == 1 and not sol.problem.symmetrized) else -L
    return count_nodes(wavefunction_eval(np.linspace(lo, L, samples), sol))


def match_eigenvalue(E: float, eigenvalues, rel: float = 1e-3, abs_tol: float = 1e-3):
    """(index, eigenvalue, |delta|, matched) for the grid level nearest E."""
    ev = np.asarray(eigenvalues)
    i = int(np.argmin(np.abs(ev - E)))
    delta = float(abs(ev[i] - E))
    return i, float(ev[i]), delta, delta <= max(abs_tol, rel * abs(E))


def arctan_norm(sol) -> float:
    """int_{-pi/2}^{pi/2} psi(tan y)^2 dy."""
    N, sym = sol.problem.N, sol.problem.symmetrized
    if N % 2 == 1 and not sym:
        raise ValueError("odd N without symmetrization is not normalizable on the line")

    def f(y):
        with np.errstate(over="ignore", invalid="ignore"):
            val = wavefunction_eval(math.tan(y), sol) ** 2
        return 0.0 if not np.isfinite(val) else val

    half = math.pi / 2
    total, _ = integrate.quad(f, -half, half, points=[0.0], limit=400, epsabs=1e-13, epsrel=1e-12)
    return float(total)


def normalization_factor(sol, target: float = 1.0) -> float:
    """c with int dy (c psi)^2 = target."""
    return math.sqrt(target / arctan_norm(sol))


@dataclass(frozen=True)
class OracleReport:
    L: float
    n: int
    eigenvalues: tuple
    residual_norm: float
    node_count: int
    normalization: str
    E: float
    matched_index: int
    matched_eigenvalue: float
    delta: float
    match: bool
    wall_warning: bool
    richardson_ratio: float | None = None

    @property
    def grid(self) -> tuple:
        return (self.L, self.n)

    @property
    def ok(self) -> bool:
        return self.match and self.matched_index == self.node_count


def verify_solution(sol, n: int = 4000, L: float | None = None, levels: int = 8,
                    richardson: bool = False, residual_points: int = 50) -> OracleReport:
    """Analytic residual, grid eigenvalue match and node bookkeeping."""
    spec = PotentialSpec.from_solution(sol)
    if L is None:
        L = box_half_width(spec, sol.E)
    lo = 0.0 if (spec.N % 2 == 1 and not spec.symmetrized) else -min(L, 3.0)
    residual = schrodinger_residual(sol, chebyshev_points(residual_points, lo, min(L, 3.0)))
    nodes = count_nodes_solution(sol, L)
    k = max(levels, nodes + 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        spectrum = fd_eigensolve(spec, L, n, k)
    idx, ev, delta, ok = match_eigenvalue(sol.E, spectrum.eigenvalues)
    ratio = None
    if richardson:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            fine = fd_eigensolve(spec, L, 2 * spectrum.n + 1, k)
        err_fine = abs(fine.eigenvalues[idx] - sol.E)
        ratio = float(delta / err_fine) if err_fine > 0 else float("inf")
    return OracleReport(L, spectrum.n, tuple(float(v) for v in spectrum.eigenvalues), residual, nodes,
                        "unnormalized", float(sol.E), idx, ev, delta, ok, spectrum.wall_warning, ratio)
