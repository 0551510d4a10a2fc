"""Analytic QES solutions.

The coefficient recursion is solved top-down from a_M = 1.  What is left over
(rows m = 0..N-3) is a small polynomial system in E and the Casimirs.  It is
either solved in closed form (the catalogue of worked cases) or numerically
from many starting points.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from math import factorial, sqrt

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P
from scipy import optimize

from .group import BetaVector, CasimirSet, betas_from_casimirs
from .recursion import (
    QesProblem,
    alpha_for,
    lowest_coefficient,
    recursion_rows,
    row_scale,
    row_terms,
    scaled_residual,
)

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10

__all__ = [
    "ConstraintRecord",
    "QesSolution",
    "Solutions",
    "betas_from_casimirs",
    "companion_roots",
    "downward_recursion",
    "energy_polynomials",
    "harmonic_solution",
    "leftover_residuals",
    "solve_betas",
    "solve_catalogued",
    "solve_fixed_casimirs",
    "solve_generic",
    "solve_zero_energy",
    "CATALOGUE",
]


@dataclass(frozen=True)
class ConstraintRecord:
    fixed: tuple
    solved: tuple
    residual_norm: float
    notes: tuple = ()


@dataclass(frozen=True)
class QesSolution:
    """One analytic eigenpair with a_M = 1."""

    problem: QesProblem
    E: float
    a: tuple
    branch: str
    record: ConstraintRecord
    parity: str | None = None
    degenerate: bool = False

    @property
    def casimirs(self) -> CasimirSet:
        return self.problem.casimirs

    @property
    def betas(self) -> BetaVector:
        return self.problem.betas


class Solutions(list):
    """A list of solutions that also carries solver diagnostics."""

    def __init__(self, items=(), diagnostics=()):
        super().__init__(items)
        self.diagnostics = list(diagnostics)


def _downward(N: int, M: int, alpha: float, C, E) -> list:
    if N < 3:
        raise ValueError("downward recursion needs N >= 3; use harmonic_solution for N = 2")
    C = tuple(C)
    if C[0] == 0:
        raise ZeroDivisionError("C_1 = 0")
    a = [0.0] * (M + 1)
    a[M] = 1.0
    for m in range(M + N - 3, N - 3, -1):
        k = m - N + 2
        terms = row_terms(m, N, alpha, C, E, a)
        rest = terms[0]
        for t in terms[1:]:
            rest = rest + t
        a[k] = -rest / lowest_coefficient(m, N, alpha, C[0])
    return a


def downward_recursion(N: int, M: int, C, E: float) -> np.ndarray:
    """Coefficients a_0..a_M (a_M = 1) from rows M+N-3 down to N-2."""
    C = tuple(float(c) for c in C)
    return np.array(_downward(N, M, alpha_for(N, M), C, float(E)), dtype=float)


def leftover_residuals(N: int, M: int, C, E: float) -> np.ndarray:
    """Rows m = 0..N-3 evaluated with the downward-recursion coefficients."""
    if N < 3:
        return np.zeros(0)
    C = tuple(float(c) for c in C)
    alpha = alpha_for(N, M)
    a = _downward(N, M, alpha, C, float(E))
    rows = recursion_rows(N, M, alpha, C, float(E), a)
    return np.array(rows[: N - 2], dtype=float)


def energy_polynomials(N: int, M: int, C) -> list[Polynomial]:
    """Leftover rows as polynomials in E (all Casimirs fixed)."""
    C = tuple(float(c) for c in C)
    alpha = alpha_for(N, M)
    E = Polynomial([0.0, 1.0])
    a = _downward(N, M, alpha, C, E)
    rows = recursion_rows(N, M, alpha, C, E, a)
    return [r if isinstance(r, Polynomial) else Polynomial([r]) for r in rows[: N - 2]]


def companion_roots(coeffs, imag_tol: float = 1e-9) -> np.ndarray:
    """Real roots of sum coeffs[k] E^k from the companion-matrix spectrum."""
    c = np.trim_zeros(np.asarray(coeffs, float), "b")
    if c.size < 2:
        return np.zeros(0)
    roots = np.linalg.eigvals(P.polycompanion(c))
    scale = np.maximum(1.0, np.abs(roots))
    real = np.sort(roots[np.abs(roots.imag) <= imag_tol * scale].real)
    # Newton polish on the original polynomial
    d = P.polyder(c)
    for _ in range(3):
        step = P.polyval(real, c) / np.where(P.polyval(real, d) == 0, 1.0, P.polyval(real, d))
        real = real - step
    return real


def _make_solution(N, M, C, E, beta2, branch, fixed, solved, tol, notes=(), degenerate=False, a=None):
    problem = QesProblem.from_casimirs(C, M, beta2)
    if a is None:
        a = downward_recursion(N, M, problem.casimirs, E)
    res = scaled_residual(problem, problem.casimirs, E, a)
    record = ConstraintRecord(tuple(fixed), tuple(solved), float(res), tuple(notes))
    return QesSolution(problem, float(E), tuple(float(v) for v in a), branch, record, None, degenerate), res


def harmonic_solution(M: int, beta1: float = 1.0, beta2: float = 0.0, alpha: float = 0.0) -> QesSolution:
    """Shifted oscillator N = 2: E = beta_1 (2M + 1 + alpha)."""
    if not beta1 > 0:
        raise ValueError("beta_1 must be positive")
    E = beta1 * (2 * M + 1 + alpha)
    a = [0.0] * (M + 1)
    a[M] = 1.0
    for m in range(M - 2, -1, -1):
        a[m] = (m + 2) * (m + 1) * beta1**2 * a[m + 2] / ((2 * m + 1 + alpha) * beta1 - E)
    problem = QesProblem(2, M, float(alpha), BetaVector((beta1, beta2)))
    res = scaled_residual(problem, problem.casimirs, E, a)
    record = ConstraintRecord(("beta1", "beta2", "alpha"), ("E",), float(res))
    return QesSolution(problem, float(E), tuple(a), "harmonic", record)


# ---------------------------------------------------------------------------
# closed-form catalogue
#
# Each entry maps (C1, C2, extra) to a list of branches
#   (label, {k: C_k forced by the branch}, E)
# or a string explaining why a branch is inadmissible.


def _sextic(M):
    def branches(C1, C2, extra):
        c = C2 / C1
        if M == 0:
            return [("E=0", {}, 0.0)]
        if M == 1:
            return [("C3=0", {3: 0.0}, 4.0 / 3.0 * c)]
        if M == 2:
            r = 2.0 * sqrt(c * c + C1 / 3.0)
            return [("C3=0 -", {3: 0.0}, 2.0 / 3.0 * c - r), ("C3=0 +", {3: 0.0}, 2.0 / 3.0 * c + r)]
        if M == 3:
            r = 2.0 * sqrt(c * c + C1)
            return [("C3=0 -", {3: 0.0}, 2.0 * c - r), ("C3=0 +", {3: 0.0}, 2.0 * c + r)]
        if M == 4:
            cubic = P.polysub(
                P.polymul(P.polymul([8 / 3 * c, 1], [-4 / 3 * c, 1]), [-16 / 3 * c, 1]),
                P.polyadd(P.polymul([8 * C1], [8 / 3 * c, 1]), P.polymul([8 / 3 * C1], [-16 / 3 * c, 1])),
            )
            out = [(f"C3=0 root{i}", {3: 0.0}, E) for i, E in enumerate(companion_roots(cubic))]
            rad = -27.0 / 14.0 * C2 * (C1**3 + 16.0 / 49.0 * C2**2)
            if rad > 0:
                E = 40.0 * C2 / (21.0 * C1)
                out += [("C3=+", {3: sqrt(rad)}, E), ("C3=-", {3: -sqrt(rad)}, E)]
            else:
                out.append(f"C3!=0 branch needs -(27/14) C2 (C1^3 + 16 C2^2/49) > 0, got {rad:.6g}")
            return out
        if M == 5:
            cubic = P.polysub(
                P.polymul(P.polymul([4 / 3 * c, 1], [-8 / 3 * c, 1]), [-20 / 3 * c, 1]),
                P.polyadd(P.polymul([40 / 3 * C1], [4 / 3 * c, 1]), P.polymul([8 * C1], [-20 / 3 * c, 1])),
            )
            return [(f"C3=0 root{i}", {3: 0.0}, E) for i, E in enumerate(companion_roots(cubic))]
        raise KeyError(M)

    return branches


def _octic(M):
    def branches(C1, C2, extra):
        if M == 0:
            return [("E=0", {}, 0.0)]
        if M == 1:
            C3 = extra.get(3, 0.0)
            return [("C2=C4=0", {2: 0.0, 4: 0.0}, 1.5 * C3 / C1**2)]
        if M == 2:
            if C2 == 0:
                return ["octic M=2 needs C2 != 0"]
            return [("C3,C4 fixed", {3: -(C1**4) / (12 * C2), 4: 1.5 * C2**2}, -(C1**2) / (4 * C2))]
        raise KeyError(M)

    return branches


def _decatic(M):
    def branches(C1, C2, extra):
        if M == 0:
            return [("E=0", {}, 0.0)]
        if M == 1:
            C4 = extra.get(4, 0.0)
            return [("C2=C3=C5=0", {2: 0.0, 3: 0.0, 5: 0.0}, 8 * C4 / (5 * C1**3))]
        if C2 == 0:
            return [f"decatic M={M} needs C2 != 0"]
        if M == 2:
            C4 = -(C1**5) / (16 * C2) + 0.8 * C2**2
            E = -(C1**2) / (5 * C2) - 16 * C2**2 / (25 * C1**3)
            return [("C3=C5=0", {3: 0.0, 4: C4, 5: 0.0}, E)]
        if M == 3:
            C4 = -(C1**5) / (8 * C2) + 0.8 * C2**2
            E = -3 * C1**2 / (5 * C2) + 16 * C2**2 / (25 * C1**3)
            return [("C3=C5=0", {3: 0.0, 4: C4, 5: 0.0}, E)]
        if M == 4:
            D = 2025 * C1**10 * C2**2 - 1920 * C1**5 * C2**5 + 4096 * C2**8
            if D < 0:
                return [f"decatic M=4 discriminant negative ({D:.6g})"]
            out = []
            for label, s in (("upper", 1.0), ("lower", -1.0)):
                C4 = (320 * C2**4 - 135 * C1**5 * C2 - s * sqrt(D)) / (480 * C2**2)
                E = (-15 * C1**5 * C2 + s * sqrt(D)) / (50 * C1**3 * C2**2)
                out.append((f"C3=C5=0 {label}", {3: 0.0, 4: C4, 5: 0.0}, E))
            return out
        if M == 5:
            C4 = -(C1**5) / (4 * C2) + 0.5 * C2**2
            return [("C3=C5=0", {3: 0.0, 4: C4, 5: 0.0}, -2 * C1**2 / C2)]
        raise KeyError(M)

    return branches


CATALOGUE = {(4, M): _sextic(M) for M in range(6)}
CATALOGUE.update({(5, M): _octic(M) for M in range(3)})
CATALOGUE.update({(6, M): _decatic(M) for M in range(6)})


def _close(x, y, tol=1e-9):
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def solve_catalogued(N: int, M: int, C1: float, C2: float, extra=None, beta2: float = 0.0,
                     tol: float = DEFAULT_TOL) -> Solutions:
    """Closed-form branches for the worked (N, M) cases.

    ``extra`` maps Casimir index -> value for Casimirs a branch leaves free
    (default 0) or that must agree with what the branch forces; branches that
    disagree are dropped with a diagnostic.
    """
    if (N, M) not in CATALOGUE:
        raise KeyError(f"(N={N}, M={M}) is not catalogued; use solve_generic")
    if not C1 > 0:
        raise ValueError("C_1 must be positive")
    extra = dict(extra or {})
    out, diags = [], []
    for br in CATALOGUE[(N, M)](float(C1), float(C2), extra):
        if isinstance(br, str):
            diags.append(br)
            continue
        label, forced, E = br
        C = {1: float(C1), 2: float(C2)}
        ok = True
        for k, v in forced.items():
            given = C.get(k, extra.get(k))
            if given is not None and not _close(given, v):
                diags.append(f"{label}: requires C{k}={v:.12g}, given {given:.12g}")
                ok = False
            C[k] = v
        if not ok:
            continue
        for k in range(3, N):
            C.setdefault(k, float(extra.get(k, 0.0)))
        Cvec = [C[k] for k in range(1, N)]
        solved = ("E",) + tuple(f"C{k}" for k in sorted(forced) if k > 2)
        sol, res = _make_solution(N, M, Cvec, E, beta2, label, ("C1", "C2"), solved, tol)
        if res > tol:
            diags.append(f"{label}: residual {res:.3g} above tolerance")
            continue
        out.append(sol)
    for d in diags:
        log.info("solve_catalogued(N=%d, M=%d): %s", N, M, d)
    out.sort(key=lambda s: (s.E, s.branch))
    return Solutions(out, diags)


# ---------------------------------------------------------------------------
# numerical routes


def _dedupe(points, rtol=1e-6):
    kept = []
    for p in points:
        if not any(np.linalg.norm(p - q) <= rtol * max(1.0, np.linalg.norm(q)) for q in kept):
            kept.append(p)
    return kept


def solve_fixed_casimirs(N: int, M: int, C, beta2: float = 0.0, tol: float = DEFAULT_TOL) -> Solutions:
    """All Casimirs given: E from the companion matrix of the leftover rows."""
    C = [float(c) for c in C]
    if N < 3:
        raise ValueError("N >= 3 required")
    polys = energy_polynomials(N, M, C)
    nonzero = [p for p in polys if np.max(np.abs(p.coef)) > 0]
    diags = []
    if not nonzero:
        diags.append("leftover rows vanish identically; E undetermined")
        return Solutions([], diags)
    cand = []
    for p in nonzero:
        cand.extend(companion_roots(p.coef))
    if not cand and all(p.degree() == 0 for p in nonzero):
        diags.append("leftover rows are nonzero constants: no solution")
    out = []
    for E in _dedupe([np.array([e]) for e in sorted(cand)]):
        sol, res = _make_solution(N, M, C, E[0], beta2, "fixed-C", [f"C{k}" for k in range(1, N)], ("E",), tol)
        if res <= tol:
            out.append(sol)
    if not out:
        diags.append("no common real root of the leftover rows")
    out.sort(key=lambda s: s.E)
    return Solutions(out, diags)


def solve_betas(betas, M: int, alpha: float | None = None, tol: float = DEFAULT_TOL) -> Solutions:
    """Solutions for a fully specified potential, keeping the given betas.

    Unlike ``solve_fixed_casimirs`` the betas are not rebuilt from Casimirs,
    so beta_N is bit-identical to the input.  ``alpha`` is only used (and
    required) for N = 2.
    """
    betas = betas if isinstance(betas, BetaVector) else BetaVector(betas)
    N = betas.N
    if N == 2:
        if alpha is None:
            raise ValueError("alpha must be given for N = 2")
        return Solutions([harmonic_solution(M, betas[1], betas[2], alpha)], [])
    problem = QesProblem.from_betas(betas, M)
    C = problem.casimirs
    fixed = tuple(f"beta{k}" for k in range(1, N + 1))
    out = []
    cands = solve_fixed_casimirs(N, M, list(C), betas[2], tol)
    for c in cands:
        a = downward_recursion(N, M, C, c.E)
        res = scaled_residual(problem, C, c.E, a)
        if res <= tol:
            record = ConstraintRecord(fixed, ("E",), float(res))
            out.append(QesSolution(problem, c.E, tuple(float(v) for v in a), "fixed-beta", record))
    return Solutions(out, list(cands.diagnostics))


def _natural_scales(N, C1, C2):
    sE = max(C1 ** (2.0 / N), abs(C2) ** (1.0 / (N - 1)) if C2 else 0.0)
    sC = {k: max(C1 ** (k * (N - 1) / N), abs(C2) ** (k / 2.0) if C2 else 0.0) for k in range(3, N)}
    return sE, sC


def default_seeds(N, unknown_ks, C1, C2, per_dim=32, max_seeds=400, rng_seed=0):
    """Log-spaced +/- seeds in every unknown, subsampled deterministically."""
    sE, sC = _natural_scales(N, C1, C2)
    mags = np.logspace(-2, 2, per_dim // 2)
    axis = np.concatenate([-mags[::-1], mags])
    axes = [axis * sE] + [np.concatenate([[0.0], axis * sC[k]]) for k in unknown_ks]
    total = int(np.prod([len(ax) for ax in axes]))
    if total <= max_seeds:
        return [np.array(p) for p in itertools.product(*axes)]
    rng = np.random.default_rng(rng_seed)
    picks = {tuple(rng.integers(0, len(ax)) for ax in axes) for _ in range(4 * max_seeds)}
    # keep the C=0 slice fully covered: cheap, and most closed-form branches live there
    zero_slice = [np.array([e] + [0.0] * len(unknown_ks)) for e in axes[0]]
    picks = sorted(picks)[: max(0, max_seeds - len(zero_slice))]
    return zero_slice + [np.array([ax[i] for ax, i in zip(axes, idx)]) for idx in picks]


def _jac(f, z, h=1e-7):
    f0 = f(z)
    J = np.empty((f0.size, z.size))
    for j in range(z.size):
        dz = h * max(1.0, abs(z[j]))
        zp, zm = z.copy(), z.copy()
        zp[j] += dz
        zm[j] -= dz
        J[:, j] = (f(zp) - f(zm)) / (2 * dz)
    return J


def _local_solve(f, z0):
    """Levenberg-Marquardt from one seed; square or tall systems."""
    try:
        sol = optimize.least_squares(f, z0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
    except (ValueError, FloatingPointError, ZeroDivisionError):
        return z0, False
    return sol.x, bool(np.all(np.isfinite(sol.x)))


def solve_generic(N: int, M: int, fixed, seeds=None, beta2: float = 0.0, tol: float = DEFAULT_TOL,
                  per_dim: int = 32, max_seeds: int = 400) -> Solutions:
    """Zero the leftover rows in E and every Casimir not in ``fixed``.

    ``fixed`` maps Casimir index -> value and must contain 1 and 2.  Seeds are
    vectors ``(E, C_k for unknown k ascending)``.
    """
    if N < 3:
        raise ValueError("N >= 3 required")
    fixed = {int(k): float(v) for k, v in dict(fixed).items()}
    if 1 not in fixed or 2 not in fixed:
        raise ValueError("C1 and C2 must be fixed")
    if not fixed[1] > 0:
        raise ValueError("C_1 must be positive")
    unknown = [k for k in range(3, N) if k not in fixed]
    if not unknown:
        return solve_fixed_casimirs(N, M, [fixed[k] for k in range(1, N)], beta2, tol)

    C1 = fixed[1]
    s = row_scale(N, C1)

    def unpack(z):
        C = dict(fixed)
        C.update(zip(unknown, z[1:]))
        return [C[k] for k in range(1, N)]

    def f(z):
        return leftover_residuals(N, M, unpack(z), z[0]) * s

    if seeds is None:
        seeds = default_seeds(N, unknown, C1, fixed[2], per_dim, max_seeds)
    roots, diags = [], []
    for z0 in seeds:
        z0 = np.asarray(z0, float)
        if z0.shape != (len(unknown) + 1,):
            raise ValueError(f"seed {z0} should have {len(unknown) + 1} entries")
        with np.errstate(all="ignore"):
            z, ok = _local_solve(f, z0)
        if not ok or not np.all(np.isfinite(z)):
            continue
        problem = QesProblem.from_casimirs(unpack(z), M, beta2)
        a = downward_recursion(N, M, problem.casimirs, z[0])
        if scaled_residual(problem, problem.casimirs, z[0], a) <= tol:
            roots.append(z)
    roots = _dedupe(roots)
    if not roots:
        diags.append(f"no convergence from {len(seeds)} seeds")
    out = []
    names = ("E",) + tuple(f"C{k}" for k in unknown)
    fixed_names = tuple(f"C{k}" for k in sorted(fixed))
    for z in roots:
        J = _jac(f, z)
        sv = np.linalg.svd(J, compute_uv=False)
        degenerate = bool(sv.size == 0 or sv[-1] <= 1e-8 * max(sv[0], 1e-300))
        label = "generic " + ", ".join(f"C{k}={'0' if abs(v) <= 1e-9 * max(1.0, abs(z[0])) else ('+' if v > 0 else '-')}"
                                       for k, v in zip(unknown, z[1:]))
        sol, _ = _make_solution(N, M, unpack(z), z[0], beta2, label, fixed_names, names, tol,
                                degenerate=degenerate)
        out.append(sol)
    out.sort(key=lambda s_: (s_.E, s_.branch))
    for d in diags:
        log.info("solve_generic(N=%d, M=%d): %s", N, M, d)
    return Solutions(out, diags)


# ---------------------------------------------------------------------------
# E = 0 family


def solve_zero_energy(N: int, M: int) -> QesSolution:
    """E = 0 eigenfunction of x^(2N-2) - (2M+N-1)|x|^(N-2).

    Uses beta_2 = 0 and beta_1 = (N-1)!, so that all higher Casimirs vanish
    and the recursion collapses to two terms.
    """
    if N < 2:
        raise ValueError("N >= 2 required")
    if M < 0 or M % N not in (0, 1):
        raise ValueError(f"no nontrivial E=0 solution of this form: M must be kN or kN+1 (N={N}, M={M})")
    C1 = float(factorial(N - 1))
    a = [0.0] * (M + 1)
    a[M] = 1.0
    m = M
    while m - N >= 0:
        a[m - N] = -(factorial(N - 1) / 2.0) * m * (m - 1) / (N + M - m) * C1 ** (N - 1) * a[m]
        m -= N
    alpha = -1.0 - 2.0 * M / (N - 1)
    betas = BetaVector((C1,) + (0.0,) * (N - 1))
    problem = QesProblem(N, M, alpha, betas, symmetrized=(N % 2 == 1))
    res = scaled_residual(problem, problem.casimirs, 0.0, a)
    record = ConstraintRecord(("C1", "beta2"), ("E",), float(res), ("C2..C_{N-1} = 0",))
    parity = ("even" if M % N == 0 else "odd") if problem.symmetrized else None
    return QesSolution(problem, 0.0, tuple(a), f"E=0 N={N} M={M}", record, parity)
