"""Potentials symmetrized in |x| and their parity eigenfunctions.

For x < 0 the symmetrized Hamiltonian is built from the representation with
flipped labels beta~_i = (-1)^(i+N+1) beta_i.  A solution of the recursion
continued evenly (oddly) to x < 0 is an eigenfunction once its derivative
(value) vanishes at x = 0.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .group import BetaVector, antiderivative_XN, casimirs, polynomial_in_X2
from .recursion import QesProblem, alpha_for, row_scale, scaled_residual
from .solver import (
    DEFAULT_TOL,
    ConstraintRecord,
    QesSolution,
    Solutions,
    _dedupe,
    _jac,
    _local_solve,
    downward_recursion,
    leftover_residuals,
    solve_fixed_casimirs,
)

log = logging.getLogger(__name__)

PARITIES = ("even", "odd")


@dataclass(frozen=True)
class ParitySolution:
    base: QesSolution
    parity: str
    tilde_betas: BetaVector
    continuity_residual: float

    @property
    def problem(self) -> QesProblem:
        return self.base.problem

    @property
    def E(self) -> float:
        return self.base.E

    @property
    def a(self) -> tuple:
        return self.base.a

    @property
    def branch(self) -> str:
        return self.base.branch

    @property
    def betas(self) -> BetaVector:
        return self.base.problem.betas


def tilde_betas(betas) -> BetaVector:
    betas = betas if isinstance(betas, BetaVector) else BetaVector(betas)
    N = betas.N
    return BetaVector((-1) ** (i + N + 1) * betas[i] for i in range(1, N + 1))


def _continuity_terms(parity, a, betas):
    betas = betas if isinstance(betas, BetaVector) else BetaVector(betas)
    b1, b2, bN = float(betas[1]), float(betas[2]), float(betas[len(betas)])
    a = [float(v) for v in a]
    if parity == "even":
        terms = [a[0] * bN] + [-am * (m * b1 - b2 * bN) * b2 ** (m - 1) for m, am in enumerate(a) if m >= 1]
    elif parity == "odd":
        terms = [am * b2**m for m, am in enumerate(a)]
    else:
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    return np.array(terms)


def continuity_even_residual(a, betas) -> float:
    """Derivative jump condition at 0 for the even continuation."""
    return float(_continuity_terms("even", a, betas).sum())


def continuity_odd_residual(a, betas) -> float:
    """p(0) written in the X_2 basis; must vanish for the odd continuation."""
    return float(_continuity_terms("odd", a, betas).sum())


def continuity_residual(parity: str, a, betas) -> float:
    """Relative continuity residual, |sum| / max(1, largest |term|)."""
    t = _continuity_terms(parity, a, betas)
    return float(abs(t.sum()) / max(1.0, np.abs(t).max()))


def parity_wavefunction_eval(x, ps) -> np.ndarray | float:
    """Evaluate the parity-continued eigenfunction.

    x > 0 uses (a, X_2, X_N); x < 0 uses the sign-twisted coefficients with
    the flipped generators.
    """
    betas = ps.problem.betas
    N = betas.N
    parity = ps.parity
    xs = np.atleast_1d(np.asarray(x, float))
    a = np.array(ps.a, float)
    p_pos = polynomial_in_X2(a, betas)
    F_pos = antiderivative_XN(betas)
    tb = tilde_betas(betas)
    twisted = a * np.array([(-1.0) ** ((N + 1) * m) for m in range(a.size)])
    p_neg = polynomial_in_X2(twisted, tb)
    F_neg = antiderivative_XN(tb)
    sign = 1.0 if parity == "even" else -1.0
    out = np.empty_like(xs)
    pos = xs >= 0
    out[pos] = p_pos(xs[pos]) * np.exp(-F_pos(xs[pos]))
    out[~pos] = sign * p_neg(xs[~pos]) * np.exp(-F_neg(xs[~pos]))
    if parity == "odd":
        out = np.where(xs == 0, 0.5 * (p_pos(0.0) - p_neg(0.0)), out)
    return out if np.ndim(x) else float(out[0])


def _make(betas, M, parity, E_hint, label, fixed, tol, diags, notes=(), degenerate=False):
    """Filter the QES branches at these betas by the continuity condition."""
    betas = BetaVector(betas)
    N = betas.N
    if not betas[1] > 0:
        diags.append(f"{label}: beta_1 = {betas[1]:.6g} is not positive")
        return []
    if not all(np.isfinite(betas.as_array())):
        diags.append(f"{label}: non-finite betas")
        return []
    problem = QesProblem.from_betas(betas, M, symmetrized=True)
    C = problem.casimirs
    if N == 2:
        raise ValueError("use harmonic_solution for N = 2")
    cands = solve_fixed_casimirs(N, M, C)
    if not cands and E_hint is not None:
        # all leftover rows vanish identically only for M = 0 style cases
        cands = [None]
    out = []
    for c in cands:
        E = E_hint if c is None else c.E
        a = downward_recursion(N, M, C, E)
        res = scaled_residual(problem, C, E, a)
        cres = continuity_residual(parity, a, betas)
        if res > tol or cres > tol:
            continue
        rec = ConstraintRecord(tuple(fixed), ("E",) + tuple(f"beta{i}" for i in range(1, N + 1)
                                                           if f"beta{i}" not in fixed), float(res),
                               tuple(notes))
        base = QesSolution(problem, float(E), tuple(float(v) for v in a), label, rec, parity, degenerate)
        out.append(ParitySolution(base, parity, tilde_betas(betas), cres))
    if E_hint is not None and out and not any(abs(s.E - E_hint) <= 1e-8 * max(1.0, abs(E_hint)) for s in out):
        diags.append(f"{label}: closed-form E={E_hint:.12g} not among {[s.E for s in out]}")
    if not out:
        diags.append(f"{label}: no branch satisfies the {parity} continuity condition")
    return out


def _sextic_sym(M, free):
    """(parity, label, betas, E) tuples, or a diagnostic string."""
    g = free.get
    if M == 0 and free.keys() == {1, 2, 3}:
        return [("even", "beta4=0", (g(1), g(2), g(3), 0.0), 0.0),
                "odd: no nontrivial parity-odd solution for M=0"]
    if M == 1 and free.keys() == {1, 3}:
        b1, b3 = g(1), g(3)
        return [("odd", "beta2=beta4=0", (b1, 0.0, b3, 0.0), 4 * b3 / 3)]
    if M == 1 and free.keys() == {1, 4}:
        b1, b4 = g(1), g(4)
        return [("even", "even M=1", (b1, b1 / b4, b1 / (3 * b4**2) + b4**2, b4),
                 -2 * b1 / (9 * b4**2) + 4 * b4**2 / 3)]
    if M == 2 and free.keys() == {2, 4}:
        b2, b4 = g(2), g(4)
        out = [("odd", "odd M=2", (2 * b2 * b4, b2, b2 / (6 * b4) + 2 * b4**2, b4),
                b2 / (9 * b4) + 16 * b4**2 / 3)]
        disc = 4 * b2**4 - 18 * b2**3 * b4**3 + 9 * b2**2 * b4**6
        if disc < 0:
            out.append(f"even M=2: discriminant {disc:.6g} < 0, no real betas")
            return out
        r = sqrt(disc)
        for s, name in ((1, "+"), (-1, "-")):
            b1 = (2 * b2**2 + 3 * b2 * b4**3 + s * r) / (15 * b4**2)
            b3 = (14 * b2**2 + 21 * b2 * b4**3 - s * 3 * r) / (30 * b2 * b4)
            E = (-34 * b2**2 + 39 * b2 * b4**3 + s * 3 * r) / (45 * b2 * b4)
            out.append(("even", f"even M=2 {name}", (b1, b2, b3, b4), E))
        return out
    if M == 2 and free.keys() == {4}:
        b4 = g(4)
        betas = (16 * b4**4, 8 * b4**3, 10 * b4**2 / 3, b4)
        return [("even", "double-parity even", betas, -40 * b4**2 / 9),
                ("odd", "double-parity odd", betas, 56 * b4**2 / 9)]
    return None


def _octic_sym(M, free):
    g = free.get
    if M == 0 and free.keys() == {1, 2, 3, 4}:
        return [("even", "beta5=0", (g(1), g(2), g(3), g(4), 0.0), 0.0),
                "odd: no nontrivial parity-odd solution for M=0"]
    if M == 1 and free.keys() == {1, 4}:
        b1, b4 = g(1), g(4)
        return [("odd", "beta2=beta3=beta5=0", (b1, 0.0, 0.0, b4, 0.0), 1.5 * b4)]
    if M == 1 and free.keys() == {1, 5}:
        b1, b5 = g(1), g(5)
        betas = (b1, b1 / b5, b1 / (2 * b5**2), b1 / (8 * b5**3) + b5**2, b5)
        C = casimirs(betas)
        return [("even", "even M=1", betas, 1.5 * C[3] / C[1] ** 2)]
    if M == 2 and free.keys() == {2, 5}:
        b2, b5 = g(2), g(5)
        betas = (2 * b2 * b5, b2, b2 / (6 * b5), 2 * b5**2, b5)
        C = casimirs(betas)
        out = [("odd", "odd M=2", betas, -C[1] ** 2 / (4 * C[2]))]
        disc = b2**4 - 9 * b2**3 * b5**4 + 9 * b2**2 * b5**8
        if disc < 0:
            out.append(f"even M=2: discriminant {disc:.6g} < 0, no real betas")
            return out
        r = sqrt(disc)
        for s, name in ((1, "+"), (-1, "-")):
            b1 = (b2**2 + 3 * b2 * b5**4 + s * r) / (15 * b5**3)
            b3 = (2 * b2**2 + 3 * b2 * b5**4 - s * r) / (3 * b2 * b5)
            b4 = (7 * b2**2 + 36 * b2 * b5**4 - s * 8 * r) / (30 * b2 * b5**2)
            betas = (b1, b2, b3, b4, b5)
            C = casimirs(betas)
            out.append(("even", f"even M=2 {name}", betas, -C[1] ** 2 / (4 * C[2])))
        return out
    return None


SYMMETRIZED_CATALOGUE = {4: _sextic_sym, 5: _octic_sym}


def solve_symmetrized(N: int, M: int, parity: str, free_params, seeds=None,
                      tol: float = DEFAULT_TOL) -> Solutions:
    """Parity solutions of the |x|-symmetrized problem.

    ``free_params`` maps beta index -> value.  When the given indices match a
    worked parameterization the remaining betas come from closed forms; any
    other choice is solved numerically for the missing betas and E.
    ``parity`` may be 'even', 'odd' or 'both'.
    """
    if parity not in ("even", "odd", "both"):
        raise ValueError(f"parity must be even, odd or both, got {parity!r}")
    free = {int(k): float(v) for k, v in dict(free_params).items()}
    entries = SYMMETRIZED_CATALOGUE.get(N, lambda *_: None)(M, free)
    if entries is None:
        return solve_symmetrized_generic(N, M, parity, free, seeds=seeds, tol=tol)
    out, diags = [], []
    fixed = tuple(f"beta{k}" for k in sorted(free))
    for entry in entries:
        if isinstance(entry, str):
            if parity in ("both", entry.split()[0].rstrip(":")):
                diags.append(entry)
            continue
        par, label, betas, E = entry
        if parity not in ("both", par):
            continue
        out.extend(_make(betas, M, par, E, label, fixed, tol, diags))
    for d in diags:
        log.info("solve_symmetrized(N=%d, M=%d): %s", N, M, d)
    out.sort(key=lambda s: (s.E, s.parity))
    return Solutions(out, diags)


def solve_symmetrized_generic(N: int, M: int, parity: str, fixed_betas, seeds=None,
                              tol: float = DEFAULT_TOL, per_dim: int = 12, max_seeds: int = 600) -> Solutions:
    """Numerically solve recursion + continuity for E and the missing betas."""
    if parity == "both":
        sols = Solutions()
        for par in PARITIES:
            s = solve_symmetrized_generic(N, M, par, fixed_betas, seeds, tol, per_dim, max_seeds)
            sols.extend(s)
            sols.diagnostics.extend(s.diagnostics)
        sols.sort(key=lambda s: (s.E, s.parity))
        return sols
    fixed = {int(k): float(v) for k, v in dict(fixed_betas).items()}
    unknown = [i for i in range(1, N + 1) if i not in fixed]
    if len(unknown) != N - 2:
        raise ValueError(f"need exactly {N - 2} unknown betas for N={N}, got {len(unknown)}")
    alpha_for(N, M)

    def betas_of(z):
        b = dict(fixed)
        b.update(zip(unknown, z[1:]))
        return [b[i] for i in range(1, N + 1)]

    def f(z):
        betas = betas_of(z)
        if betas[0] <= 0:
            return np.full(N - 1, 1e6)
        C = casimirs(betas)
        s = row_scale(N, C[1])
        a = downward_recursion(N, M, C, z[0])
        cont = _continuity_terms(parity, a, betas)
        return np.append(leftover_residuals(N, M, C, z[0]) * s, cont.sum())

    if seeds is None:
        scale = max(abs(v) for v in fixed.values()) if fixed else 1.0
        axis = np.concatenate([-np.logspace(-1.5, 1.5, per_dim // 2)[::-1], np.logspace(-1.5, 1.5, per_dim // 2)])
        axes = [axis * scale] * (1 + len(unknown))
        combos = list(itertools.product(*axes))
        if len(combos) > max_seeds:
            rng = np.random.default_rng(0)
            combos = [combos[i] for i in sorted(rng.choice(len(combos), max_seeds, replace=False))]
        seeds = [np.array(c) for c in combos]
    roots, diags = [], []
    for z0 in seeds:
        with np.errstate(all="ignore"):
            z, ok = _local_solve(f, np.asarray(z0, float))
        if ok and np.all(np.isfinite(f(z))) and betas_of(z)[0] > 0:
            roots.append(z)
    out = []
    n_degenerate = 0
    for z in _dedupe(roots):
        sv = np.linalg.svd(_jac(f, z), compute_uv=False)
        degenerate = bool(sv[-1] <= 1e-7 * max(1.0, sv[0]))
        n_degenerate += degenerate
        out.extend(_make(betas_of(z), M, parity, z[0], "generic symmetrized",
                         tuple(f"beta{k}" for k in sorted(fixed)), tol, [], degenerate=degenerate))
    if n_degenerate:
        diags.append(f"{n_degenerate} roots lie on a continuous family; fix a different set of betas")
    # _make re-derives E from the betas; keep unique (E, betas)
    uniq = []
    for s in out:
        key = np.append(s.E, s.betas.as_array())
        if not any(np.allclose(key, np.append(u.E, u.betas.as_array()), rtol=1e-6, atol=1e-9) for u in uniq):
            uniq.append(s)
    if not uniq:
        diags.append(f"no admissible {parity} solution from {len(seeds)} seeds")
    uniq.sort(key=lambda s: (s.E, s.parity))
    return Solutions(uniq, diags)


def solve_symmetrized_betas(betas, M: int, parity: str, tol: float = DEFAULT_TOL) -> Solutions:
    """Parity solutions for a fully specified symmetrized potential."""
    betas = BetaVector(betas)
    fixed = tuple(f"beta{k}" for k in range(1, betas.N + 1))
    out, diags = [], []
    for par in PARITIES if parity == "both" else (parity,):
        out.extend(_make(betas, M, par, None, f"{par} fixed-beta", fixed, tol, diags))
    out.sort(key=lambda s: (s.E, s.parity))
    return Solutions(out, diags)
