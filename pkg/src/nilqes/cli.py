"""Command-line interface: solve, verify, plot-data, em.

Every subcommand writes JSON lines to stdout.  Exit codes:

    solve   0 solutions found, 2 none, 3 invalid zero-energy (N, M)
    verify  0 all records check out, 1 some check failed, 4 unreadable record
    em      0 solutions found, 2 none
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from .em import EmProblem, em_fields, em_residual
from .group import BetaVector, casimir
from .oracle import (
    PotentialSpec,
    count_nodes_solution,
    normalization_factor,
    potential_eval,
    verify_solution,
    wavefunction_eval,
)
from .records import SCHEMA, RecordError, dumps, read_records, record_to_solution, solution_to_record
from .recursion import QesProblem, alpha_for, scaled_residual
from .solver import (
    CATALOGUE,
    DEFAULT_TOL,
    ConstraintRecord,
    QesSolution,
    Solutions,
    downward_recursion,
    solve_betas,
    solve_catalogued,
    solve_generic,
    solve_zero_energy,
)
from .symmetric import solve_symmetrized, solve_symmetrized_betas

SCHRODINGER_TOL = 1e-8
PLOT_SAMPLES = 801


def _tol() -> float:
    return float(os.environ.get("QES_TOL", DEFAULT_TOL))


def _floats(raw: str) -> list[float]:
    return [float(v) for v in raw.replace(" ", "").split(",") if v]


def _betas_with_auto(raw: str) -> list:
    """Comma list of floats; 'auto' entries become None."""
    out = []
    for tok in raw.replace(" ", "").split(","):
        out.append(None if tok.lower() == "auto" else float(tok))
    return out


def _load_seeds(path):
    if path is None:
        return None
    with open(path, encoding="utf-8") as fh:
        return [np.asarray(s, float) for s in json.load(fh)]


# ---------------------------------------------------------------------------
# solve


def _complete_betas(given, sol) -> BetaVector:
    """Fill the trailing betas from the solution's Casimirs, keeping the given ones exact."""
    N = sol.problem.N
    beta = list(given) + [0.0] * (N - len(given))
    C = sol.casimirs
    for k in range(len(given), N):
        beta[k] = 0.0
        beta[k] = (C[k] - casimir(k, beta)) / beta[0] ** (k - 1)
    return BetaVector(beta)


def _solve_partial_betas(N, M, given, seeds, tol) -> Solutions:
    n = len(given)
    if n < 3:
        raise ValueError("give at least beta_1..beta_3 before the 'auto' entries")
    fixed = {k: casimir(k, list(given) + [0.0] * (N - n)) for k in range(1, n)}
    beta2 = given[1]
    if (N, M) in CATALOGUE:
        extra = {k: v for k, v in fixed.items() if k > 2}
        raw = solve_catalogued(N, M, fixed[1], fixed[2], extra, beta2, tol)
    else:
        raw = solve_generic(N, M, fixed, seeds=seeds, beta2=beta2, tol=tol)
    out = Solutions([], raw.diagnostics)
    for s in raw:
        betas = _complete_betas(given, s)
        problem = QesProblem.from_betas(betas, M)
        a = downward_recursion(N, M, problem.casimirs, s.E)
        res = scaled_residual(problem, problem.casimirs, s.E, a)
        if res > tol:
            out.diagnostics.append(f"{s.branch}: residual {res:.3g} after restoring exact betas")
            continue
        rec = ConstraintRecord(tuple(f"beta{k}" for k in range(1, n + 1)),
                               ("E",) + tuple(f"beta{k}" for k in range(n + 1, N + 1)), float(res))
        out.append(QesSolution(problem, s.E, tuple(float(v) for v in a), s.branch, rec, None, s.degenerate))
    return out


def _solve(args) -> Solutions:
    N, M, tol = args.n, args.m, _tol()
    seeds = _load_seeds(args.seeds)
    if args.zero_energy:
        return Solutions([solve_zero_energy(N, M)])
    if args.casimir:
        C = _floats(args.casimir)
        if len(C) < 2:
            raise ValueError("--casimir needs at least C1,C2")
        if (N, M) in CATALOGUE:
            extra = {k: C[k - 1] for k in range(3, len(C) + 1)}
            return solve_catalogued(N, M, C[0], C[1], extra, args.beta2, tol)
        return solve_generic(N, M, {k: C[k - 1] for k in range(1, len(C) + 1)}, seeds=seeds,
                             beta2=args.beta2, tol=tol)
    if not args.beta:
        raise ValueError("one of --beta, --casimir or --zero-energy is required")
    betas = _betas_with_auto(args.beta)
    if len(betas) != N:
        raise ValueError(f"--beta needs {N} entries, got {len(betas)}")
    if args.symmetrized:
        if None in betas:
            free = {i + 1: b for i, b in enumerate(betas) if b is not None}
            return solve_symmetrized(N, M, args.parity, free, seeds=seeds, tol=tol)
        return solve_symmetrized_betas(betas, M, args.parity, tol)
    if None not in betas:
        return solve_betas(betas, M, alpha=args.alpha, tol=tol)
    n_given = betas.index(None)
    if any(b is not None for b in betas[n_given:]):
        raise ValueError("'auto' entries must be trailing")
    return _solve_partial_betas(N, M, betas[:n_given], seeds, tol)


def _node_count(sol):
    try:
        return count_nodes_solution(sol)
    except ValueError:
        return None


def _oracle_block(sol, n=4000):
    rep = verify_solution(sol, n=n)
    return {"grid": {"L": rep.L, "n": rep.n}, "matched_eigenvalue": rep.matched_eigenvalue,
            "delta": rep.delta, "matched_index": rep.matched_index, "residual_norm": rep.residual_norm}


def cmd_solve(args, argv) -> int:
    if args.zero_energy and (args.beta or args.casimir):
        print("--zero-energy fixes the betas; drop --beta/--casimir", file=sys.stderr)
        return 2
    try:
        sols = _solve(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3 if args.zero_energy else 2
    for d in sols.diagnostics:
        print(f"note: {d}", file=sys.stderr)
    for s in sols:
        base = getattr(s, "base", s)
        oracle = _oracle_block(base) if args.check else None
        print(dumps(solution_to_record(base, argv, _node_count(base), oracle)))
    return 0 if sols else 2


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args, argv) -> int:
    try:
        sols = [record_to_solution(r) for r in read_records(args.record)]
    except (RecordError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    tol = _tol()
    L = None if args.box == "auto" else float(args.box)
    all_ok = True
    for sol in sols:
        p = sol.problem
        res = scaled_residual(p, p.casimirs, sol.E, sol.a)
        rep = verify_solution(sol, n=args.grid_n, L=L, levels=args.levels, richardson=True)
        ok = bool(res <= tol and rep.residual_norm <= SCHRODINGER_TOL and rep.ok)
        all_ok &= ok
        print(dumps({
            "schema_version": SCHEMA,
            "branch": sol.branch,
            "E": sol.E,
            "recursion_residual": float(res),
            "schrodinger_residual": rep.residual_norm,
            "grid": {"L": rep.L, "n": rep.n},
            "eigenvalues": list(rep.eigenvalues),
            "matched_index": rep.matched_index,
            "matched_eigenvalue": rep.matched_eigenvalue,
            "delta": rep.delta,
            "match": rep.match,
            "node_count": rep.node_count,
            "richardson_ratio": rep.richardson_ratio,
            "wall_warning": rep.wall_warning,
            "ok": ok,
        }))
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# plot-data


def _write_csv(path: Path, ys, values):
    with path.open("w", encoding="utf-8") as fh:
        fh.write("y,value\n")
        for y, v in zip(ys, values):
            fh.write(f"{float(y)!r},{float(v)!r}\n")


def arctan_samples(n: int = PLOT_SAMPLES) -> np.ndarray:
    """n midpoints of a uniform partition of (-pi/2, pi/2)."""
    return -math.pi / 2 + (np.arange(n) + 0.5) * math.pi / n


def cmd_plot_data(args, argv) -> int:
    try:
        sols = [record_to_solution(r) for r in read_records(args.record)]
    except (RecordError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ys = arctan_samples()
    xs = np.tan(ys)
    spec = PotentialSpec.from_solution(sols[0])
    if spec.N % 2 == 1 and not spec.symmetrized:
        print("error: odd N needs a symmetrized record to be plotted on the whole line", file=sys.stderr)
        return 2
    _write_csv(out / "potential.csv", ys, potential_eval(xs, spec))
    used = set()
    for sol in sols:
        if PotentialSpec.from_solution(sol) != spec:
            print(f"note: {sol.branch} has a different potential; only the first is written", file=sys.stderr)
        c = normalization_factor(sol, args.normalize)
        with np.errstate(over="ignore", invalid="ignore"):
            psi = np.nan_to_num(c * wavefunction_eval(xs, sol), nan=0.0, posinf=0.0, neginf=0.0)
        name = re.sub(r"[^A-Za-z0-9=+.-]+", "_", sol.branch).strip("_") or "branch"
        stem, i = name, 1
        while name in used:
            i += 1
            name = f"{stem}_{i}"
        used.add(name)
        _write_csv(out / f"psi_{name}.csv", ys, psi)
        print(dumps({"branch": sol.branch, "E": sol.E, "file": str(out / f"psi_{name}.csv"),
                     "normalization": args.normalize}))
    return 0


# ---------------------------------------------------------------------------
# em


def cmd_em(args, argv) -> int:
    betas = _floats(args.beta)
    N, M = args.n, args.m
    alpha = args.alpha if N == 2 else alpha_for(N, M)
    try:
        prob = EmProblem(N, M, alpha, betas, args.py, args.pz)
        sols = solve_betas(prob.full_betas(), M, alpha=alpha, tol=_tol())
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    xs = np.linspace(-2.0, 2.0, 5)
    Evec, Bvec = em_fields(xs, prob)
    fields = {"x": xs.tolist(), "E": Evec.T.tolist(), "B": Bvec.T.tolist(), "constant_B": N == 2}
    rng = np.random.default_rng(0)
    pts = rng.uniform(-2.0, 2.0, size=(32, 3))
    for d in sols.diagnostics:
        print(f"note: {d}", file=sys.stderr)
    if not sols:
        print(dumps({"schema_version": SCHEMA, "reduced": None, "fields": fields}))
        return 2
    for sol in sols:
        script_E, res = em_residual(sol, args.py, args.pz, pts)
        print(dumps({
            "schema_version": SCHEMA,
            "reduced": solution_to_record(sol, argv, _node_count(sol)),
            "p_y": args.py,
            "p_z": args.pz,
            "script_E": script_E,
            "residual_3d": res,
            "fields": fields,
        }))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nilqes", description="Quasi-exactly solvable polynomial potentials.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="analytic eigenpairs for a potential or a family")
    s.add_argument("--n", type=int, required=True, help="group index N (potential degree 2N-2)")
    s.add_argument("--m", type=int, required=True, help="degree of the polynomial prefactor")
    s.add_argument("--beta", help="beta_1..beta_N; trailing 'auto' entries are solved for")
    s.add_argument("--casimir", help="C_1,C_2[,C_3...]")
    s.add_argument("--beta2", type=float, default=0.0, help="beta_2 used with --casimir")
    s.add_argument("--symmetrized", action="store_true", help="potential in |x| with parity states")
    s.add_argument("--parity", choices=("even", "odd", "both"), default="both")
    s.add_argument("--zero-energy", action="store_true", help="the E=0 family x^(2N-2) - (2M+N-1)|x|^(N-2)")
    s.add_argument("--seeds", help="JSON file with starting points for the numerical solver")
    s.add_argument("--alpha", type=float, default=None, help="alpha for N=2 (fixed by M otherwise)")
    s.add_argument("--check", action="store_true", help="attach a finite-difference check to each record")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="re-check records against the grid eigensolver")
    v.add_argument("--record", required=True)
    v.add_argument("--grid-n", type=int, default=4000)
    v.add_argument("--box", default="auto", help="half-width L or 'auto'")
    v.add_argument("--levels", type=int, default=8)
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot-data", help="CSV curves sampled in y = arctan x")
    p.add_argument("--record", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--normalize", type=float, default=1.0, help="value of int dy psi^2")
    p.set_defaults(func=cmd_plot_data)

    e = sub.add_parser("em", help="charged particle in the matching E and B fields")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--beta", required=True, help="beta_1..beta_{N-1}")
    e.add_argument("--py", type=float, default=0.0)
    e.add_argument("--pz", type=float, default=0.0)
    e.add_argument("--alpha", type=float, default=0.0, help="alpha for N=2")
    e.set_defaults(func=cmd_em)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    return args.func(args, argv)


if __name__ == "__main__":
    sys.exit(main())
