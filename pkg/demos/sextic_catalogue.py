"""Closed-form sextic levels for M = 0..5 next to a finite-difference spectrum.

The betas (6, 2, -0.2, beta_4) are fixed with beta_4 chosen so that C_3 = 0.
For each M the script prints the analytic energies, the node count of each
eigenfunction, and the grid eigenvalue it lands on.
"""
from nilqes.group import casimirs
from nilqes.oracle import verify_solution
from nilqes.presets import sextic_double_well
from nilqes.solver import solve_betas


def main():
    betas = sextic_double_well()
    C = casimirs(betas)
    print(f"betas = {tuple(round(float(b), 6) for b in betas)}")
    print(f"C1 = {C[1]:g}, C2 = {C[2]:g}, C3 = {C[3]:g}\n")
    print(f"{'M':>2} {'alpha':>8} {'E (analytic)':>14} {'nodes':>5} {'level':>5} {'E (grid)':>12} {'|dE|':>9}")
    for M in range(6):
        for s in solve_betas(betas, M):
            rep = verify_solution(s)
            print(f"{M:>2} {s.problem.alpha:>8.4f} {s.E:>14.8f} {rep.node_count:>5} "
                  f"{rep.matched_index:>5} {rep.matched_eigenvalue:>12.8f} {rep.delta:>9.2e}")


if __name__ == "__main__":
    main()
