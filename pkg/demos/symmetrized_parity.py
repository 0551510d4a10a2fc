"""Potentials evaluated at |x|: the double-parity sextic and the octic family.

Odd-N potentials only confine after x -> |x|.  The ansatz then lives on
x > 0 and is continued to x < 0 with a definite parity; the continuity
condition at the origin becomes one more equation for the betas.
"""
from nilqes.oracle import verify_solution
from nilqes.presets import octic_parity_cases
from nilqes.symmetric import solve_symmetrized


def show(title, sols):
    print(title)
    for s in sols:
        rep = verify_solution(s.base)
        b = ", ".join(f"{float(v):.5g}" for v in s.betas)
        print(f"  {s.parity:>4}  E = {s.E:+.6f}  grid level {rep.matched_index} "
              f"(nodes {rep.node_count}, |dE| {rep.delta:.1e})  continuity {s.continuity_residual:.1e}")
        print(f"        betas = ({b})")


def main():
    for b4 in (0.5, -0.5):
        show(f"sextic, M = 2, beta_4 = {b4}", solve_symmetrized(4, 2, "both", {4: b4}))
    print()
    for M, parity, free in octic_parity_cases():
        show(f"octic, M = {M}, {parity}, fixed {free}", solve_symmetrized(5, M, parity, free))


if __name__ == "__main__":
    main()
