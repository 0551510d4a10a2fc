"""The E = 0 states of x^(2N-2) - (2M+N-1)|x|^(N-2).

These exist when M = kN or kN + 1.  As N grows the ground state flattens
into a box and the first odd state into a straight line on |x| < 1; the
plateau width printed below tracks that.
"""
import numpy as np

from nilqes.oracle import verify_solution, wavefunction_eval
from nilqes.presets import ZERO_ENERGY_CASES
from nilqes.solver import solve_zero_energy


def main():
    print(f"{'N':>3} {'M':>3} {'parity':>6} {'level':>5} {'grid E':>10}")
    for N, M in ZERO_ENERGY_CASES:
        s = solve_zero_energy(N, M)
        rep = verify_solution(s)
        print(f"{N:>3} {M:>3} {s.parity or '-':>6} {rep.matched_index:>5} {rep.matched_eigenvalue:>10.2e}")

    print("\nground-state plateau: fraction of |x| < 2 where psi > 0.9 psi(0)")
    xs = np.linspace(-2, 2, 2001)
    for N in (2, 3, 4, 5, 6, 10):
        psi = wavefunction_eval(xs, solve_zero_energy(N, 0))
        print(f"  N = {N:>2}: {np.mean(psi > 0.9 * psi[1000]):.3f}")


if __name__ == "__main__":
    main()
