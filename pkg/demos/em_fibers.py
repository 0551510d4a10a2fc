"""From a 3D field configuration to a family of 1D problems.

A vector potential A = (0, X_N(x) + p_y, 0) gives a magnetic field along z
and, for N > 2, an electric field along x.  Plane waves in y and z reduce
the 3D Hamiltonian to 1D potentials labelled by p_y, with beta_N = -p_y.
"""
import numpy as np

from nilqes.em import EmProblem, em_fields, em_residual
from nilqes.solver import solve_betas


def main():
    beta1, beta2 = 6.0, 2.0
    pts = np.random.default_rng(0).uniform(-2, 2, size=(40, 3))
    print(f"{'p_y':>5} {'p_z':>5} {'E (1D)':>10} {'E (3D)':>10} {'residual':>9}")
    for p_y in (-1.0, 0.0, 1.0):
        # beta_3 keeps C_3 = 0 on this fiber so the M = 1 state exists
        beta3 = (-(beta1**2) * p_y + beta2**3 / 3) / (beta1 * beta2)
        prob = EmProblem(4, 1, -5 / 3, (beta1, beta2, beta3), p_y, 0.0)
        (sol,) = solve_betas(prob.full_betas(), 1)
        for p_z in (-1.0, 0.0, 1.0):
            script_E, res = em_residual(sol, p_y, p_z, pts)
            print(f"{p_y:>5} {p_z:>5} {sol.E:>10.6f} {script_E:>10.6f} {res:>9.1e}")

    E, B = em_fields(np.array([-1.0, 0.0, 1.0]), EmProblem(4, 1, -5 / 3, (6.0, 2.0, -0.2), 0.0, 0.0))
    print("\nfields at x = -1, 0, 1")
    print("  E_x =", np.round(E[0], 4))
    print("  B_z =", np.round(B[2], 4))


if __name__ == "__main__":
    main()
