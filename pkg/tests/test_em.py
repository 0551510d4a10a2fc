import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nilqes.em import EmProblem, em_fields, em_residual, lift_to_3d, plane_wave_eigenfunction, reduce_to_1d
from nilqes.group import generator_poly
from nilqes.oracle import wavefunction_eval
from nilqes.solver import solve_betas


def sextic_fiber(p_y, beta1=6.0, beta2=2.0):
    """Sextic M=1 problem on the fiber p_y, with beta_3 chosen so that C_3 = 0."""
    beta4 = -p_y
    beta3 = (beta1**2 * beta4 + beta2**3 / 3) / (beta1 * beta2)
    return EmProblem(4, 1, -5 / 3, (beta1, beta2, beta3), p_y, 0.0)


def test_constant_field_for_N2():
    prob = EmProblem(2, 0, 0.0, (1.5,))
    E, B = em_fields(np.linspace(-1, 1, 5), prob)
    assert_allclose(B[2], 1.5)
    assert_allclose(E, 0.0)


def test_fields_orthogonal_and_related():
    prob = EmProblem(5, 2, -2.0, (1.0, 0.3, -0.2, 0.7))
    xs = np.linspace(-2, 2, 9)
    E, B = em_fields(xs, prob)
    assert_allclose(np.einsum("i...,i...->...", E, B), 0.0, atol=1e-14)
    dBz = generator_poly(4, prob.full_betas()).deriv()(xs)
    assert_allclose(dBz, E[0] / -prob.alpha, rtol=1e-12)
    assert_allclose(E[1:], 0.0)
    assert_allclose(B[:2], 0.0)


def test_reduce_to_1d():
    prob = EmProblem(4, 1, -5 / 3, (6.0, 2.0, -0.2), p_y=0.0, p_z=0.0)
    problem, E = reduce_to_1d(prob, 3.0)
    assert problem.betas[4] == 0.0 and E == 3.0
    prob = EmProblem(4, 1, -5 / 3, (6.0, 2.0, -0.2), p_y=0.3, p_z=2.0)
    problem, E = reduce_to_1d(prob, 5.0)
    assert E == 1.0
    assert problem.betas[4] == -0.3
    assert lift_to_3d(E, prob.p_z) == 5.0


def test_distinct_momenta_give_distinct_problems():
    base = EmProblem(4, 1, -5 / 3, (6.0, 2.0, -0.2))
    seen = set()
    for p_y in (-1.0, 0.0, 0.5, 1.0):
        problem, _ = reduce_to_1d(EmProblem(4, 1, base.alpha, base.betas, p_y, 0.0), 0.0)
        seen.add(problem.betas)
    assert len(seen) == 4


def test_plane_wave_at_zero_momentum():
    prob = sextic_fiber(0.0)
    (sol,) = solve_betas(prob.full_betas(), 1)
    xs = np.linspace(-1, 1, 5)
    phi = plane_wave_eigenfunction(xs, 0.3, -0.2, sol, 0.0, 0.0)
    assert_allclose(phi, wavefunction_eval(xs, sol) / (2 * math.pi))


def test_plane_wave_modulus_independent_of_yz():
    prob = sextic_fiber(0.4)
    (sol,) = solve_betas(prob.full_betas(), 1)
    a = plane_wave_eigenfunction(0.2, 0.0, 0.0, sol, 0.4, 1.0)
    b = plane_wave_eigenfunction(0.2, 3.1, -7.0, sol, 0.4, 1.0)
    assert abs(a) == pytest.approx(abs(b))


def test_plane_wave_requires_matching_fiber():
    prob = sextic_fiber(0.4)
    (sol,) = solve_betas(prob.full_betas(), 1)
    with pytest.raises(ValueError):
        plane_wave_eigenfunction(0.0, 0.0, 0.0, sol, 0.5, 0.0)


@pytest.mark.parametrize("p_y", [-1.0, 0.0, 1.0])
@pytest.mark.parametrize("p_z", [-1.0, 0.0, 1.0])
def test_three_dimensional_eigenvalue(p_y, p_z):
    prob = sextic_fiber(p_y)
    (sol,) = solve_betas(prob.full_betas(), 1)
    C = sol.casimirs
    assert sol.E == pytest.approx(4 / 3 * C[2] / C[1], rel=1e-12)
    pts = np.random.default_rng(0).uniform(-2, 2, size=(40, 3))
    script_E, res = em_residual(sol, p_y, p_z, pts)
    assert res < 1e-10
    assert script_E == sol.E + p_z**2


def test_em_problem_validation():
    with pytest.raises(ValueError):
        EmProblem(4, 1, -5 / 3, (6.0, 2.0))
    with pytest.raises(ValueError):
        EmProblem(1, 0, 0.0, ())
