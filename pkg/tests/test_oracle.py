import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from nilqes.group import generator_poly
from nilqes.oracle import (
    PotentialSpec,
    arctan_norm,
    box_half_width,
    chebyshev_points,
    count_nodes,
    count_nodes_solution,
    fd_eigensolve,
    match_eigenvalue,
    normalization_factor,
    potential_eval,
    schrodinger_residual,
    verify_solution,
    wavefunction_eval,
)
from nilqes.presets import sextic_double_well
from nilqes.solver import harmonic_solution, solve_betas, solve_catalogued, solve_zero_energy

FIG_BETAS = sextic_double_well()


def test_potential_examples():
    assert potential_eval(1.7, PotentialSpec(2, 0.0, (1.0, 0.0))) == pytest.approx(1.7**2)
    assert potential_eval(1.0, PotentialSpec.zero_energy(4, 0)) == pytest.approx(-2.0)
    spec = PotentialSpec(4, -1.0, FIG_BETAS)
    assert potential_eval(0.0, spec) == pytest.approx(FIG_BETAS[4] ** 2 + 0.2)


@pytest.mark.parametrize("N,M", [(2, 0), (3, 1), (4, 4), (6, 1), (10, 0)])
def test_zero_energy_potential_formula(N, M):
    spec = PotentialSpec.zero_energy(N, M)
    xs = np.linspace(-2, 2, 21)
    expected = xs ** (2 * N - 2) - (2 * M + N - 1) * np.abs(xs) ** (N - 2)
    assert_allclose(potential_eval(xs, spec), expected, rtol=1e-12, atol=1e-12)


def test_potential_matches_generator_expansion():
    betas = (1.3, -0.4, 0.9, 0.2, -1.1)
    spec = PotentialSpec(5, -2.0, betas)
    xs = np.linspace(-2, 2, 17)
    expected = generator_poly(5, betas)(xs) ** 2 - 2.0 * generator_poly(4, betas)(xs)
    assert_allclose(potential_eval(xs, spec), expected, rtol=1e-12, atol=1e-12)


def test_sextic_ground_state_formula():
    (s,) = solve_betas(FIG_BETAS, 0)
    b1, b2, b3, b4 = FIG_BETAS
    xs = np.linspace(-1.5, 1.5, 11)
    expected = np.exp(-b4 * xs - b3 * xs**2 / 2 - b2 * xs**3 / 6 - b1 * xs**4 / 24)
    assert_allclose(wavefunction_eval(xs, s), expected, rtol=1e-12)


def test_zero_energy_M1_odd_N():
    """For N odd the M=1 state is x exp(-|x|^N / N) (up to normalization)."""
    s = solve_zero_energy(5, 1)
    xs = np.linspace(-1.5, 1.5, 13)
    psi = wavefunction_eval(xs, s)
    expected = xs * np.exp(-np.abs(xs) ** 5 / 5)
    k = psi[-1] / expected[-1]
    assert_allclose(psi, k * expected, rtol=1e-12, atol=1e-15)


def test_wavefunction_at_X2_root_is_a0():
    (s,) = solve_betas(FIG_BETAS, 1)
    x0 = -FIG_BETAS[2] / FIG_BETAS[1]
    F = generator_poly(4, FIG_BETAS).integ()
    assert wavefunction_eval(x0, s) == pytest.approx(s.a[0] * math.exp(-F(x0)), abs=1e-15)


def test_odd_N_unsymmetrized_rejects_negative_x():
    (s,) = solve_betas((1.0, 0.0, 0.0), 0)
    with pytest.raises(ValueError):
        wavefunction_eval(-0.5, s)
    assert wavefunction_eval(0.5, s) > 0


@pytest.mark.parametrize("M", range(6))
def test_analytic_residual_of_catalogue(M):
    xs = chebyshev_points(50, -3, 3)
    for s in solve_catalogued(4, M, 6.0, -3.2):
        assert schrodinger_residual(s, xs) < 1e-10
        wrong = s.__class__(s.problem, s.E + 1e-3, s.a, s.branch, s.record)
        assert schrodinger_residual(wrong, xs) > 1e-4


def test_analytic_residual_zero_energy_decatic_family():
    s = solve_zero_energy(10, 1)
    assert schrodinger_residual(s, chebyshev_points(50, -3, 3)) < 1e-8


def test_fd_harmonic_spectrum():
    spec = PotentialSpec(2, 0.0, (1.0, 0.0))
    res = fd_eigensolve(spec, 10.0, 2000, 3)
    assert_allclose(res.eigenvalues, [1.0, 3.0, 5.0], atol=1e-3)
    assert not res.wall_warning
    assert res.n % 2 == 1 and 0.0 in res.x


def test_fd_richardson_ratio():
    spec = PotentialSpec(2, 0.0, (1.0, 0.0))
    for k in range(3):
        e1 = abs(fd_eigensolve(spec, 10.0, 1001, 3).eigenvalues[k] - (2 * k + 1))
        e2 = abs(fd_eigensolve(spec, 10.0, 2003, 3).eigenvalues[k] - (2 * k + 1))
        assert 3.0 <= e1 / e2 <= 5.0


def test_fd_sextic_contains_closed_form():
    spec = PotentialSpec(4, -5 / 3, FIG_BETAS)
    res = fd_eigensolve(spec, box_half_width(spec, 0.0), 4000, 4)
    _, _, delta, ok = match_eigenvalue(4 / 3 * (-3.2 / 6), res.eigenvalues)
    assert ok and delta < 1e-3


def test_fd_symmetrized_double_parity():
    spec = PotentialSpec(4, -7 / 3, (1.0, 1.0, 10 / 12, 0.5), symmetrized=True)
    res = fd_eigensolve(spec, 4.0, 4000, 3)
    assert_allclose(res.eigenvalues[:2], [-10 / 9, 14 / 9], atol=1e-3)


def test_fd_wall_warning():
    spec = PotentialSpec(2, 0.0, (1.0, 0.0))
    with pytest.warns(RuntimeWarning):
        res = fd_eigensolve(spec, 1.0, 400, 1)
    assert res.wall_warning


def test_fd_input_validation():
    spec = PotentialSpec(2, 0.0, (1.0, 0.0))
    with pytest.raises(ValueError):
        fd_eigensolve(spec, 10.0, 100, 1)
    with pytest.raises(ValueError):
        fd_eigensolve(spec, -1.0, 400, 1)


def test_box_half_width():
    spec = PotentialSpec(2, 0.0, (1.0, 0.0))
    assert box_half_width(spec, 0.0) == 7.5
    assert box_half_width(PotentialSpec.zero_energy(10, 0), 0.0) == 3.0


def test_count_nodes():
    x = np.linspace(-3, 3, 1001)
    assert count_nodes(np.exp(-(x**2))) == 0
    assert count_nodes(x * np.exp(-(x**2))) == 1
    assert count_nodes((4 * x**2 - 2) * np.exp(-(x**2))) == 2
    # sub-threshold noise in the tails is ignored
    noisy = np.exp(-(x**2)) + 1e-12 * np.sin(50 * x)
    assert count_nodes(noisy) == 0


@pytest.mark.parametrize("M,expected", [(0, [0]), (1, [1]), (2, [0, 2]), (3, [1, 3])])
def test_sextic_node_counts(M, expected):
    sols = [s for s in solve_catalogued(4, M, 6.0, -3.2)]
    assert [count_nodes_solution(s) for s in sols] == expected


def test_grid_node_count_matches_index():
    spec = PotentialSpec(2, 0.0, (1.0, 0.0))
    res = fd_eigensolve(spec, 10.0, 2000, 4)
    assert [count_nodes(res.vectors[:, k]) for k in range(4)] == [0, 1, 2, 3]


def test_arctan_normalization():
    s = harmonic_solution(1)
    c = normalization_factor(s, 10.0)
    # independent check in x: int psi^2 / (1 + x^2) dx
    val, _ = integrate.quad(lambda x: (c * wavefunction_eval(x, s)) ** 2 / (1 + x * x), -np.inf, np.inf)
    assert val == pytest.approx(10.0, abs=1e-6)
    assert arctan_norm(s) * c**2 == pytest.approx(10.0, abs=1e-9)


def test_verify_solution_report():
    (s,) = solve_betas(FIG_BETAS, 1)
    rep = verify_solution(s, richardson=True)
    assert rep.ok and rep.match
    assert rep.matched_index == rep.node_count == 1
    assert rep.eigenvalues == tuple(sorted(rep.eigenvalues))
    assert math.isfinite(rep.residual_norm)
    assert 3.0 <= rep.richardson_ratio <= 5.0
    assert rep.grid == (rep.L, rep.n)


def test_verify_detects_wrong_energy():
    (s,) = solve_betas(FIG_BETAS, 1)
    wrong = s.__class__(s.problem, s.E + 0.05, s.a, s.branch, s.record)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = verify_solution(wrong)
    assert not rep.match and not rep.ok


def test_box_clears_a_well_next_to_the_wall():
    """A high wall 0.5 past a deep well still clips the tail; the tunnelling condition moves it out."""
    spec = PotentialSpec(4, -11 / 3, (1.0, 0.0, -1.0, -1.5994714870546693))
    assert min(potential_eval(4.5, spec), potential_eval(-4.5, spec)) > -1.9 + 50
    L = box_half_width(spec, -1.9)
    assert L > 4.5
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        res = fd_eigensolve(spec, L, 4000, 3)
    assert res.eigenvalues[2] == pytest.approx(-40 / 21, abs=1e-3)
