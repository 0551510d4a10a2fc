"""Reference parameter sets used by the demos and the acceptance checks."""
from __future__ import annotations

from .group import BetaVector

ZERO_ENERGY_CASES = (
    (2, 0), (2, 1), (3, 0), (3, 1), (4, 0), (4, 1), (4, 4), (4, 5), (4, 8), (4, 9),
    (5, 0), (6, 1), (10, 0), (10, 1),
)


def sextic_double_well(beta1=6.0, beta2=2.0, beta3=-0.2) -> BetaVector:
    """Sextic betas with beta_4 chosen so that C_3 = 0."""
    beta4 = beta2 * beta3 / beta1 - beta2**3 / (3 * beta1**2)
    return BetaVector((beta1, beta2, beta3, beta4))


def sextic_double_parity(beta4: float) -> BetaVector:
    """Symmetrized sextic (M = 2) with both an even and an odd solution."""
    return BetaVector((16 * beta4**4, 8 * beta4**3, 10 * beta4**2 / 3, beta4))


def octic_parity_cases():
    """(M, parity, free betas) for the symmetrized octic with beta_2 = 2, beta_5 = 0.5.

    M = 0 requires beta_5 = 0, so that case keeps the M = 1 values of
    beta_1, beta_2, beta_3, beta_4 instead.
    """
    return [
        (0, "even", {1: 1.0, 2: 2.0, 3: 2.0, 4: 1.25}),
        (1, "even", {1: 1.0, 5: 0.5}),
        (2, "even", {2: 2.0, 5: 0.5}),
        (2, "odd", {2: 2.0, 5: 0.5}),
    ]


def decatic_casimirs(M: int):
    """(C1, C2, extra) for decatics with beta_1 = 0.5, beta_2 = beta_4 = beta_6 = 0.

    beta_3 = -0.1 gives C2 = -0.05 and beta_5 follows from the M-specific
    constraint.  M = 1 needs C2 = 0, so there beta_3 = 0 and beta_5 = 1.
    """
    if M == 1:
        return 0.5, 0.0, {4: 0.125}
    return 0.5, -0.05, {}
