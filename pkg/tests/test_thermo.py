import io
import math

import numpy as np
import pytest
from scipy.optimize import linprog

from modeflow.errors import DomainError
from modeflow.qstate import DensityMatrix, HamiltonianSpec, beta_from_occupation, gibbs_weights
from modeflow.thermo import (
    EnergyDistribution,
    beta_order,
    extremal_incoherent_qubit,
    guaranteed_fraction,
    guaranteed_lambda,
    guaranteed_sigma,
    guaranteed_transform,
    lorenz_curve,
    qubit_reachable,
    thermomajorizes,
    transition_bound,
)

QUBIT = HamiltonianSpec((0.0, 1.0))
QUTRIT = HamiltonianSpec.equidistant(3)


def lp_extreme(p, r, sense):
    """Extreme reachable ground population by linear programming over Gibbs-fixing 2x2 stochastic maps.

    Variables (a, b) = (p(0|0), p(0|1)); Lambda (r, 1-r) = (r, 1-r) gives a r + b (1-r) = r.
    """
    c = np.array([p, 1 - p]) * (-1 if sense == "max" else 1)
    res = linprog(c, A_eq=[[r, 1 - r]], b_eq=[r], bounds=[(0, 1), (0, 1)], method="highs")
    return float(np.dot([p, 1 - p], res.x))


def test_beta_order_examples():
    r = 2 / 3
    beta = beta_from_occupation(r)
    gibbs = EnergyDistribution([r, 1 - r], QUBIT)
    assert list(beta_order(gibbs, beta)) == [0, 1]
    assert list(beta_order(EnergyDistribution([0.5, 0.5], QUBIT), beta)) == [1, 0]
    dist = EnergyDistribution([0.2, 0.5, 0.3], QUTRIT)
    assert list(beta_order(dist, 0.0)) == [1, 2, 0]


def test_beta_order_at_zero_temperature():
    dist = EnergyDistribution([0.2, 0.5, 0.3], QUTRIT)
    # excited populations have infinite keys; ties go to the lower level
    assert list(beta_order(dist, math.inf)) == [1, 2, 0]


def test_lorenz_curve_shape():
    curve = lorenz_curve(EnergyDistribution([0.5, 0.5], QUBIT), math.log(2))
    assert curve.breakpoints == pytest.approx([(0, 0), (1 / 3, 0.5), (1, 1)], abs=1e-15)
    assert curve(2 / 3) == pytest.approx(0.75, abs=1e-15)


def test_lorenz_csv():
    buf = io.StringIO()
    lorenz_curve(EnergyDistribution([0.5, 0.5], QUBIT), 0.0).write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x,y"
    assert lines[-1] == "1,1"
    assert len(lines) == 4


def test_thermomajorization_basic(rng):
    for _ in range(20):
        beta = rng.uniform(0, 3)
        p = EnergyDistribution(rng.dirichlet(np.ones(3)), QUTRIT)
        gibbs = EnergyDistribution(gibbs_weights(QUTRIT.array, beta), QUTRIT)
        assert thermomajorizes(p, p, beta)
        assert thermomajorizes(p, gibbs, beta)


def test_thermomajorization_zero_temperature():
    p = EnergyDistribution([0.6, 0.4], QUBIT)
    assert thermomajorizes(p, EnergyDistribution([1.0, 0.0], QUBIT), math.inf)
    assert not thermomajorizes(p, EnergyDistribution([0.5, 0.5], QUBIT), math.inf)


def test_thermomajorization_mismatched_hamiltonian():
    with pytest.raises(DomainError):
        thermomajorizes(EnergyDistribution([0.5, 0.5], QUBIT),
                        EnergyDistribution([0.5, 0.5], HamiltonianSpec((0.0, 2.0))), 1.0)


def test_transition_bound_examples():
    beta = 0.9
    assert transition_bound(QUTRIT, beta, 1, 1) == 1.0
    assert transition_bound(QUTRIT, beta, 0, 1) == pytest.approx(math.exp(-beta))
    assert transition_bound(QUTRIT, beta, 2, 0) == 1.0
    assert transition_bound(QUTRIT, math.inf, 0, 2) == 0.0


def test_extremal_incoherent_examples():
    assert extremal_incoherent_qubit(2 / 3, 2 / 3) == 2 / 3
    assert extremal_incoherent_qubit(0.9, 2 / 3) == pytest.approx(0.55, abs=1e-15)
    # p < r with r > 1/2: the excited-to-ground column saturates first
    assert extremal_incoherent_qubit(0.5, 2 / 3) == pytest.approx(0.75, abs=1e-15)


@pytest.mark.parametrize("p", [0.05, 0.3, 0.5, 0.62, 0.7, 0.9, 0.99])
@pytest.mark.parametrize("r", [0.5, 0.55, 2 / 3, 0.8, 0.95])
def test_extremal_incoherent_matches_lp(p, r):
    if p == r:
        return
    sense = "max" if p < r else "min"
    assert extremal_incoherent_qubit(p, r) == pytest.approx(lp_extreme(p, r, sense), abs=1e-9)


def test_qubit_reachable_interval():
    assert qubit_reachable(0.5, 0.6, 2 / 3)
    assert not qubit_reachable(0.5, 0.8, 2 / 3)
    assert not qubit_reachable(0.5, 0.4, 2 / 3)


def test_guaranteed_lambda_examples():
    assert guaranteed_lambda(0.5, 0.5, 2 / 3) == 1.0
    assert guaranteed_lambda(0.5, 0.75, 2 / 3) == 0.0
    assert guaranteed_lambda(0.5, 0.625, 2 / 3) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError, match="not thermomajorized"):
        guaranteed_lambda(0.5, 0.9, 2 / 3)


def test_guaranteed_sigma_examples():
    beta = beta_from_occupation(2 / 3)
    rho = DensityMatrix.qubit(0.5, 0.4)
    assert guaranteed_sigma(rho, QUBIT, beta, [0.5, 0.5]) == rho
    lam, sigma = guaranteed_transform(rho, QUBIT, beta, [0.625, 0.375])
    assert lam == pytest.approx(0.5, abs=1e-15)
    assert sigma[0, 1] == pytest.approx(0.2, abs=1e-15)
    assert sigma[0, 0].real == 0.625
    ext = guaranteed_sigma(rho, QUBIT, beta, [0.75, 0.25])
    assert abs(ext[0, 1]) < 1e-15


def test_bisection_agrees_with_closed_form():
    r = 2 / 3
    beta = beta_from_occupation(r)
    for p, q in [(0.5, 0.6), (0.3, 0.5), (0.9, 0.7), (0.8, 0.6)]:
        lam, xi = guaranteed_fraction(EnergyDistribution.qubit(p), EnergyDistribution.qubit(q), beta)
        assert lam == pytest.approx(guaranteed_lambda(p, q, r), abs=1e-9)
        assert xi[0] == pytest.approx(extremal_incoherent_qubit(p, r), abs=1e-8)


def test_guaranteed_qutrit_scales_every_mode():
    beta = 0.7
    rho = np.array([[0.5, 0.1, 0.05], [0.1, 0.3, 0.08], [0.05, 0.08, 0.2]])
    g = gibbs_weights(QUTRIT.array, beta)
    q = 0.6 * np.diag(rho) + 0.4 * g
    lam, sigma = guaranteed_transform(rho, QUTRIT, beta, q)
    assert 0.6 - 1e-9 <= lam <= 1.0
    off = ~np.eye(3, dtype=bool)
    assert np.allclose(np.asarray(sigma)[off], lam * rho[off])
    assert np.allclose(np.diag(sigma.data).real, q)


def test_energy_distribution_validation():
    with pytest.raises(DomainError):
        EnergyDistribution([0.5, 0.6], QUBIT)
    with pytest.raises(DomainError):
        EnergyDistribution([0.5, 0.5], QUTRIT)
