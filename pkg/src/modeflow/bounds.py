"""Upper bounds on a final coherence ``|rho'_nm|``.

The three matrix bounds differ in what they assume about the channel:

* :func:`cptp_bound` - any channel with transition matrix ``Lambda``;
* :func:`symmetric_bound` - time-translation covariant channels (sum restricted
  to the mode of ``(n, m)``);
* :func:`thermal_bound` - covariant and Gibbs-preserving; needs only ``beta``.

All functions return the raw formula value, never clamped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channels import StochasticMatrix
from .errors import DomainError
from .qstate import HamiltonianSpec, check_beta

FEASIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class BoundQuery:
    rho: object
    hamiltonian: HamiltonianSpec
    target: tuple[int, int]
    stochastic: StochasticMatrix | np.ndarray | None = None
    beta: float | None = None

    def __post_init__(self):
        d = self.hamiltonian.dim
        n, m = self.target
        if not (0 <= n < d and 0 <= m < d):
            raise DomainError(f"target {self.target} out of range for dimension {d}")
        if np.shape(self.rho) != (d, d):
            raise DomainError("state does not match Hamiltonian dimension")
        if self.stochastic is not None and not isinstance(self.stochastic, StochasticMatrix):
            object.__setattr__(self, "stochastic", StochasticMatrix(self.stochastic))

    @property
    def absrho(self) -> np.ndarray:
        return np.ascontiguousarray(np.abs(np.asarray(self.rho)), dtype=float)

    def _lambda_rows(self):
        if self.stochastic is None:
            raise DomainError("this bound needs the transition matrix Lambda")
        L = self.stochastic.matrix
        n, m = self.target
        return np.ascontiguousarray(L[n]), np.ascontiguousarray(L[m])


def cptp_bound(q: BoundQuery) -> float:
    """``sum_{c,d} |rho_cd| sqrt(p(n|c) p(m|d))`` over all index pairs."""
    wn, wm = q._lambda_rows()
    labels = q.hamiltonian.modes.labels
    return float(_kernels.coherence_bound(q.absrho, wn, wm, labels, 0, False))


def symmetric_bound(q: BoundQuery) -> float:
    """The CPTP bound restricted to pairs ``(c, d)`` in the same mode as ``(n, m)``."""
    wn, wm = q._lambda_rows()
    labels = q.hamiltonian.modes.labels
    n, m = q.target
    return float(_kernels.coherence_bound(q.absrho, wn, wm, labels, labels[n, m], True))


def thermal_bound(q: BoundQuery) -> float:
    """Mode-restricted sum with contributions from below ``E_n`` damped by ``exp(-beta gap)``."""
    if q.beta is None:
        raise DomainError("thermal bound needs beta")
    beta = check_beta(q.beta)
    n, m = q.target
    H = q.hamiltonian
    return float(_kernels.thermal_bound_sum(q.absrho, H.array, H.modes.labels, n, m, beta))


# -- qutrit merging --------------------------------------------------------------


def _nonneg(**kw):
    for k, v in kw.items():
        if v < 0:
            raise DomainError(f"{k} must be non-negative, got {v}")


def merge_bound_symmetric(a: float, b: float) -> float:
    _nonneg(a=a, b=b)
    return math.hypot(a, b)


def merge_optimal_x(a: float, b: float) -> float:
    """Merge-channel parameter attaining :func:`merge_bound_symmetric`."""
    _nonneg(a=a, b=b)
    h = math.hypot(a, b)
    return b / h if h > 0 else 0.0


def merge_bound_thermal(a: float, b: float, beta, omega0: float = 1.0,
                        direction: str = "down") -> float:
    _nonneg(a=a, b=b)
    beta = check_beta(beta)
    if direction == "down":
        return math.hypot(a, b)
    if direction == "up":
        return math.sqrt(math.exp(-beta * omega0) * a * a + b * b)
    raise DomainError(f"direction must be 'up' or 'down', got {direction!r}")


# -- qubits ------------------------------------------------------------------------


def qubit_symmetric_bound(p: float, q: float, c: float) -> float:
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise DomainError("p and q must lie in (0, 1)")
    return abs(c) * math.sqrt(min(q / p, (1.0 - q) / (1.0 - p)))


def qubit_gp_transitions(p: float, q: float, r: float) -> tuple[float, float]:
    """``(p(0|0), p(1|1))`` fixed by ``Lambda p = q`` and ``Lambda r = r``.

    Raises DomainError when either lies outside ``[0, 1]`` (``q`` not thermally
    reachable from ``p``).
    """
    for name, v in (("p", p), ("q", q), ("r", r)):
        if not 0.0 < v < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {v}")
    if p == r:
        raise DomainError("p = r: the Gibbs-preserving transition matrix is not fixed")
    p00 = (q * (1.0 - r) - r * (1.0 - p)) / (p - r)
    p11 = (r * (1.0 - q) - p * (1.0 - r)) / (r - p)
    for name, v in (("p(0|0)", p00), ("p(1|1)", p11)):
        if v < -FEASIBILITY_TOL or v > 1.0 + FEASIBILITY_TOL:
            raise DomainError(f"infeasible transition: {name} = {v:.6g} outside [0, 1]")
    return min(max(p00, 0.0), 1.0), min(max(p11, 0.0), 1.0)


def qubit_thermal_bound(p: float, q: float, r: float, c: float) -> float:
    p00, p11 = qubit_gp_transitions(p, q, r)
    radicand = (q * (1.0 - r) - r * (1.0 - p)) * (p * (1.0 - r) - r * (1.0 - q))
    if radicand < 0:
        if radicand < -FEASIBILITY_TOL:
            raise DomainError("negative radicand")
        radicand = 0.0
    return abs(c) * math.sqrt(radicand) / abs(p - r)
