"""Thermomajorization, transition-probability bounds and guaranteed coherence."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import DomainError
from .qstate import DensityMatrix, HamiltonianSpec, check_beta, gibbs_weights

LORENZ_SLACK = 1e-12
INTERVAL_TOL = 1e-12
BISECT_TOL = 1e-10
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class EnergyDistribution:
    probs: np.ndarray
    hamiltonian: HamiltonianSpec

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).ravel()
        if p.shape != (self.hamiltonian.dim,):
            raise DomainError(f"{len(p)} probabilities for a {self.hamiltonian.dim}-level system")
        if p.min() < -1e-12:
            raise DomainError("probabilities must be non-negative")
        if abs(p.sum() - 1.0) > 1e-10:
            raise DomainError(f"probabilities must sum to 1, got {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def of_state(cls, rho, H: HamiltonianSpec) -> "EnergyDistribution":
        return cls(np.real(np.diag(np.asarray(rho))), H)

    @classmethod
    def qubit(cls, p: float, gap: float = 1.0) -> "EnergyDistribution":
        return cls(np.array([p, 1.0 - p]), HamiltonianSpec((0.0, gap)))


@dataclass(frozen=True)
class LorenzCurve:
    """Gibbs-rescaled Lorenz curve through ``(0, 0)`` ... ``(1, 1)``."""

    x: np.ndarray
    y: np.ndarray

    def __call__(self, t):
        return _kernels.lorenz_evaluate(self.x, self.y, t)

    @property
    def breakpoints(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))

    def write_csv(self, target) -> None:
        """Write ``x,y`` rows (with header) to a path or an open text file."""
        if hasattr(target, "write"):
            _write_xy(target, self)
        else:
            with open(Path(target), "w", newline="") as fh:
                _write_xy(fh, self)


def _write_xy(fh, curve: LorenzCurve):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x", "y"])
    for x, y in zip(curve.x, curve.y):
        w.writerow([format(x, ".17g"), format(y, ".17g")])


def _slopes(p: np.ndarray, g: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(g > 0, p / np.where(g > 0, g, 1.0), np.where(p > 0, np.inf, 0.0))
    return s


def beta_order(dist: EnergyDistribution, beta) -> np.ndarray:
    """Indices sorted by ``p_i * exp(beta * E_i)`` descending, ties by ascending energy."""
    g = gibbs_weights(dist.hamiltonian.array, beta)
    keys = _slopes(dist.probs, g)
    order = sorted(range(len(keys)), key=lambda i: -keys[i])
    # merge near-equal keys into tie groups ordered by level index
    out, group = [], [order[0]]
    for i in order[1:]:
        a, b = keys[group[0]], keys[i]
        if a == b or (math.isfinite(a) and abs(a - b) <= TIE_RTOL * max(abs(a), abs(b))):
            group.append(i)
        else:
            out.extend(sorted(group))
            group = [i]
    out.extend(sorted(group))
    return np.array(out, dtype=np.intp)


def lorenz_curve(dist: EnergyDistribution, beta) -> LorenzCurve:
    g = gibbs_weights(dist.hamiltonian.array, beta)
    order = beta_order(dist, beta)
    x = np.concatenate([[0.0], np.cumsum(g[order])])
    y = np.concatenate([[0.0], np.cumsum(dist.probs[order])])
    x[-1] = y[-1] = 1.0
    return LorenzCurve(x, y)


def thermomajorizes(p: EnergyDistribution, q: EnergyDistribution, beta) -> bool:
    """True when ``q`` is reachable from ``p`` by thermal processing of incoherent states."""
    if p.hamiltonian != q.hamiltonian:
        raise DomainError("distributions refer to different Hamiltonians")
    lp, lq = lorenz_curve(p, beta), lorenz_curve(q, beta)
    return bool(_kernels.lorenz_dominates(lp.x, lp.y, lq.x, lq.y, LORENZ_SLACK))


def transition_bound(H: HamiltonianSpec, beta, k: int, l: int) -> float:
    """Upper bound ``min(1, exp(beta (E_k - E_l)))`` on ``p(l|k)`` for Gibbs-preserving maps."""
    beta = check_beta(beta)
    if not (0 <= k < H.dim and 0 <= l < H.dim):
        raise DomainError(f"level indices out of range for a {H.dim}-level system")
    gap = H.energies[l] - H.energies[k]
    if gap <= 0:
        return 1.0
    return math.exp(-beta * gap)


# -- qubit closed forms ------------------------------------------------------------


def _open_unit(name, v):
    if not 0.0 < v < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {v}")


def extremal_incoherent_qubit(p: float, r: float) -> float:
    """Ground population of the extremal incoherent state reachable from ``p``.

    ``r`` is the thermal ground population.  The extreme is the tighter of the
    two positivity constraints on the Gibbs-preserving transition matrix,
    ``r (1-p) / (1-r)`` and ``1 - (1-r) p / r``.
    """
    _open_unit("p", p)
    _open_unit("r", r)
    if p == r:
        return p
    a = r * (1.0 - p) / (1.0 - r)
    b = 1.0 - (1.0 - r) * p / r
    return min(a, b) if p < r else max(a, b)


def qubit_reachable(p: float, q: float, r: float, tol: float = INTERVAL_TOL) -> bool:
    """Closed-form interval test: ``q`` lies between ``p`` and the extremal ``q~``."""
    qt = extremal_incoherent_qubit(p, r)
    lo, hi = min(p, qt), max(p, qt)
    return lo - tol <= q <= hi + tol


def guaranteed_lambda(p: float, q: float, r: float) -> float:
    """Largest fraction of every coherence mode that survives ``p -> q``."""
    _open_unit("q", q)
    qt = extremal_incoherent_qubit(p, r)
    if not qubit_reachable(p, q, r):
        raise DomainError(
            f"transition not thermomajorized: q={q} outside [{min(p, qt)}, {max(p, qt)}]"
        )
    if abs(p - qt) <= INTERVAL_TOL:
        return 1.0
    return float(np.clip((q - qt) / (p - qt), 0.0, 1.0))


# -- general dimension ---------------------------------------------------------------


def guaranteed_fraction(p: EnergyDistribution, q: EnergyDistribution, beta,
                        tol: float = BISECT_TOL) -> tuple[float, np.ndarray]:
    """Bisection for the largest ``lam`` with ``q = lam p + (1-lam) xi`` and ``xi`` reachable.

    Returns ``(lam, xi)``.  The feasible set along the line is an interval
    containing 0, by convexity of the reachable set.
    """
    if not thermomajorizes(p, q, beta):
        raise DomainError("transition not thermomajorized")
    pv, qv = p.probs, q.probs
    if np.max(np.abs(pv - qv)) <= INTERVAL_TOL:
        return 1.0, qv.copy()

    def xi_at(lam):
        return (qv - lam * pv) / (1.0 - lam)

    def feasible(lam):
        xi = xi_at(lam)
        if xi.min() < -1e-12:
            return False
        xi = np.clip(xi, 0.0, None)
        xi = xi / xi.sum()
        return thermomajorizes(p, EnergyDistribution(xi, p.hamiltonian), beta)

    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    xi = np.clip(xi_at(lo), 0.0, None)
    return lo, xi / xi.sum()


def guaranteed_transform(rho, H: HamiltonianSpec, beta, q_target) -> tuple[float, DensityMatrix]:
    """``(lam*, sigma)`` with ``sigma = lam* rho + (1 - lam*) xi``.

    ``xi`` is the extremal incoherent state on the line through ``p`` and ``q``.
    Qubits use the closed form; larger systems use :func:`guaranteed_fraction`.
    """
    a = np.asarray(rho, dtype=complex)
    if not isinstance(q_target, EnergyDistribution):
        q_target = EnergyDistribution(q_target, H)
    p = EnergyDistribution.of_state(a, H)
    if H.dim == 2:
        r = gibbs_weights(H.array, beta)[0]
        pg, qg = p.probs[0], q_target.probs[0]
        if r >= 1.0 or r <= 0.0:
            lam, xi = guaranteed_fraction(p, q_target, beta)
        elif abs(pg - qg) <= INTERVAL_TOL:
            lam, xi = 1.0, q_target.probs
        else:
            _open_unit("p", pg)
            lam = guaranteed_lambda(pg, qg, r)
            qt = extremal_incoherent_qubit(pg, r)
            xi = np.array([qt, 1.0 - qt])
    else:
        lam, xi = guaranteed_fraction(p, q_target, beta)
    sigma = lam * a + (1.0 - lam) * np.diag(xi)
    # pin the diagonal to the requested distribution (removes bisection residue)
    np.fill_diagonal(sigma, q_target.probs)
    return float(lam), DensityMatrix(sigma)


def guaranteed_sigma(rho, H: HamiltonianSpec, beta, q_target) -> DensityMatrix:
    return guaranteed_transform(rho, H, beta, q_target)[1]
