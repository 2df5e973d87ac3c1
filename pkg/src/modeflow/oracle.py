"""Brute-force checks of the analytic results.

Random channels are built from explicit dilations: a unitary commuting with the
total Hamiltonian acts on system (x) environment, and the environment is traced
out.  A diagonal environment state gives a time-translation symmetric channel;
a Gibbs environment additionally gives a thermal operation.

Sweeps derive one generator per trial from ``default_rng([seed, index])`` so any
violation can be replayed from the ``(seed, index)`` pair it is reported with.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat

import numpy as np
from scipy.stats import unitary_group

from .bounds import (
    BoundQuery,
    cptp_bound,
    merge_bound_symmetric,
    merge_optimal_x,
    qubit_symmetric_bound,
    qubit_thermal_bound,
    symmetric_bound,
    thermal_bound,
)
from .channels import (
    ChannelClassReport,
    KrausChannel,
    StochasticMatrix,
    classify,
    dilation_kraus,
    induced_stochastic,
    merge_channel,
    qubit_extremal_symmetric_channel,
    shift_channel,
)
from .errors import DomainError
from .qstate import (
    FREQ_TOL,
    DensityMatrix,
    HamiltonianSpec,
    check_beta,
    gibbs_weights,
    mode_decompose,
    mode_l1_all,
)
from .thermo import transition_bound

SLACK = 1e-9
BOUND_IDS = ("shift_down", "shift_up", "merge_symmetric", "qubit_symmetric", "qubit_thermal")


def sweep_workers() -> int:
    """Worker count from ``MODEFLOW_THREADS`` (0 or unset = all cores)."""
    try:
        n = int(os.environ.get("MODEFLOW_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


# -- random ingredients --------------------------------------------------------------


def random_hamiltonian(rng, d: int) -> HamiltonianSpec:
    """Equidistant, integer-valued or generic spectrum, chosen at random."""
    rng = _rng(rng)
    omega = rng.uniform(0.5, 2.0)
    kind = rng.integers(3)
    if kind == 0:
        levels = np.arange(d, dtype=float)
    elif kind == 1:
        levels = np.sort(rng.choice(2 * d + 1, size=d, replace=False)).astype(float)
        levels -= levels[0]
    else:
        levels = np.concatenate([[0.0], np.cumsum(rng.uniform(0.3, 1.5, d - 1))])
    return HamiltonianSpec(tuple(levels * omega))


def random_state(rng, d: int) -> DensityMatrix:
    """Ginibre-distributed state of random rank."""
    rng = _rng(rng)
    rank = int(rng.integers(1, d + 1))
    G = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = G @ G.conj().T
    rho = 0.5 * (rho + rho.conj().T) / np.trace(rho).real
    return DensityMatrix(rho)


def environment_energies(H: HamiltonianSpec, n: int, rng) -> np.ndarray:
    """``n`` environment levels drawn from the system's gaps and their pairwise sums.

    Level 0 is always present so that exchanges with the environment ground
    state are possible.
    """
    rng = _rng(rng)
    e = H.array
    gaps = sorted({round(float(x), 12) for x in (e[:, None] - e[None, :]).ravel() if x > FREQ_TOL})
    sums = [a + b for i, a in enumerate(gaps) for b in gaps[i:]]
    candidates = np.array([0.0] + gaps + sums)
    picks = rng.choice(candidates, size=n - 1, replace=True)
    return np.sort(np.concatenate([[0.0], picks]))


def energy_preserving_unitary(total_energies, rng) -> np.ndarray:
    """Haar-random unitary on each degenerate block of ``total_energies``."""
    rng = _rng(rng)
    e = np.asarray(total_energies, dtype=float)
    order = np.argsort(e, kind="stable")
    U = np.zeros((len(e), len(e)), dtype=complex)
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and e[order[stop]] - e[order[start]] <= FREQ_TOL:
            stop += 1
        idx = order[start:stop]
        k = len(idx)
        if k == 1:
            block = np.exp(2j * np.pi * rng.uniform())[None, None]
        else:
            block = unitary_group.rvs(k, random_state=rng)
        U[np.ix_(idx, idx)] = block
        start = stop
    return U


def _dilated_channel(H: HamiltonianSpec, env_e: np.ndarray, env_w: np.ndarray, rng) -> KrausChannel:
    total = (H.array[:, None] + env_e[None, :]).ravel()
    U = energy_preserving_unitary(total, rng)
    return KrausChannel(dilation_kraus(U, env_w, H.dim), H)


def random_symmetric_channel(H: HamiltonianSpec, seed=0, env_dim: int = 3) -> KrausChannel:
    """Covariant channel from a random energy-preserving dilation with a random incoherent environment."""
    rng = _rng(seed)
    env_e = environment_energies(H, env_dim, rng)
    env_w = rng.dirichlet(np.ones(env_dim))
    return _dilated_channel(H, env_e, env_w, rng)


def random_thermal_channel(H: HamiltonianSpec, beta, bath_dim: int = 3, seed=0) -> KrausChannel:
    """Thermal operation: random energy-preserving unitary with a Gibbs bath at ``beta``."""
    if bath_dim < 2:
        raise DomainError("bath needs at least two levels")
    beta = check_beta(beta)
    rng = _rng(seed)
    env_e = environment_energies(H, bath_dim, rng)
    return _dilated_channel(H, env_e, gibbs_weights(env_e, beta), rng)


@dataclass
class ChannelSample:
    channel: KrausChannel
    class_report: ChannelClassReport
    seed: object


def sample_channel(kind: str, H: HamiltonianSpec, seed, beta=None, env_dim: int = 3) -> ChannelSample:
    if kind == "symmetric":
        ch = random_symmetric_channel(H, seed, env_dim)
        betas = ()
    elif kind == "thermal":
        ch = random_thermal_channel(H, beta, env_dim, seed)
        betas = (beta,)
    else:
        raise DomainError(f"unknown channel class {kind!r}")
    return ChannelSample(ch, classify(ch, betas), seed)


# -- qubit thermal tightness -----------------------------------------------------------


def _qubit_gp_matrix(p: float, q: float, r: float) -> np.ndarray:
    """Solve ``Lambda (p, 1-p) = (q, 1-q)``, ``Lambda (r, 1-r) = (r, 1-r)`` for ``p00, p11``."""
    # Lambda = [[p00, 1 - p11], [1 - p00, p11]]; first rows give two linear equations
    A = np.array([[p, -(1.0 - p)], [r, -(1.0 - r)]])
    b = np.array([q - (1.0 - p), r - (1.0 - r)])
    p00, p11 = np.linalg.solve(A, b)
    return np.array([[p00, 1.0 - p11], [1.0 - p00, p11]])


def _qubit_choi(L: np.ndarray, t: float) -> np.ndarray:
    """Choi matrix (input-major) of the covariant qubit channel with transitions ``L``."""
    J = np.diag([L[0, 0], L[1, 0], L[0, 1], L[1, 1]]).astype(complex)
    J[0, 3] = J[3, 0] = t
    return J


def qubit_thermal_search(p: float, q: float, r: float, tol: float = 1e-14) -> tuple[float, KrausChannel]:
    """Largest coherence multiplier of a covariant Gibbs-preserving qubit channel taking ``p`` to ``q``.

    Maximizes the Choi coherence entry under positivity by bisection and
    rebuilds Kraus operators from the resulting Choi matrix.
    """
    L = _qubit_gp_matrix(p, q, r)
    if L.min() < -1e-12 or L.max() > 1 + 1e-12:
        raise DomainError("no Gibbs-preserving transition matrix realizes p -> q")
    L = np.clip(L, 0.0, 1.0)
    if np.linalg.eigvalsh(_qubit_choi(L, 0.0))[0] < -1e-12:
        raise DomainError("transition matrix is not completely positive")
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if np.linalg.eigvalsh(_qubit_choi(L, mid))[0] >= 0.0:
            lo = mid
        else:
            hi = mid
    w, V = np.linalg.eigh(_qubit_choi(L, lo))
    ops = []
    for lam, v in zip(w, V.T):
        if lam > 1e-15:
            # v is indexed (input i, output a) -> 2 i + a
            ops.append(math.sqrt(lam) * v.reshape(2, 2).T)
    return lo, KrausChannel(ops, HamiltonianSpec((0.0, 1.0)))


# -- saturation ---------------------------------------------------------------------------

_DEFAULTS = {
    "shift_down": {"beta": 0.5, "omega": 1.0, "n_bath": 30, "c": 0.3},
    "shift_up": {"beta": 0.5, "omega": 1.0, "n_bath": 30, "c": 0.3},
    "merge_symmetric": {"a": 0.3, "b": 0.4},
    "qubit_symmetric": {"p": 0.5, "q": 0.75},
    "qubit_thermal": {"p": 0.5, "q": 0.625, "r": 2.0 / 3.0},
}


def _ratio(achieved: float, bound: float) -> float:
    if bound == 0.0:
        return 1.0 if achieved == 0.0 else math.inf
    return achieved / bound


def verify_saturation(bound_id: str, params: dict | None = None, tolerance: float = 1e-12) -> dict:
    """Build the channel designed to attain ``bound_id`` and compare with the bound.

    Returns ``{bound_id, params, seed, achieved, bound, ratio, pass}``; passing
    means ``ratio >= 1 - tolerance``.
    """
    if bound_id not in _DEFAULTS:
        raise DomainError(f"unknown bound id {bound_id!r}; expected one of {BOUND_IDS}")
    prm = {**_DEFAULTS[bound_id], **(params or {})}

    if bound_id in ("shift_down", "shift_up"):
        down = bound_id == "shift_down"
        c = prm["c"]
        H = HamiltonianSpec.equidistant(3, prm["omega"])
        rho = np.diag([0.2, 0.4, 0.4] if down else [0.4, 0.4, 0.2]).astype(complex)
        src, dst = ((2, 1), (1, 0)) if down else ((1, 0), (2, 1))
        rho[src] = c
        rho[src[::-1]] = c
        ch = shift_channel("down" if down else "up", prm["beta"], prm["omega"], prm["n_bath"])
        out = ch(DensityMatrix(rho))
        achieved = abs(out[dst])
        bound = thermal_bound(BoundQuery(rho, H, dst, beta=prm["beta"]))
    elif bound_id == "merge_symmetric":
        a, b = prm["a"], prm["b"]
        X = np.zeros((3, 3), dtype=complex)
        X[1, 0], X[2, 1] = a, b
        X = X + X.conj().T
        out = merge_channel(merge_optimal_x(a, b))(X)
        achieved = abs(out[1, 0])
        bound = merge_bound_symmetric(a, b)
    elif bound_id == "qubit_symmetric":
        p, q = prm["p"], prm["q"]
        c = prm.get("c", 0.5 * math.sqrt(p * (1 - p)))
        out = qubit_extremal_symmetric_channel(p, q)(DensityMatrix.qubit(p, c))
        achieved = abs(out[0, 1])
        bound = qubit_symmetric_bound(p, q, c)
    else:
        p, q, r = prm["p"], prm["q"], prm["r"]
        c = prm.get("c", 0.5 * math.sqrt(p * (1 - p)))
        _, ch = qubit_thermal_search(p, q, r)
        out = ch(DensityMatrix.qubit(p, c))
        achieved = abs(out[0, 1])
        bound = qubit_thermal_bound(p, q, r, c)

    ratio = _ratio(float(achieved), float(bound))
    return {
        "bound_id": bound_id,
        "params": prm,
        "seed": None,
        "achieved": float(achieved),
        "bound": float(bound),
        "ratio": ratio,
        "pass": bool(ratio >= 1.0 - tolerance),
    }


def bath_convergence_study(direction: str, beta, omega: float, n_list) -> list[dict]:
    """Transferred coherence against bath truncation for the shift primitive."""
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise DomainError("bath sizes must be increasing")
    beta = check_beta(beta)
    target = 1.0 if direction == "down" else math.exp(-beta * omega)
    src, dst = ((2, 1), (1, 0)) if direction == "down" else ((1, 0), (2, 1))
    X = np.zeros((3, 3), dtype=complex)
    X[src] = 1.0
    rows = []
    for n in n_list:
        achieved = abs(shift_channel(direction, beta, omega, n)(X)[dst])
        rows.append({"n_bath": n, "achieved": float(achieved), "target": target,
                     "error": abs(target - float(achieved))})
    return rows


# -- counterexample sweeps --------------------------------------------------------------------


@dataclass
class SweepResult:
    name: str
    seed: int
    samples: int
    max_excess: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "seed": self.seed,
            "samples": self.samples,
            "max_excess": self.max_excess,
            "violations": self.violations,
            "pass": self.passed,
        }


def _trace_norm(X: np.ndarray) -> float:
    return float(np.linalg.svd(X, compute_uv=False).sum())


def _entry_bounds(rho, out, H, L: StochasticMatrix, beta, excess: dict):
    d = H.dim
    for n in range(d):
        for m in range(d):
            actual = abs(out[n, m])
            q = BoundQuery(rho, H, (n, m), L, beta)
            sym = symmetric_bound(q)
            excess["cptp_bound"] = max(excess.get("cptp_bound", -np.inf), actual - cptp_bound(q))
            excess["symmetric_bound"] = max(excess.get("symmetric_bound", -np.inf), actual - sym)
            if beta is not None:
                excess["thermal_bound"] = max(excess.get("thermal_bound", -np.inf),
                                              actual - thermal_bound(q))


def _trial(kind: str, seed: int, index: int) -> dict:
    rng = np.random.default_rng([seed, index])
    d = int(rng.integers(2, 5))
    H = random_hamiltonian(rng, d)
    env_dim = int(rng.integers(2, 5))
    if kind == "symmetric":
        beta = None
        ch = random_symmetric_channel(H, rng, env_dim)
    else:
        u = rng.uniform()
        beta = 0.0 if u < 0.05 else math.inf if u < 0.1 else float(rng.uniform(0.05, 3.0))
        ch = random_thermal_channel(H, beta, env_dim, rng)
    rho = random_state(rng, d)
    out = ch(np.asarray(rho))
    excess: dict = {}

    l1_in, l1_out = mode_l1_all(rho, H), mode_l1_all(out, H)
    excess["mode_l1"] = max(l1_out[w] - l1_in[w] for w in l1_in)

    md_in, md_out = mode_decompose(rho, H), mode_decompose(out, H)
    cov = 0.0
    contraction = -np.inf
    for w in H.modes.frequencies:
        image = ch(md_in[w])
        cov = max(cov, float(np.max(np.abs(md_out[w] - image))))
        contraction = max(contraction, _trace_norm(image) - _trace_norm(md_in[w]))
    excess["covariance"] = cov
    excess["trace_norm"] = contraction

    L = induced_stochastic(ch)
    _entry_bounds(rho, out, H, L, beta, excess)
    if beta is not None:
        r = gibbs_weights(H.array, beta)
        excess["gibbs_fixed_point"] = float(np.max(np.abs(L.matrix @ r - r)))
        excess["transition_bound"] = max(
            L.matrix[l, k] - transition_bound(H, beta, k, l) for k in range(d) for l in range(d)
        )
    return excess


def _symmetric_trial(seed, index):
    return _trial("symmetric", seed, index)


def _thermal_trial(seed, index):
    return _trial("thermal", seed, index)


def run_sweep(kind: str, samples: int, seed: int = 0, workers: int | None = None,
              slack: float = SLACK) -> SweepResult:
    """Check every inequality on ``samples`` random (channel, state) pairs of class ``kind``."""
    fn = {"symmetric": _symmetric_trial, "thermal": _thermal_trial}.get(kind)
    if fn is None:
        raise DomainError(f"unknown sweep class {kind!r}")
    workers = sweep_workers() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, repeat(seed), range(samples),
                                    chunksize=max(1, samples // (8 * workers))))
    else:
        results = [fn(seed, i) for i in range(samples)]

    res = SweepResult(kind, seed, samples)
    for i, excess in enumerate(results):
        for check, value in excess.items():
            res.max_excess[check] = max(res.max_excess.get(check, -np.inf), float(value))
            if value > slack:
                res.violations.append({"check": check, "seed": seed, "index": i,
                                       "excess": float(value)})
    return res
