"""Acceptance suite.  Each test records one PASS/FAIL line, printed at session end."""
import csv
import math
import time

import numpy as np
import pytest

from modeflow.bounds import qubit_thermal_bound
from modeflow.channels import compose, shift_channel
from modeflow.oracle import random_hamiltonian, random_state, run_sweep, verify_saturation
from modeflow.qstate import beta_from_occupation, mode_decompose, time_translate
from modeflow.regions import region
from modeflow.thermo import EnergyDistribution, guaranteed_lambda, qubit_reachable, thermomajorizes

pytestmark = pytest.mark.acceptance

SWEEP_SAMPLES = 10_000
SWEEP_SEED = 2024
R_THERMAL = 2 / 3
# (p, c) of the two initial states: one on each side of the thermal point r = 2/3
STATES = {"A": (0.5, 0.45), "B": (0.85, 0.3)}


@pytest.fixture(scope="module")
def thermal_sweep():
    t0 = time.perf_counter()
    res = run_sweep("thermal", SWEEP_SAMPLES, SWEEP_SEED)
    return res, time.perf_counter() - t0


# -- 1 ------------------------------------------------------------------------------


def test_mode_algebra(criterion):
    rng = np.random.default_rng(1)
    recon = cov = 0.0
    t0 = time.perf_counter()
    for _ in range(1000):
        d = int(rng.integers(2, 7))
        H, rho = random_hamiltonian(rng, d), random_state(rng, d)
        md = mode_decompose(rho, H)
        recon = max(recon, float(np.abs(md.reconstruct() - rho.data).max()))
        t = rng.uniform(-10, 10)
        moved = mode_decompose(time_translate(rho, H, t), H)
        for w in md:
            cov = max(cov, float(np.abs(moved[w] - np.exp(-1j * w * t) * md[w]).max()))
    elapsed = time.perf_counter() - t0
    ok = recon <= 1e-14 and cov <= 1e-12 and elapsed < 5.0
    criterion("1", ok, f"mode algebra: reconstruction {recon:.2e}, covariance {cov:.2e}, {elapsed:.2f} s")
    assert recon <= 1e-14
    assert cov <= 1e-12
    assert elapsed < 5.0


# -- 2 ------------------------------------------------------------------------------


def test_symmetric_monotone(criterion):
    t0 = time.perf_counter()
    res = run_sweep("symmetric", SWEEP_SAMPLES, SWEEP_SEED)
    elapsed = time.perf_counter() - t0
    worst = res.max_excess["mode_l1"]
    ok = worst <= 1e-9 and elapsed < 60.0
    criterion("2", ok, f"{SWEEP_SAMPLES} symmetric channels: max mode_l1 increase {worst:.2e}, {elapsed:.1f} s")
    assert worst <= 1e-9
    assert elapsed < 60.0


# -- 3, 4 -----------------------------------------------------------------------------


def test_thermal_bound_dominance(criterion, thermal_sweep):
    res, elapsed = thermal_sweep
    checks = ("cptp_bound", "symmetric_bound", "thermal_bound")
    worst = {k: res.max_excess[k] for k in checks}
    bad = [v for v in res.violations if v["check"] in checks]
    criterion("3", not bad, f"{SWEEP_SAMPLES} thermal channels: {len(bad)} bound violations, "
              + ", ".join(f"{k} max excess {v:.2e}" for k, v in worst.items()) + f", {elapsed:.1f} s")
    assert not bad


def test_transition_bound(criterion, thermal_sweep):
    res, _ = thermal_sweep
    worst = res.max_excess["transition_bound"]
    criterion("4", worst <= 1e-9, f"transition probabilities: max excess over exp(beta gap) {worst:.2e}")
    assert worst <= 1e-9


# -- 5 --------------------------------------------------------------------------------


def test_saturation_suite(criterion):
    failures = []
    down = verify_saturation("shift_down", {"n_bath": 30, "beta": 0.5, "omega": 1.0}, 1e-6)
    if not down["ratio"] >= 1 - 1e-6:
        failures.append(f"shift_down ratio {down['ratio']}")

    c = 0.3
    up = verify_saturation("shift_up", {"n_bath": 30, "beta": 0.5, "omega": 1.0, "c": c}, 1e-6)
    target = c * math.exp(-0.5)
    up_rel = abs(up["achieved"] - target) / target
    if up_rel > 1e-6:
        failures.append(f"shift_up relative error {up_rel}")

    merge_err = 0.0
    for a in np.linspace(0.0, 0.45, 10):
        for b in np.linspace(0.0, 0.45, 10):
            rep = verify_saturation("merge_symmetric", {"a": float(a), "b": float(b)})
            merge_err = max(merge_err, abs(rep["achieved"] - math.hypot(a, b)))
    if merge_err > 1e-12:
        failures.append(f"merge error {merge_err}")

    sym_err = 0.0
    grid = np.linspace(0.025, 0.975, 20)
    for p in grid:
        for q in grid:
            c = 0.5 * math.sqrt(p * (1 - p))
            rep = verify_saturation("qubit_symmetric", {"p": float(p), "q": float(q), "c": c})
            alpha = min(q / p, (1 - q) / (1 - p))
            sym_err = max(sym_err, abs(rep["achieved"] - c * math.sqrt(alpha)))
    if sym_err > 1e-12:
        failures.append(f"qubit symmetric error {sym_err}")

    criterion("5", not failures,
              f"saturation: shift_down ratio 1-{1 - down['ratio']:.1e}, shift_up rel err {up_rel:.1e}, "
              f"merge err {merge_err:.1e}, qubit symmetric err {sym_err:.1e}")
    assert not failures, failures


# -- 6 --------------------------------------------------------------------------------


def test_lorenz_matches_interval(criterion):
    grid = np.linspace(0.01, 0.99, 50)
    rs = (0.5, 0.6, R_THERMAL, 0.8, 0.95)
    disagreements = []
    for r in rs:
        beta = beta_from_occupation(r)
        for p in grid:
            if p == r:
                continue
            pd = EnergyDistribution.qubit(float(p))
            for q in grid:
                lorenz = thermomajorizes(pd, EnergyDistribution.qubit(float(q)), beta)
                if lorenz != qubit_reachable(float(p), float(q), r, tol=1e-12):
                    disagreements.append((p, q, r))
    criterion("6", not disagreements,
              f"Lorenz test vs closed-form interval on 50x50x{len(rs)} grid: {len(disagreements)} disagreements")
    assert not disagreements


# -- 7 --------------------------------------------------------------------------------


def _read_region(path):
    with open(path) as fh:
        rows = list(csv.DictReader(ln for ln in fh if not ln.startswith("#")))
    q = np.array([float(r["q"]) for r in rows])
    d = np.array([float(r["d_plus_x"]) for r in rows]) / 2.0
    return dict(zip(np.round(q, 12), d))


def _regions(tmp_path, p, c, r, kinds=("symmetric", "thermal", "guaranteed")):
    out = {}
    for kind in kinds:
        path = tmp_path / f"{kind}_{p}_{r:.6f}.csv"
        region(kind, p, c, r).write_csv(path)
        out[kind] = _read_region(path)
    return out


def _low_temperature_gap(tmp_path, p, c):
    reg = _regions(tmp_path, p, c, 0.99, ("symmetric", "thermal"))
    gaps = [reg["symmetric"][q] - d for q, d in reg["thermal"].items() if q > p]
    return max(gaps), max(q for q in reg["thermal"])


@pytest.mark.parametrize("name", sorted(STATES))
def test_region_nesting(criterion, tmp_path, name):
    p, c = STATES[name]
    reg = _regions(tmp_path, p, c, R_THERMAL)
    worst = -np.inf
    for q, th in reg["thermal"].items():
        worst = max(worst, reg["guaranteed"][q] - th, th - reg["symmetric"][q])
    criterion(f"7.{name}.nesting", worst <= 1e-12,
              f"state {name} (p={p}, c={c}), r=2/3: guaranteed <= thermal <= symmetric, worst excess {worst:.1e}")
    assert worst <= 1e-12


@pytest.mark.parametrize("name", sorted(STATES))
def test_low_temperature_convergence(criterion, tmp_path, name):
    p, c = STATES[name]
    gap, qmax = _low_temperature_gap(tmp_path, p, c)
    criterion(f"7.{name}.lowT", gap < 0.02,
              f"state {name} (p={p}, c={c}), r=0.99: max symmetric-thermal gap over q>p {gap:.4f} "
              f"(threshold 0.02, largest reachable grid q {qmax:.5f})")
    assert gap < 0.02


@pytest.mark.parametrize("name", sorted(STATES))
def test_temperature_monotonicity(criterion, tmp_path, name):
    p, c = STATES[name]
    rs = (0.55, R_THERMAL, 0.8, 0.95)
    curves = [_regions(tmp_path, p, c, r, ("thermal",))["thermal"] for r in rs]
    bad, compared = [], 0
    for (r1, lo), (r2, hi) in zip(zip(rs, curves), zip(rs[1:], curves[1:])):
        for q in sorted(set(lo) & set(hi)):
            compared += 1
            # colder bath: cooling keeps more coherence, heating keeps less
            if q > p and hi[q] < lo[q] - 1e-12:
                bad.append((r1, r2, q))
            if q < p and hi[q] > lo[q] + 1e-12:
                bad.append((r1, r2, q))
    criterion(f"7.{name}.monotone", not bad and compared > 0,
              f"state {name}: thermal boundary monotone in r over {compared} shared grid points, "
              f"{len(bad)} violations")
    assert compared > 0
    assert not bad


# -- 8 --------------------------------------------------------------------------------


def test_guaranteed_not_tight(criterion):
    best = (-1.0, None)
    for r in (0.55, R_THERMAL, 0.8, 0.9):
        for p in np.linspace(0.05, 0.95, 19):
            if abs(p - r) < 1e-9:
                continue
            c = math.sqrt(p * (1 - p))
            for q in np.linspace(0.01, 0.99, 99):
                if not qubit_reachable(p, q, r):
                    continue
                gap = qubit_thermal_bound(p, q, r, c) - guaranteed_lambda(p, q, r) * c
                if gap > best[0]:
                    best = (gap, tuple(round(float(v), 4) for v in (p, q, r, c)))
    example = qubit_thermal_bound(0.5, 0.625, R_THERMAL, 0.5) - guaranteed_lambda(0.5, 0.625, R_THERMAL) * 0.5
    ok = best[0] > 0.05 and example > 0.05
    criterion("8", ok, f"thermal bound minus lambda* c: {example:.4f} at (p,q,r,c)=(0.5,0.625,2/3,0.5); "
              f"grid maximum {best[0]:.4f} at {best[1]}")
    assert ok


# -- 9 --------------------------------------------------------------------------------


def test_shift_cycle(criterion):
    beta, omega, n = 0.5, 1.0, 40
    cycle = compose(shift_channel("up", beta, omega, n), shift_channel("down", beta, omega, n))
    X = np.zeros((3, 3), dtype=complex)
    X[2, 1] = 1.0
    multiplier = abs(cycle(X)[2, 1])
    err = abs(multiplier - math.exp(-beta * omega))
    criterion("9", err <= 1e-4, f"down then up shift at N=40, beta*omega=0.5: multiplier {multiplier:.10f}, "
              f"|error| vs exp(-0.5) {err:.1e}")
    assert err <= 1e-4
