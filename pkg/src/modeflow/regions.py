"""Qubit achievable-state boundaries in the X-Z plane of the Bloch sphere.

Convention: the ground state sits at ``z = +1``; a state with ground population
``p`` and real coherence ``c`` maps to ``(x, z) = (2c, 2p - 1)``.  Boundaries are
mirror-symmetric in ``x`` so only the ``+d`` branch is stored.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import qubit_symmetric_bound, qubit_thermal_bound
from .errors import DomainError
from .qstate import beta_from_occupation, ground_occupation  # noqa: F401  (re-exported helpers)
from .thermo import extremal_incoherent_qubit, guaranteed_lambda, qubit_reachable

KINDS = ("symmetric", "thermal", "triangle", "guaranteed")
DEFAULT_GRID = 201
Q_MIN, Q_MAX = 0.005, 0.995
CSV_COLUMNS = ["kind", "p", "c", "r", "q", "d_plus_x", "z"]
CSV_NOTE = "# bloch convention: ground |0> at z=+1; d_plus_x = 2d, z = 2q-1"


@dataclass(frozen=True)
class BlochPoint:
    x: float
    z: float

    def __post_init__(self):
        if self.x * self.x + self.z * self.z > 1.0 + 1e-12:
            raise DomainError(f"({self.x}, {self.z}) lies outside the Bloch ball")

    @classmethod
    def from_state(cls, q: float, d: float) -> "BlochPoint":
        return cls(2.0 * d, 2.0 * q - 1.0)


@dataclass(frozen=True)
class RegionBoundary:
    kind: str
    p: float
    c: float
    r: float | None
    q: np.ndarray
    d: np.ndarray
    grid: int
    points: tuple = field(init=False)

    def __post_init__(self):
        pts = tuple(BlochPoint.from_state(qq, dd) for qq, dd in zip(self.q, self.d))
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.q)

    def rows(self):
        r = "" if self.r is None else format(self.r, ".17g")
        for qq, dd, pt in zip(self.q, self.d, self.points):
            yield [self.kind, format(self.p, ".17g"), format(self.c, ".17g"), r,
                   format(qq, ".17g"), format(pt.x, ".17g"), format(pt.z, ".17g")]

    def write_csv(self, target) -> None:
        if hasattr(target, "write"):
            self._write(target)
        else:
            with open(Path(target), "w", newline="") as fh:
                self._write(fh)

    def _write(self, fh):
        fh.write(CSV_NOTE + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(self.rows())


def q_grid(grid: int = DEFAULT_GRID) -> np.ndarray:
    if grid < 2:
        raise DomainError("grid needs at least two points")
    return np.linspace(Q_MIN, Q_MAX, grid)


def _check_state(p: float, c: float):
    if not 0.0 < p < 1.0:
        raise DomainError(f"ground population must lie in (0, 1), got {p}")
    if c * c > p * (1.0 - p) + 1e-12:
        raise DomainError(f"coherence {c} too large for a state with p = {p}")


def _check_r(p: float, r: float, allow_equal: bool = False):
    if not 0.0 < r < 1.0:
        raise DomainError(f"thermal occupation r must lie in (0, 1), got {r}")
    if not allow_equal and p == r:
        raise DomainError("p = r: the thermal boundary is undefined for a Gibbs diagonal")


def symmetric_region(p: float, c: float, grid: int = DEFAULT_GRID) -> RegionBoundary:
    _check_state(p, c)
    qs = q_grid(grid)
    ds = np.array([qubit_symmetric_bound(p, q, c) for q in qs])
    return RegionBoundary("symmetric", p, abs(c), None, qs, ds, grid)


def thermal_region(p: float, c: float, r: float, grid: int = DEFAULT_GRID) -> RegionBoundary:
    """Thermal boundary on the shared q-grid; infeasible q are omitted."""
    _check_state(p, c)
    _check_r(p, r)
    qs = np.array([q for q in q_grid(grid) if qubit_reachable(p, q, r)])
    ds = np.array([qubit_thermal_bound(p, q, r, c) for q in qs])
    return RegionBoundary("thermal", p, abs(c), r, qs, ds, grid)


def guaranteed_region(p: float, c: float, r: float, grid: int = DEFAULT_GRID) -> RegionBoundary:
    _check_state(p, c)
    _check_r(p, r)
    qs = np.array([q for q in q_grid(grid) if qubit_reachable(p, q, r)])
    ds = np.array([guaranteed_lambda(p, q, r) * abs(c) for q in qs])
    return RegionBoundary("guaranteed", p, abs(c), r, qs, ds, grid)


def triangle_region(p: float, c: float, r: float) -> RegionBoundary:
    """Vertices: the state, its dephasing, and the extremal incoherent state."""
    _check_state(p, c)
    _check_r(p, r, allow_equal=True)
    qt = extremal_incoherent_qubit(p, r)
    qs = np.array([p, p, qt])
    ds = np.array([abs(c), 0.0, 0.0])
    return RegionBoundary("triangle", p, abs(c), r, qs, ds, 3)


def region(kind: str, p: float, c: float, r: float | None = None,
           grid: int = DEFAULT_GRID) -> RegionBoundary:
    if kind == "symmetric":
        return symmetric_region(p, c, grid)
    if r is None:
        raise DomainError(f"{kind} region needs the thermal occupation r")
    if kind == "thermal":
        return thermal_region(p, c, r, grid)
    if kind == "guaranteed":
        return guaranteed_region(p, c, r, grid)
    if kind == "triangle":
        return triangle_region(p, c, r)
    raise DomainError(f"unknown region kind {kind!r}; expected one of {KINDS}")


def point_in_thermal_region(q: float, d: float, p: float, c: float, r: float,
                            tol: float = 1e-12) -> bool:
    """Whether the state ``(q, d)`` lies inside the thermal set from ``(p, c)``."""
    if not qubit_reachable(p, q, r):
        return False
    if p == r:
        return math.isclose(q, p) and abs(d) <= abs(c) + tol
    return abs(d) <= qubit_thermal_bound(p, q, r, c) + tol
