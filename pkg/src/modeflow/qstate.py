"""States in the energy eigenbasis and their decomposition into coherence modes.

Conventions: hbar = k_B = 1, energies are dimensionless, and ``beta`` is a plain
float in ``[0, inf]``.  Density matrices are indexed ``rho[n, m] = <n|rho|m>``
with ``n`` labelling the n-th energy level in ascending order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np

from . import _kernels
from .errors import DomainError, FormatError

FREQ_TOL = 1e-9
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-12


def check_beta(beta) -> float:
    """Validate an inverse temperature; ``math.inf`` is the zero-temperature limit."""
    beta = float(beta)
    if math.isnan(beta) or beta < 0:
        raise DomainError(f"inverse temperature must be >= 0, got {beta}")
    return beta


@dataclass(frozen=True)
class ModeStructure:
    """Frequency bookkeeping for a fixed spectrum.

    ``labels[n, m]`` indexes ``frequencies`` with the class of ``E_n - E_m``.
    """

    frequencies: np.ndarray
    labels: np.ndarray

    def index(self, omega: float) -> int | None:
        k = int(np.searchsorted(self.frequencies, omega))
        for j in (k - 1, k):
            if 0 <= j < len(self.frequencies) and abs(self.frequencies[j] - omega) <= FREQ_TOL:
                return j
        return None


def _group_frequencies(energies: np.ndarray) -> ModeStructure:
    diffs = energies[:, None] - energies[None, :]
    pos = np.sort(diffs[diffs > FREQ_TOL])
    groups: list[list[float]] = []
    for w in pos:
        if groups and w - groups[-1][0] <= FREQ_TOL:
            groups[-1].append(w)
        else:
            groups.append([w])
    reps = np.array([math.fsum(g) / len(g) for g in groups])
    frequencies = np.concatenate([-reps[::-1], [0.0], reps])
    zero = len(reps)

    labels = np.full(diffs.shape, zero, dtype=np.intp)
    for k, w in enumerate(reps):
        hit = np.abs(diffs - w) <= FREQ_TOL
        labels[hit] = zero + 1 + k
        labels[hit.T] = zero - 1 - k
    return ModeStructure(frequencies, labels)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Non-degenerate spectrum ``H = sum_n energies[n] |n><n|``."""

    energies: tuple

    def __post_init__(self):
        e = tuple(float(x) for x in np.ravel(self.energies))
        if len(e) < 2:
            raise DomainError("a Hamiltonian needs at least two levels")
        if not all(math.isfinite(x) for x in e):
            raise DomainError("energies must be finite")
        if any(b - a <= FREQ_TOL for a, b in zip(e, e[1:])):
            raise DomainError("energies must be strictly increasing (non-degenerate)")
        object.__setattr__(self, "energies", e)

    @classmethod
    def equidistant(cls, d: int, omega: float = 1.0) -> "HamiltonianSpec":
        return cls(tuple(n * omega for n in range(d)))

    @property
    def dim(self) -> int:
        return len(self.energies)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.energies)
        a.setflags(write=False)
        return a

    @cached_property
    def modes(self) -> ModeStructure:
        return _group_frequencies(self.array)


class DensityMatrix:
    """Immutable validated density matrix.

    Behaves as an array through ``__array__`` so numpy functions accept it
    directly.
    """

    __slots__ = ("_data",)

    def __init__(self, data, validate: bool = True):
        a = np.array(data, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"density matrix must be square, got shape {a.shape}")
        if validate:
            herm = float(np.max(np.abs(a - a.conj().T)))
            if herm > HERMITIAN_TOL:
                raise DomainError(f"matrix is not Hermitian (max deviation {herm:.3g})")
            tr = np.trace(a).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise DomainError(f"trace must be 1, got {tr!r}")
            lam = float(np.linalg.eigvalsh(a)[0])
            if lam < -PSD_TOL:
                raise DomainError(f"matrix is not positive semidefinite (min eigenvalue {lam:.3g})")
        a.setflags(write=False)
        self._data = a

    @classmethod
    def qubit(cls, p: float, c: complex = 0.0) -> "DensityMatrix":
        """Qubit with ground population ``p`` and coherence ``rho_01 = c``."""
        c = complex(c)
        return cls([[p, c], [c.conjugate(), 1.0 - p]])

    @classmethod
    def diagonal(cls, probs) -> "DensityMatrix":
        return cls(np.diag(np.asarray(probs, dtype=float)))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return self._data.diagonal().real.copy()

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data
        return self._data.astype(dtype)

    def __getitem__(self, idx):
        return self._data[idx]

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(np.all(self._data == other._data))

    __hash__ = None

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self._data, precision=4)})"


def _as_matrix(x) -> np.ndarray:
    return np.asarray(x, dtype=complex)


def _like(template, out: np.ndarray):
    """Wrap ``out`` as a DensityMatrix when the input was one."""
    return DensityMatrix(out) if isinstance(template, DensityMatrix) else out


def _check_dim(rho: np.ndarray, H: HamiltonianSpec):
    if rho.shape != (H.dim, H.dim):
        raise DomainError(f"operator shape {rho.shape} does not match Hamiltonian dimension {H.dim}")


def gibbs_weights(energies, beta) -> np.ndarray:
    """Normalized Boltzmann weights; at ``beta = inf`` the ground level(s) share all weight."""
    e = np.asarray(energies, dtype=float)
    beta = check_beta(beta)
    shifted = e - e.min()
    if math.isinf(beta):
        w = (shifted <= FREQ_TOL).astype(float)
    else:
        w = np.exp(-beta * shifted)
    return w / w.sum()


def gibbs_state(H: HamiltonianSpec, beta) -> DensityMatrix:
    return DensityMatrix(np.diag(gibbs_weights(H.array, beta)))


def ground_occupation(beta, gap: float = 1.0) -> float:
    """Thermal ground-state population ``r`` of a qubit with level spacing ``gap``."""
    beta = check_beta(beta)
    if math.isinf(beta):
        return 1.0
    return 1.0 / (1.0 + math.exp(-beta * gap))


def beta_from_occupation(r: float, gap: float = 1.0) -> float:
    """Inverse of :func:`ground_occupation`; requires ``1/2 <= r <= 1``."""
    if not 0.5 <= r <= 1.0:
        raise DomainError(f"ground occupation must lie in [1/2, 1] for beta >= 0, got {r}")
    if r == 1.0:
        return math.inf
    return math.log(r / (1.0 - r)) / gap


@dataclass(frozen=True)
class ModeDecomposition:
    """Coherence modes ``rho^(omega)`` keyed by frequency.

    Only modes with at least one non-zero entry are stored; indexing any other
    frequency returns a zero matrix.
    """

    hamiltonian: HamiltonianSpec
    modes: Mapping[float, np.ndarray]

    def __getitem__(self, omega: float) -> np.ndarray:
        for w, block in self.modes.items():
            if abs(w - omega) <= FREQ_TOL:
                return block
        d = self.hamiltonian.dim
        return np.zeros((d, d), dtype=complex)

    def __iter__(self) -> Iterator[float]:
        return iter(self.modes)

    def __len__(self):
        return len(self.modes)

    def items(self):
        return self.modes.items()

    @property
    def frequencies(self) -> list[float]:
        return list(self.modes)

    def reconstruct(self) -> np.ndarray:
        d = self.hamiltonian.dim
        total = np.zeros((d, d), dtype=complex)
        for block in self.modes.values():
            total += block
        return total

    def support(self, omega: float) -> list[tuple[int, int]]:
        """Index pairs ``(n, m)`` belonging to mode ``omega`` in the spectrum."""
        ms = self.hamiltonian.modes
        k = ms.index(omega)
        if k is None:
            return []
        return [tuple(map(int, nm)) for nm in np.argwhere(ms.labels == k)]


def mode_decompose(rho, H: HamiltonianSpec) -> ModeDecomposition:
    a = _as_matrix(rho)
    _check_dim(a, H)
    ms = H.modes
    modes = {}
    for k, w in enumerate(ms.frequencies):
        mask = ms.labels == k
        if np.any(a[mask] != 0):
            block = np.where(mask, a, 0)
            block.setflags(write=False)
            modes[float(w)] = block
    return ModeDecomposition(H, modes)


def mode_l1(md: ModeDecomposition, omega: float) -> float:
    """Sum of moduli of the entries in mode ``omega`` (0 for absent modes)."""
    return float(np.abs(md[omega]).sum())


def mode_l1_all(rho, H: HamiltonianSpec) -> dict[float, float]:
    """``mode_l1`` for every frequency of the spectrum, in one pass."""
    a = np.ascontiguousarray(_as_matrix(rho))
    _check_dim(a, H)
    ms = H.modes
    vals = _kernels.mode_l1_all(a, ms.labels, len(ms.frequencies))
    return {float(w): float(v) for w, v in zip(ms.frequencies, vals)}


def time_translate(rho, H: HamiltonianSpec, t: float):
    a = _as_matrix(rho)
    _check_dim(a, H)
    phase = np.exp(-1j * H.array * t)
    return _like(rho, a * np.outer(phase, phase.conj()))


def dephase(rho, H: HamiltonianSpec):
    """Projection onto the zero mode (the diagonal in the energy basis)."""
    a = _as_matrix(rho)
    _check_dim(a, H)
    return _like(rho, np.diag(np.diag(a)))


# -- JSON -------------------------------------------------------------------


def _square(rows, name: str) -> np.ndarray:
    try:
        a = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{name} is not a numeric matrix") from exc
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise FormatError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


def state_to_dict(rho, H: HamiltonianSpec) -> dict:
    a = _as_matrix(rho)
    return {
        "energies": list(H.energies),
        "rho_re": a.real.tolist(),
        "rho_im": a.imag.tolist(),
    }


def state_from_dict(obj: dict) -> tuple[DensityMatrix, HamiltonianSpec]:
    try:
        energies = obj["energies"]
        re = _square(obj["rho_re"], "rho_re")
    except (KeyError, TypeError) as exc:
        raise FormatError(f"state JSON missing field: {exc}") from exc
    im = _square(obj["rho_im"], "rho_im") if "rho_im" in obj else np.zeros_like(re)
    if im.shape != re.shape:
        raise FormatError("rho_re and rho_im shapes differ")
    if len(energies) != re.shape[0]:
        raise FormatError(
            f"{len(energies)} energies but a {re.shape[0]}x{re.shape[0]} matrix"
        )
    H = HamiltonianSpec(tuple(energies))
    return DensityMatrix(re + 1j * im), H


def load_state(path) -> tuple[DensityMatrix, HamiltonianSpec]:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return state_from_dict(obj)


def dump_state(rho, H: HamiltonianSpec, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(rho, H), indent=2) + "\n")
