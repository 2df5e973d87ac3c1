"""Kraus channels, channel-class checks and the explicit saturating constructions."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError, FormatError
from .qstate import (
    FREQ_TOL,
    DensityMatrix,
    HamiltonianSpec,
    check_beta,
    gibbs_state,
    gibbs_weights,
)

COMPLETENESS_TOL = 1e-10
SYMMETRY_TOL = 1e-10
GIBBS_TOL = 1e-10
STOCHASTIC_ENTRY_TOL = 1e-12
STOCHASTIC_SUM_TOL = 1e-10


class KrausChannel:
    """CPTP map ``X -> sum_k K_k X K_k^dagger`` between two energy bases.

    Parameters
    ----------
    kraus_ops : sequence of (d_out, d_in) arrays
    h_in : HamiltonianSpec of the input space
    h_out : HamiltonianSpec of the output space, defaults to ``h_in``
    validate : if True, reject operator lists violating completeness
    """

    def __init__(self, kraus_ops, h_in: HamiltonianSpec, h_out: HamiltonianSpec | None = None,
                 validate: bool = True):
        ops = np.array([np.asarray(k, dtype=complex) for k in kraus_ops])
        if ops.ndim != 3 or len(ops) == 0:
            raise DomainError("need a non-empty list of equally shaped Kraus matrices")
        h_out = h_in if h_out is None else h_out
        if ops.shape[1:] != (h_out.dim, h_in.dim):
            raise DomainError(
                f"Kraus shape {ops.shape[1:]} does not match (d_out, d_in) = ({h_out.dim}, {h_in.dim})"
            )
        ops.setflags(write=False)
        self.kraus = ops
        self.h_in = h_in
        self.h_out = h_out
        if validate and self.completeness_error > COMPLETENESS_TOL:
            raise DomainError(
                f"Kraus operators are not trace preserving (||sum K^dag K - I|| = {self.completeness_error:.3g})"
            )

    @property
    def kraus_ops(self) -> list[np.ndarray]:
        return list(self.kraus)

    @cached_property
    def completeness_error(self) -> float:
        gram = np.einsum("kai,kaj->ij", self.kraus.conj(), self.kraus)
        return float(np.linalg.norm(gram - np.eye(self.h_in.dim)))

    def __call__(self, x) -> np.ndarray:
        """Apply to an arbitrary operator (not necessarily a state)."""
        x = np.asarray(x, dtype=complex)
        return np.einsum("kij,jl,kml->im", self.kraus, x, self.kraus.conj(), optimize=True)

    def __len__(self):
        return len(self.kraus)

    def __repr__(self):
        return f"KrausChannel({len(self)} ops, {self.h_in.dim}->{self.h_out.dim})"


def _trimmed(ops: Sequence[np.ndarray], tol: float = 0.0) -> list[np.ndarray]:
    kept = [k for k in ops if np.max(np.abs(k)) > tol]
    return kept or [ops[0]]


def apply(ch: KrausChannel, rho):
    """Apply ``ch`` to a state; returns a DensityMatrix for DensityMatrix input."""
    x = np.asarray(rho, dtype=complex)
    if x.shape != (ch.h_in.dim, ch.h_in.dim):
        raise DomainError(f"state dimension {x.shape} does not match channel input {ch.h_in.dim}")
    if ch.completeness_error > COMPLETENESS_TOL:
        raise DomainError("channel violates Kraus completeness")
    out = ch(x)
    return DensityMatrix(out) if isinstance(rho, DensityMatrix) else out


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Channel ``second . first`` (``first`` acts first)."""
    if first.h_out != second.h_in:
        raise DomainError("output Hamiltonian of the first channel must match the second's input")
    ops = [b @ a for b in second.kraus for a in first.kraus]
    return KrausChannel(_trimmed(ops), first.h_in, second.h_out)


def convex_combine(ch1: KrausChannel, ch2: KrausChannel, p: float) -> KrausChannel:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"mixing weight must lie in [0, 1], got {p}")
    if ch1.h_in != ch2.h_in or ch1.h_out != ch2.h_out:
        raise DomainError("channels act between different spaces")
    ops = [math.sqrt(p) * k for k in ch1.kraus] + [math.sqrt(1.0 - p) * k for k in ch2.kraus]
    return KrausChannel(_trimmed(ops), ch1.h_in, ch1.h_out)


# -- induced stochastic matrix -----------------------------------------------


@dataclass(frozen=True)
class StochasticMatrix:
    """Column-stochastic transition matrix, ``matrix[l, k] = p(l | k)``."""

    matrix: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrix, dtype=float)
        if a.ndim != 2:
            raise DomainError("stochastic matrix must be 2-D")
        if a.min() < -STOCHASTIC_ENTRY_TOL or a.max() > 1 + STOCHASTIC_ENTRY_TOL:
            raise DomainError("stochastic matrix entries must lie in [0, 1]")
        if np.max(np.abs(a.sum(axis=0) - 1.0)) > STOCHASTIC_SUM_TOL:
            raise DomainError("stochastic matrix columns must sum to 1")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __getitem__(self, idx):
        return self.matrix[idx]


def induced_stochastic(ch: KrausChannel) -> StochasticMatrix:
    """``p(n|c) = sum_k |<n|K_k|c>|^2``."""
    return StochasticMatrix(np.sum(np.abs(ch.kraus) ** 2, axis=0))


# -- class checks --------------------------------------------------------------


def check_cptp(ch: KrausChannel) -> tuple[bool, float]:
    err = ch.completeness_error
    return err <= COMPLETENESS_TOL, err


def check_symmetric(ch: KrausChannel) -> tuple[bool, float]:
    """Mode-support test of time-translation covariance.

    Every basis operator ``|c><d|`` must be mapped into the span of output
    entries with the same frequency ``E_c - E_d``.  Returns the flag and the
    largest leaked entry modulus.
    """
    K = ch.kraus
    images = np.einsum("kac,kbd->abcd", K, K.conj())
    e_in, e_out = ch.h_in.array, ch.h_out.array
    f_out = e_out[:, None] - e_out[None, :]
    f_in = e_in[:, None] - e_in[None, :]
    leak = np.abs(f_out[:, :, None, None] - f_in[None, None, :, :]) > FREQ_TOL
    violation = float(np.max(np.abs(images[leak]), initial=0.0))
    return violation <= SYMMETRY_TOL, violation


def check_gibbs_preserving(ch: KrausChannel, beta) -> tuple[bool, float]:
    beta = check_beta(beta)
    if ch.h_in != ch.h_out:
        raise DomainError("Gibbs preservation needs identical input and output Hamiltonians")
    gamma = np.asarray(gibbs_state(ch.h_in, beta))
    violation = float(np.max(np.abs(ch(gamma) - gamma)))
    return violation <= GIBBS_TOL, violation


@dataclass
class ChannelClassReport:
    is_cptp: bool
    cptp_violation: float
    is_symmetric: bool
    symmetric_violation: float
    gibbs: dict = field(default_factory=dict)  # beta -> (flag, violation)

    def is_gibbs_preserving(self, beta) -> bool:
        return self.gibbs[float(beta)][0]

    def to_dict(self) -> dict:
        return {
            "is_cptp": self.is_cptp,
            "cptp_violation": self.cptp_violation,
            "is_symmetric": self.is_symmetric,
            "symmetric_violation": self.symmetric_violation,
            "gibbs_preserving": [
                {"beta": b if math.isfinite(b) else "inf", "flag": f, "violation": v}
                for b, (f, v) in self.gibbs.items()
            ],
        }


def classify(ch: KrausChannel, betas=()) -> ChannelClassReport:
    cptp, cv = check_cptp(ch)
    sym, sv = check_symmetric(ch)
    gibbs = {}
    if ch.h_in == ch.h_out:
        for b in betas:
            gibbs[check_beta(b)] = check_gibbs_preserving(ch, b)
    return ChannelClassReport(cptp, cv, sym, sv, gibbs)


# -- simple channels -------------------------------------------------------------


def identity_channel(H: HamiltonianSpec) -> KrausChannel:
    return KrausChannel([np.eye(H.dim)], H)


def dephasing_channel(H: HamiltonianSpec) -> KrausChannel:
    """Full dephasing in the energy basis, Kraus operators ``|n><n|``."""
    ops = []
    for n in range(H.dim):
        P = np.zeros((H.dim, H.dim))
        P[n, n] = 1.0
        ops.append(P)
    return KrausChannel(ops, H)


def unitary_channel(U, H: HamiltonianSpec) -> KrausChannel:
    return KrausChannel([np.asarray(U)], H)


# -- shift primitive with a truncated oscillator bath ----------------------------


def shift_unitary(n_bath: int) -> np.ndarray:
    """Energy-conserving permutation on qutrit (x) oscillator truncated to ``n_bath`` levels.

    Joint index is ``s * n_bath + e``.  Within each complete total-energy block
    ``{|0;i>, |1;i-1>, |2;i-2>}`` the map cycles ``|2;i-2> -> |1;i-1> -> |0;i> -> |2;i-2>``;
    ``|1;0>`` and ``|0;1>`` are swapped, ``|0;0>`` is fixed.  Blocks cut by the
    truncation are left untouched (identity).
    """
    if n_bath < 3:
        raise DomainError("bath needs at least 3 levels to hold one complete shift block")
    N = n_bath
    idx = lambda s, e: s * N + e  # noqa: E731
    image = {idx(0, 0): idx(0, 0), idx(1, 0): idx(0, 1), idx(0, 1): idx(1, 0)}
    for i in range(2, N):
        image[idx(2, i - 2)] = idx(1, i - 1)
        image[idx(1, i - 1)] = idx(0, i)
        image[idx(0, i)] = idx(2, i - 2)
    U = np.eye(3 * N)
    for src, dst in image.items():
        U[:, src] = 0.0
    for src, dst in image.items():
        U[dst, src] = 1.0
    return U


def ladder_weights(beta, omega: float, n_bath: int) -> np.ndarray:
    """Gibbs weights of an oscillator ladder ``n * omega`` truncated to ``n_bath`` levels."""
    return gibbs_weights(np.arange(n_bath) * omega, beta)


def dilation_kraus(U: np.ndarray, env_weights: np.ndarray, d_sys: int) -> list[np.ndarray]:
    """Kraus operators of ``tr_E[U (rho (x) tau) U^dag]`` with diagonal ``tau``.

    ``W_ab = sqrt(tau_a) <b|U|a>``; the joint index is system-major.
    """
    n_env = len(env_weights)
    U4 = U.reshape(d_sys, n_env, d_sys, n_env)
    ops = []
    for a, w in enumerate(env_weights):
        if w <= 0:
            continue
        for b in range(n_env):
            W = math.sqrt(w) * U4[:, b, :, a]
            if np.any(W != 0):
                ops.append(W)
    return ops


def shift_channel(direction: str, beta, omega: float = 1.0, n_bath: int = 30) -> KrausChannel:
    """Thermal operation moving coherence within mode ``omega`` of an equidistant qutrit.

    ``down`` is ``tr_E[U (rho (x) gamma) U^dag]``, ``up`` uses ``U^dag``.  Exact up to
    bath-truncation error of order ``exp(-beta * omega * n_bath)``.
    """
    if direction not in ("up", "down"):
        raise DomainError(f"direction must be 'up' or 'down', got {direction!r}")
    beta = check_beta(beta)
    U = shift_unitary(n_bath)
    if direction == "up":
        U = U.T
    H = HamiltonianSpec.equidistant(3, omega)
    return KrausChannel(dilation_kraus(U, ladder_weights(beta, omega, n_bath), 3), H)


def merge_channel(x: float, omega: float = 1.0) -> KrausChannel:
    """Symmetric qutrit map merging ``rho_10`` and ``rho_21`` into ``rho_10``.

    Output ``|rho'_10| = sqrt(1 - x^2) a + x b`` for real positive inputs
    ``rho_10 = a``, ``rho_21 = b``; ``x = b / sqrt(a^2 + b^2)`` is optimal.
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"merge parameter must lie in [0, 1], got {x}")
    s = math.sqrt(1.0 - x * x)
    ops = []
    for j in range(3):
        ph = np.exp(2j * np.pi * j / 3)
        M = np.zeros((3, 3), dtype=complex)
        M[0, 0], M[0, 1] = ph, x
        M[1, 1], M[1, 2] = ph * s, 1.0
        ops.append(M / math.sqrt(3))
    return KrausChannel(ops, HamiltonianSpec.equidistant(3, omega))


def qubit_extremal_symmetric_channel(p: float, q: float, gap: float = 1.0) -> KrausChannel:
    """Symmetric qubit channel taking ground population ``p`` to ``q`` with maximal coherence.

    Coherence is multiplied by ``sqrt(alpha)``, ``alpha = min(q/p, (1-q)/(1-p))``.
    """
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise DomainError("populations must lie strictly inside (0, 1)")
    alpha = min(q / p, (1.0 - q) / (1.0 - p))
    M1 = np.array([[1.0, 0.0], [0.0, math.sqrt(alpha)]])
    M2 = np.array([[0.0, math.sqrt(1.0 - alpha)], [0.0, 0.0]])
    if q < p:
        X = np.array([[0.0, 1.0], [1.0, 0.0]])
        M1, M2 = X @ M1 @ X, X @ M2 @ X
    return KrausChannel(_trimmed([M1, M2]), HamiltonianSpec((0.0, gap)))


# -- JSON --------------------------------------------------------------------------


def channel_to_dict(ch: KrausChannel) -> dict:
    return {
        "energies_in": list(ch.h_in.energies),
        "energies_out": list(ch.h_out.energies),
        "kraus": [{"re": k.real.tolist(), "im": k.imag.tolist()} for k in ch.kraus],
    }


def channel_from_dict(obj: dict, validate: bool = True) -> KrausChannel:
    try:
        h_in = HamiltonianSpec(tuple(obj["energies_in"]))
        h_out = HamiltonianSpec(tuple(obj.get("energies_out", obj["energies_in"])))
        raw = obj["kraus"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"channel JSON missing field: {exc}") from exc
    ops = []
    for i, k in enumerate(raw):
        try:
            re = np.array(k["re"], dtype=float)
            im = np.array(k["im"], dtype=float) if "im" in k else np.zeros_like(re)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"kraus[{i}] is malformed") from exc
        if re.shape != (h_out.dim, h_in.dim) or im.shape != re.shape:
            raise FormatError(f"kraus[{i}] has shape {re.shape}, expected {(h_out.dim, h_in.dim)}")
        ops.append(re + 1j * im)
    if not ops:
        raise FormatError("channel JSON has no Kraus operators")
    return KrausChannel(ops, h_in, h_out, validate=validate)


def load_channel(path, validate: bool = True) -> KrausChannel:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return channel_from_dict(obj, validate=validate)


def dump_channel(ch: KrausChannel, path) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(ch), indent=2) + "\n")
