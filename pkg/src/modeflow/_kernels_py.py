"""Numpy implementations of the hot kernels.

Used whenever the compiled ``_ckernels`` extension is missing or disabled with
``MODEFLOW_PURE_PYTHON=1``. Signatures and results must match ``_ckernels.pyx``.
"""
import numpy as np


def mode_l1_all(rho, labels, nmodes):
    """Sum of moduli of ``rho`` entries per mode label."""
    return np.bincount(
        labels.ravel(), weights=np.abs(rho).ravel(), minlength=nmodes
    ).astype(float)


def coherence_bound(absrho, wn, wm, labels, target, restrict):
    """Sum of ``absrho[c, d] * sqrt(wn[c] * wm[d])``.

    With ``restrict`` only cells whose mode label equals ``target`` count.
    """
    terms = absrho * np.sqrt(np.outer(wn, wm))
    if restrict:
        terms = np.where(labels == target, terms, 0.0)
    return float(terms.sum())


def thermal_bound_sum(absrho, energies, labels, n, m, beta):
    target = labels[n, m]
    gaps = energies[n] - energies  # indexed by c
    with np.errstate(invalid="ignore", over="ignore"):
        damp = np.where(gaps <= 0.0, 1.0, np.exp(-beta * np.where(gaps > 0, gaps, 1.0)))
    terms = np.where(labels == target, absrho * damp[:, None], 0.0)
    return float(terms.sum())


def _evaluate(x, y, t):
    k = np.searchsorted(x, t, side="right") - 1
    k = np.clip(k, 0, len(x) - 1)
    last = k >= len(x) - 1
    kk = np.where(last, len(x) - 2, k)
    x0, x1 = x[kk], x[kk + 1]
    y0, y1 = y[kk], y[kk + 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        val = y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    return np.where(last, y[-1], val)


def lorenz_evaluate(x, y, t):
    """Evaluate a piecewise-linear curve, taking the upper value at vertical jumps."""
    return _evaluate(np.asarray(x), np.asarray(y), np.asarray(t, dtype=float))


def lorenz_dominates(x1, y1, x2, y2, slack):
    """True if curve 1 lies on or above curve 2 (minus ``slack``) at every breakpoint."""
    pts = np.concatenate([x1, x2])
    return bool(np.all(_evaluate(x1, y1, pts) >= _evaluate(x2, y2, pts) - slack))
