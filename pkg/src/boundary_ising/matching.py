"""Multiset comparison of complex spectra."""
from __future__ import annotations

import numpy as np


def greedy_pairing(a, b) -> np.ndarray:
    """Pair each element of ``a`` with its nearest unused element of ``b``.

    Elements of ``a`` are visited in lexicographic (re, im) order.  Returns the
    array of pairing distances, one per element of ``a``.
    """
    a = np.sort_complex(np.asarray(a, dtype=complex).ravel())
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise ValueError(f"multisets differ in size: {a.size} vs {b.size}")
    free = np.ones(b.size, dtype=bool)
    dist = np.empty(a.size)
    idx = np.arange(b.size)
    for i, x in enumerate(a):
        cand = idx[free]
        d = np.abs(b[cand] - x)
        k = int(np.argmin(d))
        dist[i] = d[k]
        free[cand[k]] = False
    return dist


def pairing_error(a, b) -> float:
    """Largest distance in the greedy nearest-match pairing of two multisets."""
    d = greedy_pairing(a, b)
    return float(d.max()) if d.size else 0.0


def hausdorff(a, b) -> float:
    """Symmetric Hausdorff distance between two finite point sets in the plane."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def closure_residual(values, transform) -> float:
    """How far a multiset is from being closed under ``transform``.

    E.g. ``transform=np.conj`` measures conjugation symmetry.  The value is the
    greedy pairing error between ``values`` and ``transform(values)``.
    """
    values = np.asarray(values, dtype=complex)
    return pairing_error(values, transform(values))
