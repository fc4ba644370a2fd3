"""Full Liouvillian spectrum from the two rapidity spectra.

Even-channel eigenvalues are 2i * sum(v_j E_j,e) over occupation vectors v
with an even number of ones; odd-channel eigenvalues are
2i * sum(v_j E_j,o) - 2 gammaL over vectors with an odd number of ones.
Together they give exactly 4^N eigenvalues.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tmatrix
from .model import ModelParams, ParameterError, Parity

N_MAX_ENUM = 10


@dataclass
class LiouvillianSpectrum:
    eigenvalues: np.ndarray
    channel: np.ndarray  # +1 even origin, -1 odd origin
    params: ModelParams | None = None

    def __len__(self):
        return self.eigenvalues.size

    @property
    def even(self) -> np.ndarray:
        return self.eigenvalues[self.channel == 1]

    @property
    def odd(self) -> np.ndarray:
        return self.eigenvalues[self.channel == -1]


@dataclass
class SegmentDecomposition:
    n_segments: int
    intervals: list
    threshold: float
    diagnostics: dict = field(default_factory=dict)


def _gray_subset_sums(E: np.ndarray):
    """Sums of all subsets of E in Gray-code order, with subset-size parity.

    Each step flips one occupation, so every sum is an O(1) update of the previous one.
    """
    n = E.size
    count = 1 << n
    sums = np.empty(count, dtype=complex)
    parity = np.empty(count, dtype=np.int8)
    acc = 0j
    occ = np.zeros(n, dtype=bool)
    size = 0
    sums[0], parity[0] = acc, 0
    for k in range(1, count):
        bit = (k & -k).bit_length() - 1  # index of the flipped mode
        if occ[bit]:
            acc -= E[bit]
            size -= 1
        else:
            acc += E[bit]
            size += 1
        occ[bit] = not occ[bit]
        sums[k] = acc
        parity[k] = size & 1
    return sums, parity


def _subset_sums_exact(E: np.ndarray):
    """Same multiset as :func:`_gray_subset_sums` but each sum formed directly
    from the bit pattern (no accumulated rounding)."""
    n = E.size
    idx = np.arange(1 << n)
    bits = ((idx[:, None] >> np.arange(n)) & 1).astype(float)
    return bits @ E, (bits.sum(axis=1).astype(int) & 1)


def assemble(even, odd, gamma: float, n_max: int = N_MAX_ENUM,
             params: ModelParams | None = None, method: str = "gray") -> LiouvillianSpectrum:
    """Combine the even and odd rapidities (arrays or RapiditySpectrum objects).

    ``gamma`` is the left dissipation strength; the odd sector is shifted by -2 gamma.
    """
    Ee = np.asarray(getattr(even, "energies", even), dtype=complex)
    Eo = np.asarray(getattr(odd, "energies", odd), dtype=complex)
    if Ee.size != Eo.size or Ee.size % 2:
        raise ValueError("both channels need the same even number (2N) of rapidities")
    N = Ee.size // 2
    if N > n_max:
        raise ParameterError(f"4^{N} eigenvalues exceed the enumeration limit N_max_enum={n_max}")
    subset = _gray_subset_sums if method == "gray" else _subset_sums_exact
    se, pe = subset(Ee)
    so, po = subset(Eo)
    lam_e = 2j * se[pe == 0]
    lam_o = 2j * so[po == 1] - 2 * gamma
    lam = np.concatenate([lam_e, lam_o])
    ch = np.concatenate([np.ones(lam_e.size, dtype=np.int8), -np.ones(lam_o.size, dtype=np.int8)])
    return LiouvillianSpectrum(eigenvalues=lam, channel=ch, params=params)


def from_params(params: ModelParams, route: str = "matrix", n_max: int = N_MAX_ENUM) -> LiouvillianSpectrum:
    """Assemble the Liouvillian spectrum for ``params``.

    ``route="matrix"`` takes the rapidities as eigenvalues of T^P (works for
    per-site fields and unequal dissipation); ``route="rapidity"`` solves the
    boundary equations.
    """
    if route == "rapidity":
        from . import rapidity
        Ee = rapidity.solve_even_channel(params).energies
        Eo = rapidity.solve_odd_channel(params).energies
    elif route == "matrix":
        Ee = tmatrix.eigenvalues(tmatrix.build_t(params, Parity.EVEN))
        Eo = tmatrix.eigenvalues(tmatrix.build_t(params, Parity.ODD))
    else:
        raise ValueError(f"unknown route {route!r}")
    return assemble(Ee, Eo, params.gammaL, n_max=n_max, params=params)


def natural_break_threshold(values, min_ratio: float = 10.0, floor_fraction: float = 1e-3) -> float | None:
    """Gap size separating 'large' from 'small' gaps between sorted values.

    Consecutive gaps are sorted in decreasing order (gaps below 1e-9 of the
    span count as degeneracies and are dropped).  The largest ratio between
    neighbours in that list, looking only at gaps of at least
    ``floor_fraction`` of the span, marks the break; it counts only if the
    ratio is at least ``min_ratio``.  Returns ``None`` when there is no break.
    """
    r = np.sort(np.asarray(values, dtype=float))
    span = r[-1] - r[0] if r.size else 0.0
    if span <= 0:
        return None
    gaps = np.diff(r)
    gaps = np.sort(gaps[gaps > 1e-9 * span])[::-1]
    if gaps.size < 2:
        return None
    ratios = gaps[:-1] / gaps[1:]
    ratios[gaps[:-1] < floor_fraction * span] = 0.0
    k = int(np.argmax(ratios))
    if ratios[k] < min_ratio:
        return None
    return float(np.sqrt(gaps[k] * gaps[k + 1]))


def count_segments(spec, gap_threshold: float | str | None = None) -> SegmentDecomposition:
    """Split Re(lambda) into clusters separated by gaps larger than the threshold.

    ``gap_threshold`` may be a number, ``"median"`` (5x the median consecutive
    gap, floored at 1e-6) or ``None`` for the natural-break rule of
    :func:`natural_break_threshold`.
    """
    values = np.asarray(getattr(spec, "eigenvalues", spec)).real
    r = np.sort(values)
    gaps = np.diff(r)
    if gap_threshold is None:
        thr = natural_break_threshold(r)
        rule = "natural_break"
        if thr is None:
            thr = float(gaps.max()) if gaps.size else 0.0
    elif gap_threshold == "median":
        thr = max(5 * float(np.median(gaps)) if gaps.size else 0.0, 1e-6)
        rule = "median"
    else:
        thr = float(gap_threshold)
        rule = "fixed"
    cuts = np.flatnonzero(gaps > thr)
    starts = np.concatenate([[0], cuts + 1])
    ends = np.concatenate([cuts, [r.size - 1]])
    intervals = [(float(r[a]), float(r[b])) for a, b in zip(starts, ends)]
    return SegmentDecomposition(
        n_segments=len(intervals), intervals=intervals, threshold=thr,
        diagnostics={"rule": rule, "largest_gap": float(gaps.max()) if gaps.size else 0.0},
    )
