"""Columnar time-series container shared by the exact and reduced models,
plus small measurement helpers (windowed readout, oscillation frequency)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COLUMNS = ("t", "p_rr", "p_ba", "p_ab", "phi_rr", "trace", "sink_pop", "purity")


@dataclass
class PairTrajectory:
    """Two-atom observables on a time grid (times in g_r^-1 units).

    p_mu_nu are populations of |mu_i, nu_j> traced over the cavity; phi_rr is
    the accumulated phase of |r_i, r_j> relative to the decoupled reference
    branch, with the single-atom Stark background removed (radians).
    """

    t: np.ndarray
    p_rr: np.ndarray
    p_ba: np.ndarray
    p_ab: np.ndarray
    phi_rr: np.ndarray
    trace: np.ndarray
    sink_pop: np.ndarray
    purity: np.ndarray
    t_seconds: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.t)
        for name in COLUMNS:
            if len(getattr(self, name)) != n:
                raise ValueError(f"column {name!r} length != time grid length")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("time grid must be strictly increasing")

    def column_names(self) -> list[str]:
        names = list(COLUMNS)
        if self.t_seconds is not None:
            names.insert(1, "t_seconds")
        return names

    def rows(self):
        cols = [getattr(self, "t")]
        if self.t_seconds is not None:
            cols.append(self.t_seconds)
        cols += [getattr(self, name) for name in COLUMNS[1:]]
        for i in range(len(self.t)):
            yield [c[i] for c in cols]


def value_at(t: np.ndarray, y: np.ndarray, t_ref: float) -> float:
    """Linear interpolation of a sampled column at t_ref."""
    return float(np.interp(t_ref, t, y))


def windowed_mean(t: np.ndarray, y: np.ndarray, t_ref: float, width: float) -> float:
    """Mean of y over the trailing window [t_ref - width, t_ref].

    Used to read populations at a target time: the exact-model populations
    carry a fast, small-amplitude oscillation from virtual photon dressing
    (period ~ pi/Delta_b) on top of the slow dynamics; the window average is
    the resolvable value.  Falls back to interpolation for an empty window.
    """
    mask = (t >= t_ref - width) & (t <= t_ref)
    if not np.any(mask):
        return value_at(t, y, t_ref)
    return float(y[mask].mean())


def first_minimum(t: np.ndarray, y: np.ndarray, threshold: float = 0.5) -> float:
    """Location of the first slow-scale minimum of an oscillating column.

    Brackets the dip by the first excursion of y below `threshold` and the
    following recovery above it, then fits a parabola over the central half
    of the bracket.  Small fast wiggles (dressing noise) neither trigger
    spurious brackets nor bias the fit, which averages over them.
    """
    below = np.flatnonzero(y < threshold)
    if below.size == 0:
        raise ValueError("column never drops below the bracketing threshold")
    i0 = below[0]
    after = np.flatnonzero(y[i0:] >= threshold)
    i1 = i0 + (after[0] if after.size else len(y) - 1 - i0)
    if i1 <= i0 + 2:
        raise ValueError("bracket around the minimum is too narrow; sample more densely")
    lo = i0 + (i1 - i0) // 4
    hi = i1 - (i1 - i0) // 4 + 1
    tt, yy = t[lo:hi], y[lo:hi]
    a, b, _ = np.polyfit(tt - tt.mean(), yy, 2)
    if a <= 0:
        return float(t[(lo + hi) // 2])
    return float(tt.mean() - b / (2 * a))


def max_abs_difference(a: np.ndarray, b: np.ndarray, mask: np.ndarray | None = None) -> float:
    d = np.abs(np.asarray(a) - np.asarray(b))
    if mask is not None:
        d = d[mask]
    return float(d.max())


def moving_average(t: np.ndarray, y: np.ndarray, width: float) -> np.ndarray:
    """Centered boxcar average over a time window `width` (uniform grid).

    Windows shrink symmetrically near the edges.  Used to remove the fast
    virtual-photon dressing oscillation before comparing the exact model
    against the reduced models on the resolvable (slow) scale.
    """
    y = np.asarray(y, dtype=float)
    if len(t) < 2 or width <= 0:
        return y.copy()
    dt = t[1] - t[0]
    half = max(int(round(0.5 * width / dt)), 0)
    if half == 0:
        return y.copy()
    csum = np.concatenate([[0.0], np.cumsum(y)])
    n = len(y)
    out = np.empty(n)
    for i in range(n):
        k = min(half, i, n - 1 - i)
        out[i] = (csum[i + k + 1] - csum[i - k]) / (2 * k + 1)
    return out
