"""Threshold-based degrees of freedom: modes with enough radiation resistance."""

import math
from dataclasses import dataclass, field

import numpy as np

from .power import ETA, radiation_resistance
from .wavefunctions import mode_index


def shell_resistances(n, kR_V, eta=ETA):
    """(R_rad for l=1, R_rad for l=2) of degree n; both independent of m."""
    # R_rad depends on k R_V only, so evaluate at R_V = 1
    return (
        radiation_resistance(mode_index(n, 0, 1), kR_V, 1.0, eta),
        radiation_resistance(mode_index(n, 0, 2), kR_V, 1.0, eta),
    )


def dof_count(kR_V, threshold_ohm, n_cap=1, eta=ETA):
    """Number of (n, m, l) modes with R_rad >= threshold_ohm.

    Shells are scanned upward past max(n_cap, kR_V) until two consecutive
    shells contribute nothing.
    """
    if not threshold_ohm > 0:
        raise ValueError("threshold must be positive: every mode clears a zero threshold")
    if math.isinf(threshold_ohm):
        return 0
    count, empty, n = 0, 0, 0
    floor = max(n_cap, math.ceil(kR_V))
    while True:
        n += 1
        got = sum(2 * n + 1 for r in shell_resistances(n, kR_V, eta) if r >= threshold_ohm)
        count += got
        empty = empty + 1 if got == 0 else 0
        if n >= floor and empty >= 2:
            return count


@dataclass
class DofCurve:
    r_v_over_lambda: list
    thresholds: list
    counts: np.ndarray  # shape (len(thresholds), len(r_v_over_lambda))
    slopes: dict = field(default_factory=dict)
    r_squared: dict = field(default_factory=dict)

    def rows(self):
        for i, t in enumerate(self.thresholds):
            for j, r in enumerate(self.r_v_over_lambda):
                yield r, t, int(self.counts[i, j])

    def violations(self):
        """Monotonicity breaches: list of human-readable messages."""
        out = []
        order_r = np.argsort(self.r_v_over_lambda)
        order_t = np.argsort(self.thresholds)
        c = self.counts[order_t][:, order_r]
        if np.any(np.diff(c, axis=1) < 0):
            out.append("count decreases with R_V at fixed threshold")
        if np.any(np.diff(c, axis=0) > 0):
            out.append("count increases with threshold at fixed R_V")
        return out


def dof_sweep(r_v_over_lambda, thresholds, eta=ETA):
    """DoF counts on a (threshold, R_V / lambda) grid with linear fits vs area."""
    r_v_over_lambda = [float(r) for r in r_v_over_lambda]
    thresholds = [float(t) for t in thresholds]
    if not r_v_over_lambda or not thresholds:
        raise ValueError("need at least one radius and one threshold")
    if min(r_v_over_lambda) <= 0:
        raise ValueError("radii must be positive")
    counts = np.array(
        [[dof_count(2 * math.pi * r, t, eta=eta) for r in r_v_over_lambda] for t in thresholds]
    )
    curve = DofCurve(r_v_over_lambda, thresholds, counts)
    area = np.array(r_v_over_lambda) ** 2
    if len(area) >= 2:
        for i, t in enumerate(thresholds):
            slope, icpt = np.polyfit(area, counts[i], 1)
            resid = counts[i] - (slope * area + icpt)
            tot = np.sum((counts[i] - counts[i].mean()) ** 2)
            curve.slopes[t] = float(slope)
            curve.r_squared[t] = float(1.0 - np.sum(resid**2) / tot) if tot > 0 else 1.0
    return curve
