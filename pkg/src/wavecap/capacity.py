"""Capacity of the assembled channel: water-filling, closed form and limit."""

import math
from dataclasses import dataclass

import numpy as np

from .channel import assemble
from .wavefunctions import n_modes

LOG2E = math.log2(math.e)
EIG_CUTOFF = 1e-14


@dataclass(frozen=True)
class WaterfillResult:
    allocation: np.ndarray
    water_level: float
    rate: float  # sum log2(1 + g_i P_i / N_W), bits per channel use


def waterfill(gains, P, N_W):
    """Optimal power split over parallel Gaussian channels with gains ``gains``.

    Maximizes ``sum log2(1 + g_i P_i / N_W)`` subject to ``sum P_i = P``.
    """
    gains = np.asarray(gains, dtype=float)
    if gains.size == 0:
        return WaterfillResult(np.zeros(0), 0.0, 0.0)
    if np.any(gains <= 0) or not (P > 0 and N_W > 0):
        raise ValueError("gains, power and noise must be positive")
    floors = N_W / gains
    order = np.argsort(floors, kind="stable")
    f = floors[order]
    csum = np.cumsum(f)
    k = np.arange(1, len(f) + 1)
    levels = (P + csum) / k
    # largest active set whose weakest member stays under the water level
    active = np.nonzero(levels > f)[0][-1] + 1
    mu = levels[active - 1]
    # mu - f_i written as (P + sum_j (f_j - f_i)) / k to avoid cancellation
    fa = f[:active]
    alloc = np.zeros_like(floors)
    alloc[order[:active]] = np.maximum((P + np.sum(fa[None, :] - fa[:, None], axis=1)) / active, 0.0)
    rate = float(np.sum(np.log2(1.0 + gains * alloc / N_W)))
    return WaterfillResult(alloc, float(mu), rate)


def closed_form_rate(M, alpha, P, N_W, W):
    """M W log2(1 + alpha P / (M N_W)) [bits/s]; zero for M = 0."""
    if M == 0:
        return 0.0
    return M * W * math.log2(1.0 + alpha * P / (M * N_W))


def capacity_limit(alpha, P, N0):
    """Large-array capacity (alpha P / N0) log2(e) [bits/s]."""
    if not (alpha > 0 and P > 0 and N0 > 0):
        raise ValueError("alpha, P and N0 must be positive")
    return alpha * P / N0 * LOG2E


@dataclass(frozen=True)
class CapacityResult:
    rate_bits_per_s: float
    allocation: np.ndarray
    water_level: float
    closed_form_rate: float
    limit_rate: float
    eigenvalues: np.ndarray


def capacity_NM(channel, P, N0, W, alpha):
    """Water-filled capacity of ``channel`` plus the closed form for comparison."""
    N_W = N0 * W
    H = channel.H_eff
    M = H.shape[1]
    lim = capacity_limit(alpha, P, N0)
    if M == 0:
        return CapacityResult(0.0, np.zeros(0), 0.0, 0.0, lim, np.zeros(0))
    lam = np.linalg.eigvalsh(H.conj().T @ H)
    lam = np.clip(lam, 0.0, None)
    usable = lam > EIG_CUTOFF * lam.max()
    wf = waterfill(lam[usable], P, N_W)
    alloc = np.zeros(M)
    alloc[usable] = wf.allocation
    return CapacityResult(
        rate_bits_per_s=W * wf.rate,
        allocation=alloc,
        water_level=wf.water_level,
        closed_form_rate=closed_form_rate(M, alpha, P, N_W, W),
        limit_rate=lim,
        eigenvalues=lam,
    )


def logdet_identity_gap(A, B):
    """Relative gap between log|I_N + AB| and log|I_M + BA|."""
    N, M = A.shape
    s1, l1 = np.linalg.slogdet(np.eye(N) + A @ B)
    s2, l2 = np.linalg.slogdet(np.eye(M) + B @ A)
    big = np.log(s1) + l1
    small = np.log(s2) + l2
    return float(abs(big - small) / max(abs(small), 1e-300))


def shell_degree(M):
    """n_max with 2 n_max (n_max + 2) = M; rejects partial shells."""
    n = 0
    while n_modes(n) < M:
        n += 1
    if n_modes(n) != M:
        raise ValueError(f"M={M} does not close a full (n, m, l) shell")
    return n


def convergence_study(config, M_list, N_list):
    """Rates on the (M, N) grid, in the order given (M outer, N inner).

    Each row carries the finite water-filled rate, the closed form at the
    configured density and the limit.
    """
    if not M_list or not N_list:
        raise ValueError("M_list and N_list must be non-empty")
    rows = []
    for M in M_list:
        n_max = shell_degree(M)
        for N in N_list:
            cfg = config.with_dipoles(N).replace(n_max=n_max)
            res = capacity_NM(
                assemble(cfg), cfg.power_w, cfg.n0_w_per_hz, cfg.bandwidth_hz, cfg.density
            )
            rows.append(
                {
                    "M": M,
                    "N": cfg.n_dipoles,
                    "rate_finite": res.rate_bits_per_s,
                    "rate_closed_form": res.closed_form_rate,
                    "rate_limit": res.limit_rate,
                    "ratio_to_limit": res.rate_bits_per_s / res.limit_rate,
                }
            )
    return rows
