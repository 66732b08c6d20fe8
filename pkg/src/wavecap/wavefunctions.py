"""Vector spherical wavefunctions, their norms and the Green-function SVD.

Component form in the local basis (r-hat, theta-hat, phi-hat), with
``x = k r``, ``z_n`` either ``h_n^(1)`` (radiating, ``U``) or ``j_n``
(regular, ``V``) and the surface gradient ``grad_s Y = Y_theta theta-hat +
(i m Y / sin theta) phi-hat``:

    l = 1:  curl(r z_n Y)          = z_n (grad_s Y x r-hat)
                                   = z_n (0, i m Y / sin theta, -dY/dtheta)
    l = 2:  (1/k) curl curl(r z_n Y) = n(n+1) z_n / x * Y r-hat
                                     + (x z_n)' / x * grad_s Y

The pair satisfies ``curl U_l1 = k U_l2`` and ``curl U_l2 = k U_l1``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .geometry import ball_quadrature, sphere_quadrature

RADIATING = "U"
REGULAR = "V"


# --- mode bookkeeping -------------------------------------------------------


def mode_index(n, m, l):
    """Flattened mode number p = 2(n(n+1) + m - 1) + l (starting at 1)."""
    if n < 1 or abs(m) > n or l not in (1, 2):
        raise ValueError(f"invalid mode (n={n}, m={m}, l={l})")
    return 2 * (n * (n + 1) + m - 1) + l


def mode_unindex(p):
    """Inverse of :func:`mode_index`."""
    if int(p) != p or p < 1:
        raise ValueError(f"mode number must be a positive integer, got {p!r}")
    p = int(p)
    l = 2 - p % 2
    s = (p - l) // 2 + 1  # n(n+1) + m
    n = math.isqrt(s)  # n^2 <= s <= n^2 + 2n
    m = s - n * (n + 1)
    return n, m, l


def n_modes(n_max):
    """Number of modes with degree <= n_max (complete shells)."""
    return 2 * n_max * (n_max + 2)


def mode_list(n_max):
    """(n, m, l) triples ordered by p for all degrees <= n_max."""
    return [mode_unindex(p) for p in range(1, n_modes(n_max) + 1)]


# --- radial parts ------------------------------------------------------------


def radial_parts(kind, n_max, x):
    """Radial factors for orders 0..n_max at scalar ``x = k r > 0``.

    Returns ``(z, z_over_x, riccati)`` where ``riccati = (x z_n)'/x``.
    """
    if not x > 0:
        raise ValueError("wavefunctions need r > 0")
    j = specfun.spherical_jn_array(n_max, x)
    if kind == RADIATING:
        z = j + 1j * specfun.spherical_yn_array(n_max, x)
    elif kind == REGULAR:
        z = j.astype(complex)
    else:
        raise ValueError(f"unknown wavefunction kind {kind!r}")
    return z, z / x, specfun.riccati_ratio(z, x)


def _radial_columns(kind, n_max, k, r):
    """Radial factors evaluated per point, each of shape (n_max+1, npts)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0):
        raise ValueError("wavefunctions need r > 0")
    uniq, inv = np.unique(r, return_inverse=True)
    tabs = [radial_parts(kind, n_max, k * ri) for ri in uniq]
    z = np.array([t[0] for t in tabs]).T[:, inv]
    zx = np.array([t[1] for t in tabs]).T[:, inv]
    rc = np.array([t[2] for t in tabs]).T[:, inv]
    return z, zx, rc


def field_table(kind, n_max, k, r, theta, phi):
    """All unnormalized wavefunctions with n <= n_max at the given points.

    ``r`` may be a scalar or an array matching ``theta``. Returns a complex
    array of shape (M, npts, 3), rows ordered by p.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    r = np.broadcast_to(np.asarray(r, dtype=float), theta.shape)
    z, zx, rc = _radial_columns(kind, n_max, k, r)
    Y, Gt, Gp = specfun.harmonic_table(n_max, theta, phi)
    out = np.zeros((n_modes(n_max), theta.size, 3), dtype=complex)
    for p, (n, m, l) in enumerate(mode_list(n_max)):
        c = m + n_max
        if l == 1:
            out[p, :, 1] = z[n] * Gp[n, c]
            out[p, :, 2] = -z[n] * Gt[n, c]
        else:
            out[p, :, 0] = n * (n + 1) * zx[n] * Y[n, c]
            out[p, :, 1] = rc[n] * Gt[n, c]
            out[p, :, 2] = rc[n] * Gp[n, c]
    return out


def _single(kind, p, k, r, theta, phi):
    n, m, l = mode_unindex(p)
    arr = field_table(kind, n, k, r, theta, phi)[p - 1]
    if np.ndim(theta) == 0:
        return arr[0]
    return arr.reshape(np.shape(theta) + (3,))


def eval_U(p, k, r, theta, phi):
    """Radiating wavefunction ``U_p`` at (r, theta, phi), shape (..., 3)."""
    return _single(RADIATING, p, k, r, theta, phi)


def eval_V(p, k, r, theta, phi):
    """Regular wavefunction ``V_p`` at (r, theta, phi), shape (..., 3)."""
    return _single(REGULAR, p, k, r, theta, phi)


# --- norms and singular values -------------------------------------------------


def norm_U_surface(p, k, R_S, rule=None):
    """C_p = sqrt(int_S |U_p|^2 dOmega) at radius R_S, by quadrature."""
    n = mode_unindex(p)[0]
    rule = rule or sphere_quadrature(n + 1)
    U = eval_U(p, k, R_S, rule.theta, rule.phi)
    return math.sqrt(rule.integrate(np.sum(np.abs(U) ** 2, axis=-1)))


def norm_U_closed(n, l, k, R_S):
    """Closed-form surface norm, used as a cross-check of the quadrature."""
    z, zx, rc = radial_parts(RADIATING, n, k * R_S)
    nn = n * (n + 1)
    if l == 1:
        return math.sqrt(nn) * abs(z[n])
    return math.sqrt(nn * (nn * abs(zx[n]) ** 2 + abs(rc[n]) ** 2))


def default_radial_order(n, k, R_V):
    return int(math.ceil(k * R_V + n)) + 24


def norm_V_volume(p, k, R_V, radial_order=None):
    """D_p = sqrt(int_V |V_p|^2 dr), by ball quadrature."""
    n = mode_unindex(p)[0]
    order = radial_order or default_radial_order(n, k, R_V)
    rule = ball_quadrature(n + 1, order, R_V)
    V = eval_V(p, k, rule.r, rule.theta, rule.phi)
    return math.sqrt(rule.integrate(np.sum(np.abs(V) ** 2, axis=-1)))


def singular_value(p, k, R_S, R_V, C=None, D=None):
    """Green-function singular value sigma_p = C_p D_p / (n(n+1)).

    Follows from the outgoing dyadic Green function expansion
    ``G = ik sum_p U_p V_p^dagger / (n(n+1))`` (r outside the source ball)
    rewritten in the normalized modes.
    """
    if not R_S > R_V:
        raise ValueError("need R_S > R_V")
    n = mode_unindex(p)[0]
    C = norm_U_surface(p, k, R_S) if C is None else C
    D = norm_V_volume(p, k, R_V) if D is None else D
    return C * D / (n * (n + 1))


@dataclass(frozen=True)
class ModeNorms:
    C: float
    D: float
    sigma: float


def mode_norms(p, k, R_S, R_V):
    C = norm_U_surface(p, k, R_S)
    D = norm_V_volume(p, k, R_V)
    return ModeNorms(C, D, singular_value(p, k, R_S, R_V, C, D))


def eval_u(p, k, R_S, theta, phi, C=None):
    """Surface-normalized ``u_p = U_p / C_p`` on the sphere of radius R_S."""
    C = norm_U_surface(p, k, R_S) if C is None else C
    return eval_U(p, k, R_S, theta, phi) / C


def eval_v(p, k, R_V, r, theta, phi, D=None):
    """Volume-normalized ``v_p = V_p / D_p`` inside the ball of radius R_V."""
    D = norm_V_volume(p, k, R_V) if D is None else D
    return eval_V(p, k, r, theta, phi) / D
