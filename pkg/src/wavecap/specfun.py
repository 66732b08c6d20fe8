"""Scalar special functions for spherical-wave expansions.

Spherical Bessel functions of the first and second kind, the outgoing
spherical Hankel function, fully normalized associated Legendre functions and
complex spherical harmonics with their unit-sphere surface gradients.

Conventions
-----------
``Y_nm(theta, phi) = Pbar_nm(cos theta) * exp(i m phi)`` with ``Pbar`` fully
normalized (orthonormal over the sphere) and the Condon-Shortley phase
included, so that ``Y_{n,-m} = (-1)^m conj(Y_nm)``.

All routines are pure functions; nothing is cached.
"""

import math

import numpy as np

__all__ = [
    "spherical_jn_array",
    "spherical_yn_array",
    "sph_bessel_j",
    "sph_bessel_y",
    "sph_hankel1",
    "sph_hankel1_logderiv",
    "riccati_ratio",
    "assoc_legendre_normalized",
    "legendre_table",
    "sph_harmonic",
    "sph_harmonic_gradient",
    "harmonic_table",
]

_RESCALE = 1e200
_CF_TOL = 1e-17
_CF_MAXITER = 100000


def _check_order(n):
    if int(n) != n or n < 0:
        raise ValueError(f"order must be a non-negative integer, got {n!r}")
    return int(n)


def _ratio_cf(n, x):
    """j_n(x) / j_{n-1}(x) from the continued fraction (modified Lentz)."""
    tiny = 1e-300
    f = (2 * n + 1) / x
    if f == 0.0:
        f = tiny
    c, d = f, 0.0
    k = n
    for _ in range(_CF_MAXITER):
        k += 1
        b = (2 * k + 1) / x
        d = b - d
        if d == 0.0:
            d = tiny
        c = b - 1.0 / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return 1.0 / f
    raise RuntimeError(f"continued fraction for j_{n}({x}) did not converge")


def _downward(n_lo, n_max, x):
    """Unnormalized minimal solution of the j-recurrence on n_lo..n_max."""
    f = np.zeros(n_max + 1)
    f[n_max] = 1.0
    if n_max == n_lo:
        return f
    f[n_max - 1] = 1.0 / _ratio_cf(n_max, x)
    for n in range(n_max - 1, n_lo, -1):
        f[n - 1] = (2 * n + 1) / x * f[n] - f[n + 1]
        if abs(f[n - 1]) > _RESCALE:
            f[n - 1 :] /= _RESCALE
    return f


def spherical_jn_array(n_max, x):
    """Return ``[j_0(x), ..., j_{n_max}(x)]`` for a scalar ``x >= 0``.

    Orders up to ``floor(x)`` come from upward recurrence; orders above ``x``
    come from Miller's downward recurrence started with a continued fraction
    and stitched onto the upward values.
    """
    n_max = _check_order(n_max)
    x = float(x)
    if x < 0 or not math.isfinite(x):
        raise ValueError(f"argument must be finite and >= 0, got {x!r}")
    out = np.zeros(n_max + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    s, c = math.sin(x), math.cos(x)
    if x < 1.0:
        # small argument: everything downward, normalized on j_0 ~ 1
        f = _downward(0, n_max, x)
        return f * ((s / x) / f[0])
    n0 = min(n_max, int(x))
    out[0] = s / x
    if n_max >= 1:
        out[1] = s / (x * x) - c / x
    for n in range(1, n0):
        out[n + 1] = (2 * n + 1) / x * out[n] - out[n - 1]
    if n_max > n0:
        lo = n0 - 1
        f = _downward(lo, n_max, x)
        k = n0 if abs(out[n0]) >= abs(out[lo]) else lo
        out[n0 + 1 :] = f[n0 + 1 :] * (out[k] / f[k])
    return out


def spherical_yn_array(n_max, x):
    """Return ``[y_0(x), ..., y_{n_max}(x)]`` by upward recurrence (x > 0)."""
    n_max = _check_order(n_max)
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"y_n needs a finite argument > 0, got {x!r}")
    out = np.empty(n_max + 1)
    s, c = math.sin(x), math.cos(x)
    out[0] = -c / x
    if n_max >= 1:
        out[1] = -c / (x * x) - s / x
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, n_max):
            out[n + 1] = (2 * n + 1) / x * out[n] - out[n - 1]
    return out


def _elementwise(fn, x):
    x = np.asarray(x, dtype=float)
    flat = np.array([fn(v) for v in x.ravel()])
    return flat.reshape(x.shape)[()]


def sph_bessel_j(n, x, derivative=False):
    """Spherical Bessel function ``j_n(x)`` (or its derivative), ``x >= 0``."""
    n = _check_order(n)

    def one(v):
        if v < 0:
            raise ValueError(f"j_n needs x >= 0, got {v!r}")
        if v == 0.0:
            if not derivative:
                return 1.0 if n == 0 else 0.0
            return 1.0 / 3.0 if n == 1 else 0.0
        j = spherical_jn_array(n + 1, v)
        if not derivative:
            return j[n]
        return -j[1] if n == 0 else j[n - 1] - (n + 1) / v * j[n]

    return _elementwise(one, x)


def sph_bessel_y(n, x, derivative=False):
    """Spherical Neumann function ``y_n(x)`` (or its derivative), ``x > 0``."""
    n = _check_order(n)

    def one(v):
        y = spherical_yn_array(n + 1, v)
        if not derivative:
            return y[n]
        with np.errstate(over="ignore", invalid="ignore"):
            return -y[1] if n == 0 else y[n - 1] - (n + 1) / v * y[n]

    return _elementwise(one, x)


def sph_hankel1(n, x, derivative=False):
    """Outgoing spherical Hankel function ``h_n^(1) = j_n + i y_n``."""
    return sph_bessel_j(n, x, derivative) + 1j * sph_bessel_y(n, x, derivative)


def sph_hankel1_logderiv(n, x):
    """``h_n'(x) / h_n(x)`` with the derivative taken in the argument ``x``.

    Multiply by ``k`` to get the radial logarithmic derivative at ``r = x/k``.
    """
    n = _check_order(n)

    def one(v):
        if not v > 0:
            raise ValueError(f"log-derivative needs x > 0, got {v!r}")
        j = spherical_jn_array(n + 1, v)
        y = spherical_yn_array(n + 1, v)
        h = j + 1j * y
        if n == 0:
            dh = -h[1]
        else:
            dh = h[n - 1] - (n + 1) / v * h[n]
        return dh / h[n]

    x = np.asarray(x, dtype=float)
    flat = np.array([one(v) for v in x.ravel()], dtype=complex)
    return flat.reshape(x.shape)[()]


def riccati_ratio(z, x):
    """``(x z_n(x))' / x`` for n = 1..len(z)-1 given ``z = [z_0 .. z_n]``.

    Uses ``(x z_n)'/x = z_{n-1} - n z_n / x``; entry 0 is left as NaN.
    """
    z = np.asarray(z)
    out = np.full(z.shape, np.nan, dtype=z.dtype)
    n = np.arange(1, len(z))
    out[1:] = z[:-1] - n * z[1:] / x
    return out


# --- Legendre functions and harmonics --------------------------------------


def _legendre_column(n_max, m, u, sin_t, over_sin=False):
    """Pbar_{n,m}(u) for n = m..n_max (m >= 0) as array (n_max-m+1, len(u)).

    With ``over_sin`` the column of ``Pbar_nm / sin(theta)`` is returned
    instead (m >= 1); the recurrence is the same, only the seed differs.
    """
    u = np.asarray(u, dtype=float)
    p = np.full(u.shape, 1.0 / math.sqrt(4.0 * math.pi))
    for k in range(1, m + 1):
        factor = -math.sqrt((2 * k + 1) / (2.0 * k))
        if over_sin and k == m:
            p = factor * p
        else:
            p = factor * sin_t * p
    out = np.empty((n_max - m + 1,) + u.shape)
    out[0] = p
    if n_max == m:
        return out
    out[1] = math.sqrt(2 * m + 3) * u * p
    for n in range(m + 2, n_max + 1):
        a = math.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
        b = math.sqrt(((n - 1.0) ** 2 - m * m) / (4.0 * (n - 1.0) ** 2 - 1.0))
        out[n - m] = a * (u * out[n - m - 1] - b * out[n - m - 2])
    return out


def assoc_legendre_normalized(n, m, u):
    """Fully normalized associated Legendre function ``Pbar_nm(u)``.

    Includes the Condon-Shortley phase, and ``Pbar_{n,-m} = (-1)^m Pbar_nm``.
    """
    n = _check_order(n)
    if int(m) != m or abs(m) > n:
        raise ValueError(f"need |m| <= n, got n={n}, m={m}")
    m = int(m)
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > 1.0):
        raise ValueError("argument must lie in [-1, 1]")
    sin_t = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    val = _legendre_column(n, abs(m), u, sin_t)[-1]
    if m < 0 and m % 2:
        val = -val
    return val[()] if val.ndim == 0 else val


def legendre_table(n_max, theta):
    """Tables over 0 <= m <= n <= n_max at polar angles ``theta``.

    Returns ``(P, dP, Q)`` each of shape (n_max+1, n_max+1, ...) holding
    ``Pbar_nm(cos theta)``, ``d Pbar_nm / d theta`` and ``Pbar_nm / sin theta``
    (``Q`` is finite at the poles and zero for m = 0). Entries with m > n are 0.
    """
    theta = np.asarray(theta, dtype=float)
    u = np.cos(theta)
    sin_t = np.sin(theta)
    shape = (n_max + 1, n_max + 1) + theta.shape
    P = np.zeros(shape)
    Q = np.zeros(shape)
    for m in range(n_max + 1):
        P[m:, m] = _legendre_column(n_max, m, u, sin_t)
        if m >= 1:
            Q[m:, m] = _legendre_column(n_max, m, u, sin_t, over_sin=True)
    dP = np.zeros(shape)
    for n in range(n_max + 1):
        for m in range(n + 1):
            up = math.sqrt((n - m) * (n + m + 1)) * P[n, m + 1] if m < n else 0.0
            if m >= 1:
                down = math.sqrt((n + m) * (n - m + 1)) * P[n, m - 1]
            else:
                # Pbar_{n,-1} = -Pbar_{n,1}
                down = -math.sqrt(n * (n + 1)) * P[n, 1] if n >= 1 else 0.0
            dP[n, m] = 0.5 * (up - down)
    return P, dP, Q


def harmonic_table(n_max, theta, phi):
    """Spherical harmonics and surface-gradient components for all n <= n_max.

    Returns ``(Y, G_theta, G_phi)`` with shape (n_max+1, 2*n_max+1, ...),
    indexed ``[n, m + n_max]``. ``G_theta = dY/dtheta`` and
    ``G_phi = i m Y / sin(theta)`` (pole limits included).
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    P, dP, Q = legendre_table(n_max, theta)
    shape = (n_max + 1, 2 * n_max + 1) + np.broadcast(theta, phi).shape
    Y = np.zeros(shape, dtype=complex)
    Gt = np.zeros(shape, dtype=complex)
    Gp = np.zeros(shape, dtype=complex)
    for m in range(0, n_max + 1):
        e_pos = np.exp(1j * m * phi)
        for sign in ((1, -1) if m else (1,)):
            mm = sign * m
            e = e_pos if sign > 0 else np.conj(e_pos)
            par = -1.0 if (sign < 0 and m % 2) else 1.0
            Y[m:, mm + n_max] = par * P[m:, m] * e
            Gt[m:, mm + n_max] = par * dP[m:, m] * e
            Gp[m:, mm + n_max] = par * 1j * mm * Q[m:, m] * e
    return Y, Gt, Gp


def _single(n, m):
    n = _check_order(n)
    if int(m) != m or abs(m) > n:
        raise ValueError(f"need |m| <= n, got n={n}, m={m}")
    return n, int(m)


def sph_harmonic(n, m, theta, phi):
    """Complex spherical harmonic ``Y_nm(theta, phi)``."""
    n, m = _single(n, m)
    theta = np.asarray(theta, dtype=float)
    val = assoc_legendre_normalized(n, m, np.cos(theta)) * np.exp(1j * m * np.asarray(phi))
    return val


def sph_harmonic_gradient(n, m, theta, phi):
    """Surface gradient of ``Y_nm`` on the unit sphere.

    Returns a complex array ``[..., 3]`` of components along
    (r-hat, theta-hat, phi-hat); the radial component is identically zero.
    """
    n, m = _single(n, m)
    _, Gt, Gp = harmonic_table(n, theta, phi)
    gt = Gt[n, m + n]
    gp = Gp[n, m + n]
    return np.stack([np.zeros_like(gt), gt, gp], axis=-1)
