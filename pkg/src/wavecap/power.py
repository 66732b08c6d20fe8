"""Per-mode transmit power, radiation resistance and the Poynting-flux check.

The closed-form coefficients ``T_p`` (power per ``|J_p|^2``) are compared
against a direct surface quadrature of the complex power flow
``P_c = (1/2) \\oint E x H^* . ds`` built from the modal field expansion.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .geometry import gauss_legendre, sphere_quadrature
from .wavefunctions import (
    RADIATING,
    REGULAR,
    default_radial_order,
    field_table,
    mode_list,
    mode_unindex,
    n_modes,
    radial_parts,
)

ETA = 120.0 * math.pi

# The radial form of the Hankel log-derivative identity used by T_p:
# Im{(1/h_n) dh_n/dr} at r = R_S equals 1/(k R_S^2 |h_n(k R_S)|^2).
IDENTITY_NOTE = (
    "Im{(1/h_n) dh_n/dr}|_{r=R_S} = 1/(k R_S^2 |h_n(kR_S)|^2) "
    "(Wronskian form; d/dr = k d/dx)"
)


def _j_with_minus1(n_max, x):
    """j_{-1}(x) .. j_{n_max}(x) as an array offset by one (index 0 is j_{-1})."""
    j = specfun.spherical_jn_array(n_max, x)
    return np.concatenate([[math.cos(x) / x], j])


def _bracket(jm, a, x):
    # j_{a}^2 + j_{a+1}^2 - (2a+3)/x j_a j_{a+1}, with jm offset by one
    ja, jb = jm[a + 1], jm[a + 2]
    return ja * ja + jb * jb - (2 * a + 3) / x * ja * jb


def transmit_coeff(p, k, R_V, eta=ETA):
    """Closed-form transmit power coefficient T_p [Ohm m]."""
    if not (k > 0 and R_V > 0):
        raise ValueError("k and R_V must be positive")
    n, _, l = mode_unindex(p)
    x = k * R_V
    jm = _j_with_minus1(n + 1, x)
    pre = eta * k * k * R_V**3 / 4.0
    if l == 1:
        return pre * _bracket(jm, n - 1, x)
    return pre * (
        (n + 1) / (2 * n + 1) * _bracket(jm, n - 2, x)
        + n / (2 * n + 1) * _bracket(jm, n, x)
    )


def radiation_resistance(p, k, R_V, eta=ETA):
    """R_rad,p = T_p / R_V [Ohm]; a function of k R_V only."""
    return transmit_coeff(p, k, R_V, eta) / R_V


def mode_power(p, J_p, k, R_V, eta=ETA):
    """Average power radiated by mode p driven with coefficient J_p [W]."""
    return transmit_coeff(p, k, R_V, eta) * abs(J_p) ** 2


# --- batch norms ------------------------------------------------------------


def _angular_moments(n_max):
    """Quadrature of |Y_nm|^2 and |grad_s Y_nm|^2, indexed [n, m + n_max]."""
    rule = sphere_quadrature(n_max + 1)
    Y, Gt, Gp = specfun.harmonic_table(n_max, rule.theta, rule.phi)
    AY = rule.integrate(np.abs(Y) ** 2)
    AG = rule.integrate(np.abs(Gt) ** 2 + np.abs(Gp) ** 2)
    return AY, AG


def _assemble_norms(n_max, AY, AG, zz, zx, rc):
    # |U|^2 = |z|^2 |grad Y|^2 (l=1) or (n(n+1))^2 |z/x|^2 |Y|^2 + |rc|^2 |grad Y|^2 (l=2),
    # with radial factors already summed over the radial rule
    out = np.empty(n_modes(n_max))
    for i, (n, m, l) in enumerate(mode_list(n_max)):
        c = m + n_max
        if l == 1:
            out[i] = zz[n] * AG[n, c]
        else:
            out[i] = (n * (n + 1)) ** 2 * zx[n] * AY[n, c] + rc[n] * AG[n, c]
    return np.sqrt(out)


def surface_norms(n_max, k, R_S):
    """C_p for all modes with n <= n_max, by surface quadrature.

    The integrand separates into radial and angular factors, so the product
    rule is summed in factored form.
    """
    AY, AG = _angular_moments(n_max)
    z, zx, rc = radial_parts(RADIATING, n_max, k * R_S)
    return _assemble_norms(n_max, AY, AG, np.abs(z) ** 2, np.abs(zx) ** 2, np.abs(rc) ** 2)


def volume_norms(n_max, k, R_V, radial_order=None):
    """D_p for all modes with n <= n_max, by ball quadrature in factored form."""
    order = radial_order or default_radial_order(n_max, k, R_V)
    x, wx = gauss_legendre(order)
    r = 0.5 * R_V * (x + 1.0)
    wr = 0.5 * R_V * wx * r**2
    zz = np.zeros(n_max + 1)
    zx2 = np.zeros(n_max + 1)
    rc2 = np.zeros(n_max + 1)
    for ri, wi in zip(r, wr):
        z, zx, rc = radial_parts(REGULAR, n_max, k * ri)
        zz += wi * np.abs(z) ** 2
        zx2 += wi * np.abs(zx) ** 2
        rc2 += wi * np.abs(np.nan_to_num(rc)) ** 2
    AY, AG = _angular_moments(n_max)
    return _assemble_norms(n_max, AY, AG, zz, zx2, rc2)


def _degrees(n_max):
    return np.array([n for n, _, _ in mode_list(n_max)])


def singular_values(n_max, k, R_S, R_V, C=None, D=None):
    if not R_S > R_V:
        raise ValueError("need R_S > R_V")
    C = surface_norms(n_max, k, R_S) if C is None else C
    D = volume_norms(n_max, k, R_V) if D is None else D
    n = _degrees(n_max)
    return C * D / (n * (n + 1))


@dataclass(frozen=True)
class ModeTable:
    """Per-mode constants for all modes with degree <= n_max."""

    n_max: int
    k: float
    R_S: float
    R_V: float
    eta: float
    C: np.ndarray
    D: np.ndarray
    sigma: np.ndarray
    T: np.ndarray

    @property
    def R_rad(self):
        return self.T / self.R_V

    @property
    def modes(self):
        return mode_list(self.n_max)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "n", "m", "l", "C_p", "D_p", "sigma_p", "T_p", "R_rad_p"])
        for i, (n, m, l) in enumerate(self.modes):
            w.writerow(
                [i + 1, n, m, l]
                + [repr(float(v)) for v in (self.C[i], self.D[i], self.sigma[i], self.T[i], self.R_rad[i])]
            )
        return buf.getvalue()


def mode_table(n_max, k, R_S, R_V, eta=ETA):
    C = surface_norms(n_max, k, R_S)
    D = volume_norms(n_max, k, R_V)
    sigma = singular_values(n_max, k, R_S, R_V, C, D)
    T = np.array([transmit_coeff(p, k, R_V, eta) for p in range(1, n_modes(n_max) + 1)])
    return ModeTable(n_max, k, R_S, R_V, eta, C, D, sigma, T)


# --- Poynting machinery -------------------------------------------------------


def _partner(p):
    """Index of the curl partner (same n, m; other l)."""
    return p + 1 if p % 2 else p - 1


def gamma_closed(p, pp, k, R_S):
    """Closed form of gamma_pp' = \\oint u_p x curl(u_p'^*) . ds."""
    if p != pp:
        return 0j
    n, _, l = mode_unindex(p)
    x = k * R_S
    ld = specfun.sph_hankel1_logderiv(n, x) * k  # radial log-derivative
    if l == 1:
        return R_S + R_S**2 * np.conj(ld)
    z, zx, rc = radial_parts(RADIATING, n, x)
    nn = n * (n + 1)
    ratio = abs(z[n]) ** 2 / (nn * abs(zx[n]) ** 2 + abs(rc[n]) ** 2)  # C_nm1^2 / C_p^2
    return -ratio * (R_S + R_S**2 * ld)


def _rdot_cross(a, b):
    # (a x b) . r-hat in the local basis
    return a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]


def gamma_matrix(n_max, k, R_S, rule=None):
    """gamma_pp' for all mode pairs with n <= n_max by surface quadrature."""
    rule = rule or sphere_quadrature(n_max + 1)
    U = field_table(RADIATING, n_max, k, R_S, rule.theta, rule.phi)
    C = np.sqrt(rule.integrate(np.sum(np.abs(U) ** 2, axis=-1)))
    u = U / C[:, None, None]
    M = len(C)
    partner = np.array([_partner(p) - 1 for p in range(1, M + 1)])
    curl_u = k * U[partner] / C[:, None, None]
    cc = np.conj(curl_u)
    g = np.empty((M, M), dtype=complex)
    for i in range(M):
        g[i] = rule.integrate(_rdot_cross(u[i][None], cc)) * R_S**2
    return g


def _excitation(J, M):
    J = np.asarray(J, dtype=complex)
    if J.ndim != 1 or len(J) > M:
        raise ValueError("excitation vector longer than the mode set")
    out = np.zeros(M, dtype=complex)
    out[: len(J)] = J
    return out


def radiated_power_numeric(J, k, R_S, R_V, n_max=None, theta_order=None, eta=ETA):
    """Re{P_c} by quadrature of (1/2) E x H^* over the sphere of radius R_S.

    ``J`` holds mode coefficients J_1..J_len(J). The field on S is
    ``E = -eta k^2 sum sigma_p J_p u_p`` and ``H = (1/(i eta k)) curl E``
    using ``curl u_p = (k / C_p) U_partner(p)``. ``theta_order`` overrides
    the polar order and must be at least n_max + 1.
    """
    J = np.asarray(J, dtype=complex)
    if n_max is None:
        n_max = max(1, mode_unindex(max(len(J), 1))[0])
    M = n_modes(n_max)
    J = _excitation(J, M)
    if theta_order is None:
        rule = sphere_quadrature(n_max + 1)
    else:
        if theta_order < n_max + 1:
            raise ValueError(f"polar quadrature order {theta_order} too low for n_max={n_max}")
        rule = sphere_quadrature(theta_order - 2)
    if not np.any(J):
        return 0.0
    U = field_table(RADIATING, n_max, k, R_S, rule.theta, rule.phi)
    C = np.sqrt(rule.integrate(np.sum(np.abs(U) ** 2, axis=-1)))
    D = volume_norms(n_max, k, R_V)
    sigma = singular_values(n_max, k, R_S, R_V, C, D)
    partner = np.array([_partner(p) - 1 for p in range(1, M + 1)])
    w = sigma * J / C
    E = -eta * k * k * np.einsum("p,pqc->qc", w, U)
    H = 1j * k * np.einsum("p,pqc->qc", w, k * U[partner])
    flux = 0.5 * _rdot_cross(E, np.conj(H)) * R_S**2
    return float(np.real(rule.integrate(flux)))


def oracle_discrepancy(n_max, k, R_S, R_V, eta=ETA):
    """Max relative gap between quadrature power and T_p over single modes.

    ``eta`` enters only the closed form; the flux always uses the true
    wave impedance, so a wrong ``eta`` shows up as a discrepancy.
    """
    worst = 0.0
    for p in range(1, n_modes(n_max) + 1):
        e = np.zeros(p)
        e[-1] = 1.0
        num = radiated_power_numeric(e, k, R_S, R_V, n_max=n_max)
        T = transmit_coeff(p, k, R_V, eta)
        worst = max(worst, abs(num - T) / T)
    return worst
