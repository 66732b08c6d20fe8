"""Invariant suite behind the ``validate`` command.

Each check returns a dict with ``name``, ``passed``, ``measured`` and
``tolerance``; the report is a list in fixed order.
"""

import numpy as np

from . import specfun
from .capacity import capacity_NM
from .channel import assemble, gram_defect, received_power_ratio
from .geometry import ball_quadrature, sphere_quadrature
from .power import (
    ETA,
    gamma_closed,
    gamma_matrix,
    oracle_discrepancy,
    singular_values,
    transmit_coeff,
    volume_norms,
)
from .wavefunctions import REGULAR, RADIATING, field_table, n_modes


def _result(name, measured, tol):
    return {"name": name, "passed": bool(measured <= tol), "measured": float(measured), "tolerance": float(tol)}


def check_wronskian(n_max=100, xs=None):
    xs = np.geomspace(0.1, 500, 40) if xs is None else xs
    worst = 0.0
    for x in xs:
        j = specfun.spherical_jn_array(n_max + 1, x)
        y = specfun.spherical_yn_array(n_max + 1, x)
        n = np.arange(n_max + 1)
        dj = np.empty(n_max + 1)
        dy = np.empty(n_max + 1)
        dj[0], dy[0] = -j[1], -y[1]
        dj[1:] = j[:-2] - (n[1:] + 1) / x * j[1:-1]
        dy[1:] = y[:-2] - (n[1:] + 1) / x * y[1:-1]
        w = x * x * (j[:-1] * dy - dj * y[:-1])
        worst = max(worst, np.abs(w - 1.0).max())
    return _result("wronskian", worst, 1e-10)


def check_recurrence(n_max=100, xs=None):
    xs = np.geomspace(0.1, 500, 40) if xs is None else xs
    worst = 0.0
    for x in xs:
        j = specfun.spherical_jn_array(n_max + 1, x)
        n = np.arange(1, n_max + 1)
        lhs = j[:-2] + j[2:]
        rhs = (2 * n + 1) / x * j[1:-1]
        mask = np.abs(j[1:-1]) > 1e-280
        rel = np.abs(lhs - rhs)[mask] / np.abs(rhs[mask])
        worst = max(worst, rel.max())
    return _result("bessel_recurrence", worst, 1e-10)


def check_hankel_identity(n_max=100, xs=None):
    xs = np.geomspace(0.1, 500, 40) if xs is None else xs
    worst = 0.0
    for x in xs:
        h = specfun.spherical_jn_array(n_max + 1, x) + 1j * specfun.spherical_yn_array(n_max + 1, x)
        n = np.arange(1, n_max + 1)
        dh = np.concatenate([[-h[1]], h[:-2][: n_max] - (n + 1) / x * h[1:-1]])
        with np.errstate(over="ignore"):
            h2 = np.abs(h[:-1]) ** 2
        ok = x * x * h2 < 1e300  # beyond this the Im part underflows
        val = (dh[ok] / h[:-1][ok]).imag * x * x * h2[ok]
        worst = max(worst, np.abs(val - 1.0).max())
    return _result("hankel_im_identity", worst, 1e-10)


def check_harmonics(n_max=20):
    rule = sphere_quadrature(n_max)
    Y, Gt, Gp = specfun.harmonic_table(n_max, rule.theta, rule.phi)
    idx = [(n, m + n_max) for n in range(n_max + 1) for m in range(-n, n + 1)]
    A = np.array([Y[i] for i in idx])
    gram = (A * rule.weights) @ A.conj().T
    ortho = np.abs(gram - np.eye(len(idx))).max()
    g2 = np.array([(np.abs(Gt[i]) ** 2 + np.abs(Gp[i]) ** 2) @ rule.weights for i in idx])
    nn = np.array([n * (n + 1) for n, _ in idx])
    grad = np.abs(g2 - nn).max() / max(nn.max(), 1)
    return [
        _result("harmonic_orthonormality", ortho, 1e-10),
        _result("gradient_eigenvalue", grad, 1e-10),
    ]


def check_mode_orthonormality(n_max, k, R_S, R_V):
    rule = sphere_quadrature(n_max + 1)
    U = field_table(RADIATING, n_max, k, R_S, rule.theta, rule.phi)
    C = np.sqrt(rule.integrate(np.sum(np.abs(U) ** 2, axis=-1)))
    u = (U / C[:, None, None]).reshape(len(C), -1, 3)
    gu = np.einsum("pqc,q,sqc->ps", u.conj(), rule.weights, u)
    ball = ball_quadrature(n_max + 1, int(k * R_V + n_max) + 24, R_V)
    V = field_table(REGULAR, n_max, k, ball.r, ball.theta, ball.phi)
    D = volume_norms(n_max, k, R_V)
    v = V / D[:, None, None]
    gv = np.einsum("pqc,q,sqc->ps", v.conj(), ball.weights, v)
    eye = np.eye(len(C))
    return [
        _result("u_orthonormality", np.abs(gu - eye).max(), 1e-10),
        _result("v_orthonormality", np.abs(gv - eye).max(), 1e-10),
    ]


def check_transmit_power(n_max, k, R_V, ratios=(2, 5, 10), eta=ETA):
    worst = max(oracle_discrepancy(n_max, k, r * R_V, R_V, eta=eta) for r in ratios)
    return _result("transmit_power_vs_poynting", worst, 1e-6)


def check_gamma(n_max, k, R_S):
    g = gamma_matrix(n_max, k, R_S)
    closed = np.array([gamma_closed(p, p, k, R_S) for p in range(1, len(g) + 1)])
    off = np.abs(g - np.diag(np.diag(g))).max()
    diag = np.max(np.abs(np.diag(g) - closed) / np.abs(closed))
    return [_result("gamma_offdiag", off, 1e-10), _result("gamma_diag", diag, 1e-8)]


def tau_deviation(n_max, k, kR_S, R_V, eta=ETA):
    """max |eta k^4 R_S^2 sigma_p^2 / (2 T_p) - 1| over modes with n <= n_max."""
    R_S = kR_S / k
    sigma = singular_values(n_max, k, R_S, R_V)
    T = np.array([transmit_coeff(p, k, R_V, eta) for p in range(1, n_modes(n_max) + 1)])
    return float(np.max(np.abs(eta * k**4 * R_S**2 * sigma**2 / (2 * T) - 1.0)))


def check_tau(k, R_V, n_max=3):
    d1 = tau_deviation(n_max, k, 100.0, R_V)
    d2 = tau_deviation(n_max, k, 200.0, R_V)
    return _result("tau_asymptotic_decay", d2 / d1, 0.6)


def check_channel(config):
    ch = assemble(config)
    off, diag = gram_defect(ch.phi)
    ratio = received_power_ratio(ch) / config.density
    cap = capacity_NM(ch, config.power_w, config.n0_w_per_hz, config.bandwidth_hz, config.density)
    return [
        _result("gram_defect", max(off, diag), 0.05),
        _result("received_power_ratio", abs(ratio - 1.0), 0.05),
        _result(
            "capacity_vs_closed_form",
            abs(cap.rate_bits_per_s / cap.closed_form_rate - 1.0),
            0.05,
        ),
    ]


def run_all(config, eta=ETA):
    """Full invariant report for ``config``; ``eta`` feeds the closed forms."""
    n_check = min(config.n_max, 5) or 1
    report = [check_wronskian(), check_recurrence(), check_hankel_identity()]
    report += check_harmonics()
    report += check_mode_orthonormality(n_check, config.k, config.r_s, config.r_v)
    report.append(check_transmit_power(n_check, config.k, config.r_v, eta=eta))
    report += check_gamma(n_check, config.k, config.r_s)
    report.append(check_tau(config.k, config.r_v))
    if config.n_max >= 1:
        report += check_channel(config)
    return report


def all_passed(report):
    return all(item["passed"] for item in report)
