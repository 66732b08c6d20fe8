import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wavecap import wavefunctions as wf
from wavecap.geometry import ball_quadrature, sphere_quadrature
from wavecap.power import singular_values, surface_norms, volume_norms


def local_basis(theta, phi):
    st_, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    rh = np.stack([st_ * cp, st_ * sp, ct], -1)
    th = np.stack([ct * cp, ct * sp, -st_], -1)
    ph = np.stack([-sp, cp, np.zeros_like(st_)], -1)
    return rh, th, ph


def to_cartesian(theta, phi, F):
    rh, th, ph = local_basis(theta, phi)
    return F[..., 0, None] * rh + F[..., 1, None] * th + F[..., 2, None] * ph


def cart_field(kind, p, k):
    def f(xyz):
        r = np.linalg.norm(xyz)
        theta = math.acos(xyz[2] / r)
        phi = math.atan2(xyz[1], xyz[0])
        F = wf._single(kind, p, k, r, theta, phi)
        return to_cartesian(np.array(theta), np.array(phi), F)

    return f


def fd_jacobian(f, x0, h=1e-5):
    J = np.zeros((3, 3), dtype=complex)  # J[i, j] = d f_i / d x_j
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        J[:, j] = (f(x0 + e) - f(x0 - e)) / (2 * h)
    return J


def dyadic_green(k, r, rp):
    d = r[:, None, :] - rp[None, :, :]
    R = np.linalg.norm(d, axis=-1)
    Rh = d / R[..., None]
    kr = k * R
    g = np.exp(1j * kr) / (4 * np.pi * R)
    a = (1 + 1j / kr - 1 / kr**2) * g
    b = (-1 - 3j / kr + 3 / kr**2) * g
    return a[..., None, None] * np.eye(3) + b[..., None, None] * Rh[..., :, None] * Rh[..., None, :]


@given(st.integers(1, 5000))
def test_mode_index_roundtrip(p):
    n, m, l = wf.mode_unindex(p)
    assert n >= 1 and abs(m) <= n and l in (1, 2)
    assert wf.mode_index(n, m, l) == p


def test_mode_index_first_entries():
    assert wf.mode_unindex(1) == (1, -1, 1)
    assert wf.mode_unindex(2) == (1, -1, 2)
    assert wf.mode_unindex(6) == (1, 1, 2)
    assert wf.mode_unindex(7) == (2, -2, 1)
    assert wf.n_modes(1) == 6 and wf.n_modes(3) == 30 and wf.n_modes(5) == 70
    with pytest.raises(ValueError):
        wf.mode_index(1, 2, 1)
    with pytest.raises(ValueError):
        wf.mode_unindex(0)


def test_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        wf.eval_U(1, 1.0, 0.0, 0.3, 0.2)
    with pytest.raises(ValueError):
        wf.field_table(wf.REGULAR, 2, 1.0, np.array([1.0, -0.1]), np.array([0.1, 0.2]), np.zeros(2))


@pytest.mark.parametrize("kind", [wf.RADIATING, wf.REGULAR])
@pytest.mark.parametrize("p", [1, 2, 9, 14, 27])
def test_curl_partner_and_divergence(kind, p):
    k = 1.7
    x0 = np.array([0.4, -0.9, 1.3])
    J = fd_jacobian(cart_field(kind, p, k), x0)
    curl = np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])
    partner = p + 1 if p % 2 else p - 1
    ref = k * cart_field(kind, partner, k)(x0)
    assert np.abs(curl - ref).max() <= 1e-7 * np.abs(ref).max()
    assert abs(np.trace(J)) <= 1e-7 * np.abs(ref).max()


@pytest.mark.parametrize("kind", [wf.RADIATING, wf.REGULAR])
def test_helmholtz(kind):
    k, p, h = 2.3, 8, 3e-4
    x0 = np.array([0.7, 0.2, -0.5])
    f = cart_field(kind, p, k)
    lap = -6 * f(x0)
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        lap = lap + f(x0 + e) + f(x0 - e)
    lap /= h * h
    assert np.abs(lap + k * k * f(x0)).max() <= 1e-5 * np.abs(k * k * f(x0)).max()


def test_surface_norm_closed_form():
    k, R_S = 2.0, 3.1
    for p in range(1, wf.n_modes(6) + 1):
        n, _, l = wf.mode_unindex(p)
        assert wf.norm_U_surface(p, k, R_S) == pytest.approx(wf.norm_U_closed(n, l, k, R_S), rel=1e-12)


def test_norms_independent_of_m():
    n_max, k = 4, 1.3
    C = surface_norms(n_max, k, 2.0)
    D = volume_norms(n_max, k, 0.8)
    for n in range(1, n_max + 1):
        for l in (1, 2):
            idx = [wf.mode_index(n, m, l) - 1 for m in range(-n, n + 1)]
            assert np.ptp(C[idx]) <= 1e-12 * C[idx[0]]
            assert np.ptp(D[idx]) <= 1e-12 * D[idx[0]]


def test_gram_orthonormal():
    n_max, k, R_S, R_V = 5, 2.0, 2.5, 0.9
    rule = sphere_quadrature(n_max + 1)
    U = wf.field_table(wf.RADIATING, n_max, k, R_S, rule.theta, rule.phi)
    u = U / surface_norms(n_max, k, R_S)[:, None, None]
    gu = np.einsum("pqc,q,sqc->ps", u.conj(), rule.weights, u)
    assert np.abs(gu - np.eye(len(gu))).max() < 1e-12
    ball = ball_quadrature(n_max + 1, wf.default_radial_order(n_max, k, R_V), R_V)
    V = wf.field_table(wf.REGULAR, n_max, k, ball.r, ball.theta, ball.phi)
    v = V / volume_norms(n_max, k, R_V)[:, None, None]
    gv = np.einsum("pqc,q,sqc->ps", v.conj(), ball.weights, v)
    assert np.abs(gv - np.eye(len(gv))).max() < 1e-12


def test_volume_norm_converged_in_radial_order():
    k, R_V = 3.0, 1.5
    base = wf.norm_V_volume(11, k, R_V)
    assert wf.norm_V_volume(11, k, R_V, radial_order=80) == pytest.approx(base, rel=1e-13)


def test_singular_value_requires_separation():
    with pytest.raises(ValueError):
        wf.singular_value(1, 1.0, 0.5, 0.5)


def test_normalized_evaluators():
    k, R_S = 1.0, 2.0
    rule = sphere_quadrature(3)
    u = wf.eval_u(5, k, R_S, rule.theta, rule.phi)
    assert rule.integrate(np.sum(np.abs(u) ** 2, axis=-1)) == pytest.approx(1.0, rel=1e-13)
    ball = ball_quadrature(3, 30, 0.6)
    v = wf.eval_v(5, k, 0.6, ball.r, ball.theta, ball.phi)
    assert ball.integrate(np.sum(np.abs(v) ** 2, axis=-1)) == pytest.approx(1.0, rel=1e-13)


def test_singular_values_match_green_operator():
    # project the dyadic Green operator applied to v_p onto u_p' on S:
    # the result must be ik sigma_p delta_pp'
    k, R_V, R_S, n_max, order = 2.0, 0.7, 1.6, 2, 12
    ball = ball_quadrature(order, 20, R_V)
    surf = sphere_quadrature(order)
    V = wf.field_table(wf.REGULAR, n_max, k, ball.r, ball.theta, ball.phi)
    U = wf.field_table(wf.RADIATING, n_max, k, R_S, surf.theta, surf.phi)
    Vc = to_cartesian(ball.theta, ball.phi, V / volume_norms(n_max, k, R_V)[:, None, None])
    Uc = to_cartesian(surf.theta, surf.phi, U / surface_norms(n_max, k, R_S)[:, None, None])
    rp = ball.r[:, None] * local_basis(ball.theta, ball.phi)[0]
    r = R_S * local_basis(surf.theta, surf.phi)[0]
    M = wf.n_modes(n_max)
    E = np.zeros((M, len(r), 3), dtype=complex)
    for s in range(0, len(r), 32):
        G = dyadic_green(k, r[s : s + 32], rp)
        E[:, s : s + 32] = np.einsum("qsij,psj,s->pqi", G, Vc, ball.weights)
    proj = np.einsum("aqi,bqi,q->ab", Uc.conj(), E, surf.weights)
    sigma = singular_values(n_max, k, R_S, R_V)
    assert np.abs(np.diag(proj) / (1j * k * sigma) - 1).max() < 1e-7
    off = proj - np.diag(np.diag(proj))
    assert np.abs(off).max() < 1e-7 * np.abs(np.diag(proj)).min()


def test_surface_norm_stable_under_order_doubling():
    k, R_S = 2.0, 3.0
    for p in (1, 10, 35, 70):
        n = wf.mode_unindex(p)[0]
        a = wf.norm_U_surface(p, k, R_S, sphere_quadrature(n + 1))
        b = wf.norm_U_surface(p, k, R_S, sphere_quadrature(2 * n + 2))
        assert abs(a / b - 1) <= 1e-12


def test_volume_norm_small_ball_scaling():
    # j_1(x) ~ x/3 gives D_1 proportional to R_V^(5/2) as k R_V -> 0
    k = 1.0
    ratio = wf.norm_V_volume(1, k, 1e-3) / wf.norm_V_volume(1, k, 2e-3)
    assert ratio == pytest.approx(2 ** -2.5, rel=1e-6)
    assert all(wf.norm_V_volume(p, k, 0.5) > 0 for p in range(1, 31))
