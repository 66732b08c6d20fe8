"""Receiver dipole model and assembly of the finite MIMO channel.

With ``X = [J_1 .. J_M]`` the received vector is ``Y = g Phi Sigma X + Z``
where ``Phi[q, p] = u_p(s_q) . e_q``. In normalized inputs
``X~ = T^(1/2) X`` the channel is ``H_eff = g Phi Sigma T^(-1/2)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import fibonacci_sphere
from .power import mode_table, surface_norms
from .wavefunctions import RADIATING, field_table, n_modes

_SQRT_640 = math.sqrt(640.0)


def dipole_resistance(L, wavelength):
    """Radiation resistance 80 (pi L / lambda)^2 of a short dipole [Ohm]."""
    if L < 0 or L >= wavelength / 10.0:
        raise ValueError("short-dipole model needs 0 <= L < lambda/10")
    return 80.0 * (math.pi * L / wavelength) ** 2


def received_signal_gain(wavelength=1.0, L=None):
    """Factor mapping E . e [V/m] on a matched dipole to sqrt(Watt).

    Computed as ``L / sqrt(8 R_T)`` with the open-circuit voltage ``L E . e``
    and conjugate matching ``R_T = R_r``; equals ``lambda / (sqrt(640) pi)``
    for every short-dipole length.
    """
    if L is None:
        L = wavelength / 50.0
    if L == 0:
        return wavelength / (_SQRT_640 * math.pi)
    return L / math.sqrt(8.0 * dipole_resistance(L, wavelength))


def channel_gain(k, eta):
    """Scalar g = -eta k / sqrt(160)."""
    return -eta * k / math.sqrt(160.0)


def build_phi(n_max, dipoles, k, R_S, C=None):
    """N x M matrix of normalized modes sampled along the dipole axes."""
    M = n_modes(n_max)
    if M == 0:
        return np.zeros((len(dipoles), 0), dtype=complex)
    if not math.isclose(dipoles.radius, R_S, rel_tol=1e-12):
        raise ValueError("dipoles must lie on the sphere of radius R_S")
    U = field_table(RADIATING, n_max, k, R_S, dipoles.theta, dipoles.phi)
    if C is None:
        C = surface_norms(n_max, k, R_S)
    q = np.arange(len(dipoles))
    phi = U[:, q, dipoles.orientation].T
    return phi / C[None, :]


def gram_defect(phi):
    """(max off-diagonal, max diagonal error) of (12 pi / N) Phi^H Phi - I."""
    N, M = phi.shape
    if M == 0:
        return 0.0, 0.0
    G = 12.0 * np.pi / N * (phi.conj().T @ phi)
    D = G - np.eye(M)
    diag = float(np.abs(np.diag(D)).max())
    off = float(np.abs(D - np.diag(np.diag(D))).max()) if M > 1 else 0.0
    return off, diag


@dataclass(frozen=True)
class ChannelMatrices:
    phi: np.ndarray
    sigma: np.ndarray
    T: np.ndarray
    R_S: float
    g: float
    noise_power: float

    @property
    def tau(self):
        return self.R_S * self.sigma / np.sqrt(self.T)

    @property
    def H_eff(self):
        # g Phi Sigma T^(-1/2), columns scaled
        return self.g * self.phi * (self.sigma / np.sqrt(self.T))[None, :]

    @property
    def shape(self):
        return self.phi.shape


def assemble(config, dipoles=None):
    """Build the channel for ``config``; dipoles default to a Fibonacci set."""
    N = config.n_dipoles
    if dipoles is None:
        dipoles = fibonacci_sphere(N, config.r_s)
    elif len(dipoles) != N:
        raise ValueError(f"dipole set has {len(dipoles)} points, config needs {N}")
    M = config.n_modes
    if M == 0:
        return ChannelMatrices(
            np.zeros((N, 0), dtype=complex), np.zeros(0), np.zeros(0),
            config.r_s, channel_gain(config.k, config.eta), config.noise_power,
        )
    tab = mode_table(config.n_max, config.k, config.r_s, config.r_v, config.eta)
    phi = build_phi(config.n_max, dipoles, config.k, config.r_s, tab.C)
    return ChannelMatrices(
        phi, tab.sigma, tab.T, config.r_s, channel_gain(config.k, config.eta), config.noise_power
    )


def tau_matrix(config):
    """Diagonal of R_S T^(-1/2) Sigma; tends to sqrt(2/(eta k^4))."""
    tab = mode_table(config.n_max, config.k, config.r_s, config.r_v, config.eta)
    return config.r_s * tab.sigma / np.sqrt(tab.T)


def tau_limit(k, eta):
    return math.sqrt(2.0 / (eta * k**4))


def received_power_ratio(channel, K=None):
    """E||H_eff X~||^2 / tr(K) for input covariance K (isotropic by default)."""
    H = channel.H_eff
    M = H.shape[1]
    if M == 0:
        return 0.0
    if K is None:
        return float(np.sum(np.abs(H) ** 2) / M)
    K = np.asarray(K)
    return float(np.real(np.trace(H @ K @ H.conj().T)) / np.real(np.trace(K)))


def sample_noise(N, draws, noise_power, rng):
    """Circularly symmetric complex Gaussian noise, shape (draws, N)."""
    scale = math.sqrt(noise_power / 2.0)
    return scale * (rng.standard_normal((draws, N)) + 1j * rng.standard_normal((draws, N)))


def simulate(channel, x_tilde, rng):
    """Received vectors for normalized inputs ``x_tilde`` of shape (draws, M)."""
    signal = x_tilde @ channel.H_eff.T
    return signal + sample_noise(channel.shape[0], len(x_tilde), channel.noise_power, rng)
