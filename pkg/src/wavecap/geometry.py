"""Quadrature rules on the sphere and ball, and uniform dipole point sets."""

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.spatial import cKDTree

# orientation codes: index into the local (r-hat, theta-hat, phi-hat) basis
ORIENT_R, ORIENT_THETA, ORIENT_PHI = 0, 1, 2
ORIENT_NAMES = ("r", "theta", "phi")

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
MIN_SPACING_CONST = 1.0


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on the sphere (r is None) or in a ball.

    Surface weights are solid-angle weights summing to 4*pi; volume weights
    include the r**2 Jacobian and sum to the ball volume.
    """

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    r: Optional[np.ndarray] = None

    def integrate(self, values):
        """Weighted sum over the last axis of ``values``."""
        return np.asarray(values) @ self.weights

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True)
class DipoleSet:
    """Receive dipoles on a sphere of radius ``radius``."""

    theta: np.ndarray
    phi: np.ndarray
    orientation: np.ndarray
    radius: float

    def __len__(self):
        return len(self.theta)

    def orientation_vectors(self):
        """Unit orientation vectors in the local spherical basis, shape (N, 3)."""
        return np.eye(3)[self.orientation]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q", "theta", "phi", "orientation"])
        for q, (t, p, o) in enumerate(zip(self.theta, self.phi, self.orientation), start=1):
            w.writerow([q, repr(float(t)), repr(float(p)), ORIENT_NAMES[o]])
        return buf.getvalue()


def gauss_legendre(order):
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    return np.polynomial.legendre.leggauss(int(order))


def _surface_grid(n_theta, n_phi):
    u, wu = gauss_legendre(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    theta = np.arccos(u)
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = np.outer(wu, np.full(n_phi, 2.0 * np.pi / n_phi))
    return T.ravel(), P.ravel(), W.ravel()


def sphere_quadrature(n_max):
    """Product rule exact for products of harmonics with degrees <= n_max.

    Gauss-Legendre in cos(theta) with n_max+2 nodes and 2*n_max+2 equispaced
    azimuths; integrands up to polynomial degree 2*n_max+3 in cos(theta) and
    trigonometric degree 2*n_max+1 in phi are integrated exactly.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    t, p, w = _surface_grid(n_max + 2, 2 * n_max + 2)
    return QuadratureRule(t, p, w)


def ball_quadrature(n_max, radial_order, R):
    """Surface rule times a Gauss-Legendre rule on [0, R] with r**2 Jacobian."""
    if not R > 0:
        raise ValueError("ball radius must be positive")
    surf = sphere_quadrature(n_max)
    x, wx = gauss_legendre(radial_order)
    r = 0.5 * R * (x + 1.0)
    wr = 0.5 * R * wx * r**2
    return QuadratureRule(
        theta=np.tile(surf.theta, len(r)),
        phi=np.tile(surf.phi, len(r)),
        weights=np.outer(wr, surf.weights).ravel(),
        r=np.repeat(r, len(surf)),
    )


def min_chord(theta, phi):
    """Smallest pairwise chordal distance of points on the unit sphere."""
    if len(theta) < 2:
        return math.inf
    st = np.sin(theta)
    xyz = np.column_stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])
    d, _ = cKDTree(xyz).query(xyz, k=2)
    return float(d[:, 1].min())


def fibonacci_sphere(N, R_S):
    """Deterministic Fibonacci lattice of N dipoles on radius R_S.

    Point q (0-based) sits at cos(theta) = 1 - (2q+1)/N with azimuth
    2*pi*q/golden; orientations cycle r-hat, theta-hat, phi-hat in index
    order. The minimum chordal spacing is checked against R_S/sqrt(N).
    """
    if N < 1:
        raise ValueError("need at least one dipole")
    q = np.arange(N)
    u = 1.0 - (2.0 * q + 1.0) / N
    theta = np.arccos(u)
    phi = np.mod(2.0 * np.pi * q / GOLDEN, 2.0 * np.pi)
    spacing = min_chord(theta, phi)
    if spacing < MIN_SPACING_CONST / math.sqrt(N):
        raise RuntimeError(f"lattice spacing {spacing:.3g} below 1/sqrt(N) for N={N}")
    return DipoleSet(theta, phi, (q % 3).astype(int), float(R_S))


def uniformity_defect(points, f: Callable, reference: QuadratureRule):
    """|(4 pi / N) sum_q f(s_q) - int_S f dOmega| with the reference rule."""
    n = len(points)
    lattice = 4.0 * np.pi / n * np.sum(f(points.theta, points.phi))
    exact = reference.integrate(f(reference.theta, reference.phi))
    return float(abs(lattice - exact))
