"""Harmonic-Poincare constants: Galerkin upper estimates, explicit lower bound.

mu0 is the smallest Rayleigh quotient int |hess v|^2 / int v^2 over harmonic
fields vanishing at a point; mubar is the analogue under a zero-mean
constraint.  Upper estimates minimize over span{1, Re zeta^k, Im zeta^k}
(harmonic polynomials up to a degree) with the constraint projected out; the
lower bound is the explicit formula from the cut-off comparison with the
Neumann eigenvalue, evaluated in scale-anchored form so it transforms exactly
as 1/length^2.
"""
from __future__ import annotations

import dataclasses
import warnings

import numpy as np
import scipy.linalg

from .fem import TriMesh, domain_quadrature


def unit_ball_volume(dim: int) -> float:
    """Volume of the unit ball in R^dim."""
    from scipy.special import gamma

    return float(np.pi ** (dim / 2.0) / gamma(dim / 2.0 + 1.0))


def _basis_values(pts: np.ndarray, center: np.ndarray, scale: float, degree: int):
    """Values and gradients of {1, Re (z/L)^k, Im (z/L)^k}, k = 1..degree."""
    z = (pts[:, 0] - center[0] + 1j * (pts[:, 1] - center[1])) / scale
    m = 1 + 2 * degree
    vals = np.empty((pts.shape[0], m))
    gx = np.zeros((pts.shape[0], m))
    gy = np.zeros((pts.shape[0], m))
    vals[:, 0] = 1.0
    zk = np.ones_like(z)
    for k in range(1, degree + 1):
        dzk = (k / scale) * zk         # d/dz (z/L)^k, with zk = (z/L)^(k-1)
        zk = zk * z
        vals[:, 2 * k - 1] = zk.real
        vals[:, 2 * k] = zk.imag
        gx[:, 2 * k - 1] = dzk.real
        gy[:, 2 * k - 1] = -dzk.imag
        gx[:, 2 * k] = dzk.imag
        gy[:, 2 * k] = dzk.real
    return vals, gx, gy


def harmonic_rayleigh_min(
    mesh: TriMesh,
    constraint: str,
    degree: int,
    x0=None,
    quad=None,
) -> float:
    """Minimum of int |grad v|^2 / int v^2 over the harmonic polynomial space.

    constraint is "point" (v(x0) = 0; x0 defaults to the domain center) or
    "mean_zero".  On the unit disk the modes Re/Im z^k have quotient
    2k(k+1), so the point-constrained minimum is 4.  Nested trial spaces make
    the value non-increasing in degree; since the minimization runs over a
    subspace of admissible fields, the result is an upper estimate of the
    true constant.  A numerically degenerate mass matrix triggers an
    automatic degree reduction with a warning.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if constraint not in ("point", "mean_zero"):
        raise ValueError("constraint must be 'point' or 'mean_zero', got %r" % constraint)
    if quad is None:
        quad = domain_quadrature(mesh)
    pts, wts = quad
    center = np.asarray(mesh.domain.center, dtype=float)
    scale = float(np.max(np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])))
    vals, gx, gy = _basis_values(pts, center, scale, degree)

    wv = vals * wts[:, None]
    a_mat = (gx * wts[:, None]).T @ gx + (gy * wts[:, None]).T @ gy
    b_mat = wv.T @ vals

    if constraint == "point":
        p = np.asarray(mesh.domain.center if x0 is None else x0, dtype=float)
        ell = _basis_values(p[None, :], center, scale, degree)[0][0]
    else:
        ell = np.sum(wv, axis=0)

    # Householder reflection sending ell to a multiple of e_1; drop that column
    v = ell.copy()
    s = float(np.linalg.norm(ell))
    v[0] += s if ell[0] >= 0.0 else -s
    hmat = np.eye(ell.size) - 2.0 * np.outer(v, v) / float(v @ v)
    q = hmat[:, 1:]
    a_p = q.T @ a_mat @ q
    b_p = q.T @ b_mat @ q

    bev = scipy.linalg.eigvalsh(b_p)
    if bev[0] < 1e-13 * bev[-1]:
        if degree == 1:
            raise ValueError("mass matrix degenerate even at degree 1")
        warnings.warn("degenerate basis at degree %d; reducing" % degree)
        return harmonic_rayleigh_min(mesh, constraint, degree - 1, x0=x0, quad=quad)
    return float(scipy.linalg.eigvalsh(a_p, b_p)[0])


def mu2_lower_convex(diameter: float) -> float:
    """Neumann spectral-gap lower bound pi^2/d^2 for convex domains."""
    if diameter <= 0.0:
        raise ValueError("diameter must be positive")
    return float(np.pi**2 / diameter**2)


def mu0_lower_bound(r: float, area: float, mu2: float, dim: int = 2) -> float:
    """Explicit lower bound on mu0 from an interior ball and a Neumann gap.

    Evaluated on the domain rescaled by 1/r (where the interior ball has unit
    radius) and scaled back, so the bound transforms exactly as 1/length^2:

        C = (1 + r^(-N/2) sqrt(area/omega_N))^2 (1 + (mu2 r^2)^(-2)) - 1,
        mu0 >= 1 / (r^2 sqrt(C)).

    At r = 1 this is the plain printed form of the estimate.
    """
    if r <= 0.0 or area <= 0.0 or mu2 <= 0.0:
        raise ValueError("r, area, mu2 must all be positive")
    omega = unit_ball_volume(dim)
    big_c = (1.0 + r ** (-dim / 2.0) * np.sqrt(area / omega)) ** 2 * (1.0 + (mu2 * r * r) ** -2) - 1.0
    return float(1.0 / (r * r * np.sqrt(big_c)))


@dataclasses.dataclass(frozen=True)
class SpectralEstimate:
    """Upper estimates for mu0 and mubar plus the explicit lower bound.

    mu0_lower is None when no Neumann bound is available (non-convex domain
    without a user-supplied mu2).  mu2_lower records the Neumann bound used.
    """

    mu0_upper: float
    mubar_upper: float
    mu0_lower: float | None
    basis_degree: int
    x0: np.ndarray
    mu2_lower: float | None


def spectral_estimate(
    mesh: TriMesh,
    r_interior: float,
    area: float,
    degree: int = 12,
    x0=None,
    mu2: float | None = None,
) -> SpectralEstimate:
    """Assemble both Galerkin estimates and, when mu2 is given, the lower bound."""
    quad = domain_quadrature(mesh)
    x0_arr = np.asarray(mesh.domain.center if x0 is None else x0, dtype=float)
    mu0_upper = harmonic_rayleigh_min(mesh, "point", degree, x0=x0_arr, quad=quad)
    mubar_upper = harmonic_rayleigh_min(mesh, "mean_zero", degree, quad=quad)
    lower = None if mu2 is None else mu0_lower_bound(r_interior, area, mu2)
    return SpectralEstimate(
        mu0_upper=mu0_upper,
        mubar_upper=mubar_upper,
        mu0_lower=lower,
        basis_degree=degree,
        x0=x0_arr,
        mu2_lower=mu2,
    )
