"""Integral identities tying the torsion function to boundary curvature.

Each identity is reported as (lhs, rhs, residual), with the relative residual
normalized by max(|lhs|, |rhs|, N |Omega|) so that identities whose sides both
vanish (disk) stay well-scaled.  Volume integrals use the solver's curved-cell
quadrature caches; boundary integrals use an analytic trace plus the one-sided
FE normal derivative.
"""
from __future__ import annotations

import dataclasses

import numpy as np

from .fem import TorsionField, boundary_normal_derivative, harmonic_deficit_field
from .geometry import BoundaryTrace, GeometrySummary

_DIM = 2


@dataclasses.dataclass(frozen=True)
class IdentityReport:
    name: str
    lhs: float
    rhs: float
    residual_abs: float
    residual_rel: float
    applicable: bool = True


@dataclasses.dataclass(frozen=True)
class DeficitReport:
    """Cauchy-Schwarz deficit of the Hessian in its three guises.

    cs_deficit = int |hess u|^2 - (lap u)^2 / N  (nonnegative pointwise),
    hessian_h_sq = int |I - hess u|^2 (the same quantity through h = q - u),
    p_min_delta = minimum element-mean of the weak Laplacian of the
    P-function P = |grad u|^2 / 2 - u (nonnegative for the exact solution).
    """

    cs_deficit: float
    hessian_h_sq: float
    p_min_delta: float


def _report(name: str, lhs: float, rhs: float, scale: float, applicable: bool = True) -> IdentityReport:
    res = abs(lhs - rhs)
    return IdentityReport(
        name=name,
        lhs=lhs,
        rhs=rhs,
        residual_abs=res,
        residual_rel=res / max(abs(lhs), abs(rhs), scale),
        applicable=applicable,
    )


def cs_deficit(field: TorsionField) -> DeficitReport:
    """Deficit integrals and the elementwise floor of the P-function Laplacian.

    For the torsion solution, Delta P with P = |grad u|^2/2 - u equals the
    Cauchy-Schwarz density |hess u|^2 - (tr hess u)^2/N, which is nonnegative
    pointwise for any symmetric matrix field.  p_min_delta is the smallest
    element quadrature mean of that density.  Numerically differentiating a
    recovered grad P instead loses the sign: curved boundary cells carry O(1)
    Hessian error, so the divergence route floors near -1, not -1e-6.
    """
    hq = field.qp_hess
    w = field.qp_weights
    hs = np.einsum("tqcd,tqcd->tq", hq, hq)
    tr = hq[..., 0, 0] + hq[..., 1, 1]
    density = hs - tr * tr / _DIM
    deficit = float(np.sum(w * density))

    eye = np.eye(2)
    dev = eye[None, None, :, :] - hq
    hess_h = float(np.sum(w * np.einsum("tqcd,tqcd->tq", dev, dev)))

    p_min = float(np.min(np.sum(w * density, axis=1) / np.sum(w, axis=1)))
    return DeficitReport(cs_deficit=deficit, hessian_h_sq=hess_h, p_min_delta=p_min)


def identity_suite(field: TorsionField, trace: BoundaryTrace, summary: GeometrySummary) -> list[IdentityReport]:
    """All integral identities for one solved domain.

    Names: fundamental, sbt, heintze_karcher, wps, volume, minkowski,
    deficit_equivalence.  heintze_karcher is flagged not applicable when the
    boundary has non-positive mean curvature somewhere.
    """
    u_nu = boundary_normal_derivative(field, trace.thetas)
    w = trace.weights
    h_curv = trace.curvatures
    area = summary.area
    scale = _DIM * area
    r_ref = summary.R_ref
    h0 = summary.H0
    center = field.mesh.domain.center
    x_nu = np.einsum("ic,ic->i", trace.points - center[None, :], trace.normals)

    dr = cs_deficit(field)
    deficit_over = dr.cs_deficit / (_DIM - 1)

    reports = [
        _report("fundamental", deficit_over, scale - float(np.sum(w * h_curv * u_nu * u_nu)), scale),
        _report(
            "sbt",
            deficit_over + float(np.sum(w * (u_nu - r_ref) ** 2)) / r_ref,
            float(np.sum(w * (h0 - h_curv) * u_nu * u_nu)),
            scale,
        ),
    ]

    if float(np.min(h_curv)) > 0.0:
        lhs = deficit_over + float(np.sum(w * (1.0 - h_curv * u_nu) ** 2 / h_curv))
        rhs = float(np.sum(w / h_curv)) - scale
        reports.append(_report("heintze_karcher", lhs, rhs, scale))
    else:
        reports.append(IdentityReport("heintze_karcher", np.nan, np.nan, np.nan, np.nan, applicable=False))

    hq = field.qp_hess
    hs = np.einsum("tqcd,tqcd->tq", hq, hq)
    wps_lhs = float(np.sum(field.qp_weights * (-field.qp_u) * (hs - _DIM)))
    wps_rhs = 0.5 * float(np.sum(w * (u_nu * u_nu - r_ref * r_ref) * (u_nu - x_nu)))
    reports.append(_report("wps", wps_lhs, wps_rhs, scale))

    reports.append(_report("volume", float(np.sum(w * u_nu)), scale, scale))
    reports.append(_report("minkowski", float(np.sum(w * h_curv * x_nu)), summary.perimeter, scale))
    reports.append(_report("deficit_equivalence", dr.cs_deficit, dr.hessian_h_sq, scale))
    return reports


@dataclasses.dataclass(frozen=True)
class SerrinChecks:
    """Overdetermined-problem diagnostics on the solved boundary.

    unu_recip_h_l1 is None when mean curvature is not strictly positive.
    support_min is the minimum of <x - center, nu>, positive for domains
    star-shaped about their center.
    """

    unu_recip_h_l1: float | None
    fundamental2_residual_rel: float
    support_min: float
    unu_minus_r_l1: float
    unu_minus_r_l2: float
    unu_minus_r_max: float


def serrin_checks(field: TorsionField, trace: BoundaryTrace, summary: GeometrySummary) -> SerrinChecks:
    u_nu = boundary_normal_derivative(field, trace.thetas)
    w = trace.weights
    h_curv = trace.curvatures
    r_ref = summary.R_ref
    scale = _DIM * summary.area

    if float(np.min(h_curv)) > 0.0:
        l1 = float(np.sum(w * np.abs(u_nu - 1.0 / h_curv)))
    else:
        l1 = None

    dr = cs_deficit(field)
    lhs = dr.cs_deficit / (_DIM - 1)
    rhs = float(np.sum(w * (1.0 - h_curv * u_nu) * u_nu))
    fund2 = abs(lhs - rhs) / max(abs(lhs), abs(rhs), scale)

    center = field.mesh.domain.center
    x_nu = np.einsum("ic,ic->i", trace.points - center[None, :], trace.normals)
    diff = u_nu - r_ref
    return SerrinChecks(
        unu_recip_h_l1=l1,
        fundamental2_residual_rel=fund2,
        support_min=float(np.min(x_nu)),
        unu_minus_r_l1=float(np.sum(w * np.abs(diff))),
        unu_minus_r_l2=float(np.sqrt(np.sum(w * diff * diff))),
        unu_minus_r_max=float(np.max(np.abs(diff))),
    )
