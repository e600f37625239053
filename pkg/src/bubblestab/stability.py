"""Explicit stability constants and radii-pinching checks.

Each theorem variant bounds rho_e - rho_i (circumscribed minus inscribed
touching radius about a distinguished point z) by C * deviation^tau, where
the deviation measures how far the boundary is from constant mean curvature:

  main        L1 norm of H0 - H                     z = torsion minimum
  main_cm     same, center-of-mass normalization    z = center of mass
  hk          the Heintze-Karcher deficit           z = torsion minimum
  mean_convex sup |H0 - H| (needs min H > 0)        z = torsion minimum
  obvp        L1 norm of u_nu - 1/H                 z = torsion minimum

The high-dimension branch carries tau = 1/(N+2) plus an explicit smallness
threshold eps on the deviation; when the deviation exceeds eps the trivial
bound rho_e - rho_i <= diameter is reported as a flagged fallback.  The
low-dimension branch (tau = 1/2) needs a user-supplied embedding constant.
All composed factors are exposed in constants_trace.
"""
from __future__ import annotations

import dataclasses

import numpy as np

from .fem import TorsionField, boundary_normal_derivative, generate_mesh, solve_torsion
from .geometry import (
    BoundaryTrace,
    GeometrySummary,
    StarDomain,
    boundary_trace,
    geometry_summary,
    rho_bounds,
)
from .oracles import GradientBounds, gradient_bounds
from .spectral import SpectralEstimate, mu2_lower_convex, spectral_estimate, unit_ball_volume

_DIM = 2

THEOREMS = ("main", "main_cm", "hk", "mean_convex", "obvp")
BRANCHES = ("high_dim", "low_dim")


@dataclasses.dataclass(frozen=True)
class DeviationNorms:
    """Boundary deviation measures entering the stability bounds.

    hk_deficit and obvp_l1 need strictly positive mean curvature and are None
    otherwise.  min_h is the minimum of H over the trace.
    """

    h0_minus_h_l1: float
    h0_minus_h_plus_l1: float
    h0_minus_h_inf: float
    min_h: float
    hk_deficit: float | None
    obvp_l1: float | None


def deviation_norms(trace: BoundaryTrace, field: TorsionField, summary: GeometrySummary) -> DeviationNorms:
    h = trace.curvatures
    w = trace.weights
    h0 = summary.H0
    diff = h0 - h
    min_h = float(np.min(h))
    if min_h > 0.0:
        hk = float(np.sum(w / h)) - _DIM * summary.area
        u_nu = boundary_normal_derivative(field, trace.thetas)
        obvp = float(np.sum(w * np.abs(u_nu - 1.0 / h)))
    elif min_h == 0.0:
        # H touches zero: the surface integral of 1/H diverges, so the
        # Heintze-Karcher deficit is +inf, not undefined.
        hk = float("inf")
        obvp = float("inf")
    else:
        hk = None
        obvp = None
    return DeviationNorms(
        h0_minus_h_l1=float(np.sum(w * np.abs(diff))),
        h0_minus_h_plus_l1=float(np.sum(w * np.maximum(diff, 0.0))),
        h0_minus_h_inf=float(np.max(np.abs(diff))),
        min_h=min_h,
        hk_deficit=hk,
        obvp_l1=obvp,
    )


def a_constant(dim: int) -> float:
    """Interpolation constant a_N = 2^(2+N/(N+2)) (N+2) / N^(N/(N+2)) * omega^(1/N-1/(N+2))."""
    n = float(dim)
    p = n / (n + 2.0)
    return float(2.0 ** (2.0 + p) * (n + 2.0) / n**p * unit_ball_volume(dim) ** (1.0 / n - 1.0 / (n + 2.0)))


def _alpha_constant(dim: int, cubed: bool) -> float:
    n = float(dim)
    denom = (n**3 if cubed else n**2) * 4.0 ** (n + 1.0) * (n - 1.0)
    return unit_ball_volume(dim) / denom


@dataclasses.dataclass(frozen=True)
class StabilityParams:
    """User-tunable inputs to the constant assembly.

    gamma is the free exponent of the low-dimension branch for N = 2 (any
    value in (0, 1)); sobolev_c is the embedding constant that branch needs
    and stays None to disable it; c0 scales the center-of-mass gradient
    bound; mu2 supplies a Neumann gap for non-convex domains.
    """

    gamma: float = 0.5
    sobolev_c: float | None = None
    c0: float = 1.0
    basis_degree: int = 12
    x0_policy: str = "min_point"
    mu2: float | None = None


@dataclasses.dataclass(frozen=True)
class StabilityReport:
    theorem: str
    branch: str
    tau: float
    deviation: float
    rho_i: float
    rho_e: float
    gap: float
    c_stab: float
    eps: float | None
    smallness_ok: bool
    bound_rhs: float
    holds: bool
    fallback: bool
    z: np.ndarray
    mu_source: str
    constants_trace: dict[str, float]


def assemble_constants(
    theorem: str,
    branch: str,
    summary: GeometrySummary,
    mu: float,
    m_grad: float,
    min_h: float,
    params: StabilityParams,
):
    """(C, eps, trace) for one theorem variant and branch.

    mu is the harmonic-Poincare constant in use, m_grad the gradient maximum,
    min_h the minimum boundary mean curvature (only mean_convex reads it).
    eps is None on the low-dimension branch (no smallness condition).
    """
    if theorem not in THEOREMS:
        raise ValueError("unknown theorem %r" % theorem)
    if branch not in BRANCHES:
        raise ValueError("unknown branch %r" % branch)
    n = float(_DIM)
    area = summary.area
    d = summary.diameter
    r_i = summary.r_interior
    r_e = summary.r_exterior
    a_n = a_constant(_DIM)
    c_n = 1.5 if _DIM == 2 else n / 2.0
    omega = unit_ball_volume(_DIM)
    tr: dict[str, float] = {
        "a_N": a_n,
        "c_N": c_n,
        "mu": mu,
        "M": m_grad,
        "area": area,
        "perimeter": summary.perimeter,
        "diameter": d,
        "r_interior": r_i,
        "r_exterior": r_e,
        "H0": summary.H0,
        "min_H": min_h,
    }

    if theorem == "mean_convex" and min_h <= 0.0:
        raise ValueError("mean_convex variant needs strictly positive boundary curvature")

    if branch == "high_dim":
        ex = 1.0 / (n + 2.0)
        if theorem in ("main", "main_cm"):
            k_n = a_n * (n - 1.0) ** ex * c_n
            c_stab = k_n * d * (d + r_e) / (mu ** (2.0 * ex) * area ** (1.0 / n) * r_e)
            alpha = _alpha_constant(_DIM, cubed=False)
            eps = alpha * mu * mu * r_i ** (n + 2.0)
        elif theorem == "hk":
            k_n = a_n * (n - 1.0) ** ex
            c_stab = k_n * m_grad ** (n * ex) / (mu ** (2.0 * ex) * area ** (1.0 / n))
            alpha = _alpha_constant(_DIM, cubed=False)
            eps = alpha * mu * mu * m_grad * m_grad * r_i ** (n + 2.0)
        elif theorem == "mean_convex":
            k_n = a_n * (n * (n - 1.0)) ** ex
            c_stab = k_n * m_grad ** (n * ex) / (
                mu ** (2.0 * ex) * area ** (1.0 / n - ex) * min_h**ex
            )
            alpha = _alpha_constant(_DIM, cubed=True)
            eps = alpha * (min_h / area) * mu * mu * m_grad * m_grad * r_i ** (n + 2.0)
        else:  # obvp
            k_n = a_n * (n - 1.0) ** ex
            c_stab = k_n * m_grad ** ((n + 1.0) * ex) / (
                mu ** (2.0 * ex) * area ** (1.0 / n) * r_i**ex
            )
            alpha = _alpha_constant(_DIM, cubed=False)
            eps = alpha * mu * mu * m_grad * r_i ** (n + 3.0)
        tr.update({"k_N": k_n, "alpha_N": alpha, "tau": ex})
        return c_stab, eps, tr

    # low-dimension branch: tau = 1/2, requires the embedding constant
    if params.sobolev_c is None:
        raise ValueError("low_dim branch requires params.sobolev_c")
    gamma = params.gamma if _DIM == 2 else 0.5
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1), got %g" % gamma)
    base = 2.0 * omega ** (1.0 / n) * params.sobolev_c * d**gamma * (1.0 + mu) / mu
    if theorem in ("main", "main_cm"):
        c_stab = base * np.sqrt(n - 1.0) * c_n * d * (d + r_e) / (area ** (1.0 / n) * r_e)
    elif theorem == "hk":
        c_stab = base * np.sqrt(n - 1.0) / area ** (1.0 / n)
    elif theorem == "mean_convex":
        c_stab = base * np.sqrt(n * (n - 1.0)) * area ** (0.5 - 1.0 / n) / np.sqrt(min_h)
    else:  # obvp
        c_stab = base * np.sqrt(n - 1.0) / area ** (1.0 / n) * np.sqrt(m_grad / r_i)
    tr.update({"gamma": gamma, "sobolev_c": params.sobolev_c, "tau": 0.5})
    return float(c_stab), None, tr


def check_stability(
    theorem: str,
    trace: BoundaryTrace,
    summary: GeometrySummary,
    field: TorsionField,
    spectral: SpectralEstimate,
    params: StabilityParams = StabilityParams(),
    branch: str = "high_dim",
) -> StabilityReport:
    """Evaluate one stability inequality on a solved domain.

    The harmonic-Poincare constant defaults to the explicit lower bound
    (conservative: it only weakens the inequality being verified) and falls
    back to the Galerkin upper estimate when no lower bound is available.
    """
    dev = deviation_norms(trace, field, summary)
    if theorem == "main_cm":
        z = summary.center_of_mass
    else:
        if field.min_points.size == 0:
            raise ValueError("field has no interior minimum point")
        z = field.min_points[0]
    rho_i, rho_e = rho_bounds(trace, z)
    gap = rho_e - rho_i

    if theorem in ("main", "main_cm"):
        deviation = dev.h0_minus_h_l1
    elif theorem == "hk":
        deviation = dev.hk_deficit
    elif theorem == "mean_convex":
        deviation = dev.h0_minus_h_inf
    elif theorem == "obvp":
        deviation = dev.obvp_l1
    else:
        raise ValueError("unknown theorem %r" % theorem)
    if deviation is None:
        raise ValueError("%s deviation undefined: boundary mean curvature is not positive" % theorem)

    if spectral.mu0_lower is not None:
        mu, mu_source = spectral.mu0_lower, "lower_bound"
    else:
        mu, mu_source = spectral.mu0_upper, "galerkin_upper"

    c_stab, eps, tr = assemble_constants(theorem, branch, summary, mu, field.M, dev.min_h, params)
    tau = tr["tau"]
    smallness_ok = True if eps is None else bool(deviation < eps)
    if smallness_ok:
        bound_rhs = c_stab * deviation**tau
        fallback = False
    else:
        bound_rhs = summary.diameter
        fallback = True
    return StabilityReport(
        theorem=theorem,
        branch=branch,
        tau=float(tau),
        deviation=float(deviation),
        rho_i=rho_i,
        rho_e=rho_e,
        gap=gap,
        c_stab=float(c_stab),
        eps=None if eps is None else float(eps),
        smallness_ok=smallness_ok,
        bound_rhs=float(bound_rhs),
        holds=bool(gap <= bound_rhs),
        fallback=fallback,
        z=np.array(z, dtype=float),
        mu_source=mu_source,
        constants_trace=tr,
    )


@dataclasses.dataclass(frozen=True)
class AggregateBall:
    """Touching radii about one interior minimum of the torsion function."""

    z: np.ndarray
    rho_i: float
    rho_e: float


def aggregate_report(field: TorsionField, trace: BoundaryTrace) -> list[AggregateBall]:
    """One (z, rho_i, rho_e) record per torsion minimum.

    Every boundary point lies outside B(z, rho_i) and inside B(z, rho_e) by
    construction on the trace used here; re-checking on a finer trace bounds
    the sampling error of the radii.
    """
    out = []
    for z in field.min_points:
        ri, re_ = rho_bounds(trace, z)
        out.append(AggregateBall(z=np.array(z, dtype=float), rho_i=ri, rho_e=re_))
    return out


def inclusion_margins(ball: AggregateBall, trace: BoundaryTrace) -> tuple[float, float]:
    """(inner, outer) slack of the ball radii against a trace.

    inner = min |x - z| - rho_i and outer = rho_e - max |x - z|; both are
    nonnegative when the radii genuinely pinch the boundary samples.
    """
    dist = np.hypot(trace.points[:, 0] - ball.z[0], trace.points[:, 1] - ball.z[1])
    return float(np.min(dist) - ball.rho_i), float(ball.rho_e - np.max(dist))


@dataclasses.dataclass(eq=False)
class DomainAnalysis:
    """Everything computed for one domain by analyze_domain."""

    domain: StarDomain
    trace: BoundaryTrace
    summary: GeometrySummary
    field: TorsionField
    spectral: SpectralEstimate
    grad_bounds: GradientBounds
    reports: list[StabilityReport]


def analyze_domain(
    domain: StarDomain,
    n_radial: int = 32,
    n_angular: int = 128,
    n_trace: int = 1024,
    theorems=("main",),
    params: StabilityParams = StabilityParams(),
    branches=("high_dim",),
) -> DomainAnalysis:
    """Full pipeline: mesh, solve, trace, spectral constants, stability checks."""
    trace = boundary_trace(domain, n_trace)
    summary = geometry_summary(domain, trace)
    mesh = generate_mesh(domain, n_radial, n_angular)
    field = solve_torsion(mesh)
    if params.x0_policy == "min_point":
        x0 = field.min_points[0] if field.min_points.size else domain.center
    elif params.x0_policy == "center_of_mass":
        x0 = summary.center_of_mass
    else:
        raise ValueError("x0_policy must be 'min_point' or 'center_of_mass', got %r" % params.x0_policy)
    if float(np.min(trace.curvatures)) > 0.0:
        mu2 = mu2_lower_convex(summary.diameter)
    else:
        mu2 = params.mu2
    spec = spectral_estimate(
        mesh,
        r_interior=summary.r_interior,
        area=summary.area,
        degree=params.basis_degree,
        x0=x0,
        mu2=mu2,
    )
    reports = []
    for theorem in theorems:
        for branch in branches:
            reports.append(check_stability(theorem, trace, summary, field, spec, params, branch))
    return DomainAnalysis(
        domain=domain,
        trace=trace,
        summary=summary,
        field=field,
        spectral=spec,
        grad_bounds=gradient_bounds(summary, dim=_DIM, c0=params.c0),
        reports=reports,
    )
