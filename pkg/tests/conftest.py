"""Shared solves for the test suite.

The torsion solves dominate test runtime, so the three reference domains and
the perturbation sweep are solved once per session and shared.
"""
import numpy as np
import pytest

from bubblestab import geometry, stability

STANDARD = dict(
    n_radial=32,
    n_angular=128,
    n_trace=1024,
    theorems=stability.THEOREMS,
    params=stability.StabilityParams(sobolev_c=1.0),
    branches=("high_dim", "low_dim"),
)

SWEEP_T = tuple(round(0.01 * k, 2) for k in range(1, 11))


def cos3_domain(t):
    return geometry.StarDomain(
        base_radius=1.0,
        cos_coeffs=np.array([0.0, 0.0, t]),
        sin_coeffs=np.zeros(0),
        center=np.zeros(2),
    )


@pytest.fixture(scope="session")
def disk_analysis():
    return stability.analyze_domain(geometry.StarDomain.disk(), **STANDARD)


@pytest.fixture(scope="session")
def ellipse_analysis():
    return stability.analyze_domain(geometry.StarDomain.ellipse(1.5, 1.0), **STANDARD)


@pytest.fixture(scope="session")
def cos3_analysis():
    return stability.analyze_domain(cos3_domain(0.05), **STANDARD)


@pytest.fixture(scope="session")
def sweep_analyses():
    """(t, DomainAnalysis) for the cos3 family, main theorem only."""
    kw = dict(STANDARD)
    kw["theorems"] = ("main",)
    kw["branches"] = ("high_dim",)
    return [(t, stability.analyze_domain(cos3_domain(t), **kw)) for t in SWEEP_T]
