"""Quadratic finite elements on structured polar meshes.

The torsion problem laplace(u) = 2, u = 0 on the boundary is solved with P2
Lagrange triangles.  Cells touching the boundary are isoparametric: the
midside node of a boundary edge sits on the true curve, so the geometric
consistency error drops to the level needed for the tight disk and ellipse
benchmarks.  Interior cells keep affine maps (midside nodes at segment
midpoints).  The linear system is solved by diagonally preconditioned
conjugate gradients on a scipy CSR matrix.
"""
from __future__ import annotations

import dataclasses
import json

import numpy as np
import scipy.sparse as sp

from .geometry import StarDomain


class MeshError(ValueError):
    """Degenerate or inconsistent mesh data."""


class SolverError(RuntimeError):
    """Iterative solver failed to reach tolerance; carries the residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


# -- P2 reference element ----------------------------------------------------
# node order: vertices 0,1,2 then midsides of edges (0,1), (1,2), (2,0)

_REF_NODES = np.array(
    [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]]
)

# second derivatives of the shape functions in reference coords (constant)
_D2N = np.array(
    [
        [[4.0, 4.0], [4.0, 4.0]],
        [[4.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [0.0, 4.0]],
        [[-8.0, -4.0], [-4.0, 0.0]],
        [[0.0, 4.0], [4.0, 0.0]],
        [[0.0, -4.0], [-4.0, -8.0]],
    ]
)


def _shape(pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    xi, eta = pts[..., 0], pts[..., 1]
    lam = 1.0 - xi - eta
    return np.stack(
        [
            lam * (2.0 * lam - 1.0),
            xi * (2.0 * xi - 1.0),
            eta * (2.0 * eta - 1.0),
            4.0 * lam * xi,
            4.0 * xi * eta,
            4.0 * eta * lam,
        ],
        axis=-1,
    )


def _dshape(pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    xi, eta = pts[..., 0], pts[..., 1]
    lam = 1.0 - xi - eta
    zero = np.zeros_like(xi)
    dx = np.stack(
        [1.0 - 4.0 * lam, 4.0 * xi - 1.0, zero, 4.0 * (lam - xi), 4.0 * eta, -4.0 * eta],
        axis=-1,
    )
    dy = np.stack(
        [1.0 - 4.0 * lam, zero, 4.0 * eta - 1.0, -4.0 * xi, 4.0 * xi, 4.0 * (lam - eta)],
        axis=-1,
    )
    return np.stack([dx, dy], axis=-1)


# 7-point degree-5 rule; weights sum to 1, reference area factor 1/2 applied
# at assembly time
_QW = np.array(
    [0.225]
    + [0.132394152788506] * 3
    + [0.125939180544827] * 3
)
_QA1, _QB1 = 0.059715871789770, 0.470142064105115
_QA2, _QB2 = 0.797426985353087, 0.101286507323456
_QP = np.array(
    [
        [1.0 / 3.0, 1.0 / 3.0],
        [_QB1, _QB1],
        [_QA1, _QB1],
        [_QB1, _QA1],
        [_QB2, _QB2],
        [_QA2, _QB2],
        [_QB2, _QA2],
    ]
)
_N_AT_QP = _shape(_QP)          # (7, 6)
_DN_AT_QP = _dshape(_QP)        # (7, 6, 2)
_DN_AT_NODES = _dshape(_REF_NODES)  # (6, 6, 2)


# -- mesh --------------------------------------------------------------------


@dataclasses.dataclass(frozen=True, eq=False)
class TriMesh:
    """Structured polar triangulation of a star-shaped domain.

    vertices[0] is the center; vertex 1 + (j-1)*n_angular + i sits at radial
    fraction radial_fractions[j-1] of rho(theta_i).  boundary_edges pair with
    boundary_thetas giving the theta parameters of each edge's endpoints.
    h is the longest edge.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_thetas: np.ndarray
    h: float
    n_radial: int
    n_angular: int
    radial_fractions: np.ndarray
    domain: StarDomain


def generate_mesh(domain: StarDomain, n_radial: int, n_angular: int, grading: float = 1.2) -> TriMesh:
    """Fan-plus-rings triangulation, radially graded toward the boundary.

    The grading ratio is the total center-to-boundary spacing ratio; per-step
    spacing shrinks geometrically so that the first (center) spacing is
    ``grading`` times the last (boundary) one.  Counts: 1 + n_radial*n_angular
    vertices and n_angular*(2*n_radial - 1) positively oriented triangles.
    """
    if n_radial < 4:
        raise MeshError("n_radial must be >= 4, got %d" % n_radial)
    if n_angular < 16 or n_angular % 4 != 0:
        raise MeshError("n_angular must be a multiple of 4 and >= 16, got %d" % n_angular)
    if grading < 1.0:
        raise MeshError("grading must be >= 1, got %g" % grading)

    q = grading ** (1.0 / (n_radial - 1)) if n_radial > 1 else 1.0
    spacing = q ** (-np.arange(n_radial, dtype=float))
    s = np.cumsum(spacing) / np.sum(spacing)
    s[-1] = 1.0

    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    rho = domain.radius(theta)
    ct, st = np.cos(theta), np.sin(theta)

    nv = 1 + n_radial * n_angular
    verts = np.empty((nv, 2))
    verts[0] = domain.center
    for j in range(n_radial):
        lo = 1 + j * n_angular
        verts[lo : lo + n_angular, 0] = domain.center[0] + s[j] * rho * ct
        verts[lo : lo + n_angular, 1] = domain.center[1] + s[j] * rho * st

    def vid(i: int, j: int) -> int:
        return 1 + (j - 1) * n_angular + (i % n_angular)

    tris = []
    for i in range(n_angular):
        tris.append((0, vid(i, 1), vid(i + 1, 1)))
    for j in range(1, n_radial):
        for i in range(n_angular):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, d, c))
            tris.append((a, c, b))
    triangles = np.asarray(tris, dtype=np.int64)

    p = verts[triangles]
    signed = 0.5 * (
        (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
        - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
    )
    if np.any(signed <= 0.0):
        raise MeshError("mesh has a degenerate or inverted triangle")

    bedges = np.asarray([(vid(i, n_radial), vid(i + 1, n_radial)) for i in range(n_angular)], dtype=np.int64)
    dtheta = 2.0 * np.pi / n_angular
    bthetas = np.asarray([(i * dtheta, (i + 1) * dtheta) for i in range(n_angular)])

    edge_vec = np.concatenate(
        [p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]]
    )
    h = float(np.max(np.hypot(edge_vec[:, 0], edge_vec[:, 1])))
    return TriMesh(
        vertices=verts,
        triangles=triangles,
        boundary_edges=bedges,
        boundary_thetas=bthetas,
        h=h,
        n_radial=n_radial,
        n_angular=n_angular,
        radial_fractions=s,
        domain=domain,
    )


# -- P2 space ----------------------------------------------------------------


class _P2Space:
    """Node table for P2 elements; boundary midside nodes sit on the curve."""

    def __init__(self, mesh: TriMesh):
        self.mesh = mesh
        tris = mesh.triangles
        nv = mesh.vertices.shape[0]
        nt = tris.shape[0]

        edge_id: dict[tuple[int, int], int] = {}
        tri_nodes = np.empty((nt, 6), dtype=np.int64)
        tri_nodes[:, :3] = tris
        edge_locals = ((0, 1), (1, 2), (2, 0))
        edge_tri: dict[tuple[int, int], tuple[int, int]] = {}
        for t in range(nt):
            for le, (la, lb) in enumerate(edge_locals):
                a, b = int(tris[t, la]), int(tris[t, lb])
                key = (a, b) if a < b else (b, a)
                eid = edge_id.get(key)
                if eid is None:
                    eid = len(edge_id)
                    edge_id[key] = eid
                    edge_tri[key] = (t, le)
                tri_nodes[t, 3 + le] = nv + eid

        n_nodes = nv + len(edge_id)
        node_xy = np.empty((n_nodes, 2))
        node_xy[:nv] = mesh.vertices
        for (a, b), eid in edge_id.items():
            node_xy[nv + eid] = 0.5 * (mesh.vertices[a] + mesh.vertices[b])

        # curve the boundary midside nodes and record the boundary element map
        dirichlet = np.zeros(n_nodes, dtype=bool)
        n_b = mesh.boundary_edges.shape[0]
        self.b_tri = np.empty(n_b, dtype=np.int64)
        self.b_local = np.empty(n_b, dtype=np.int64)   # local edge id in its triangle
        self.b_forward = np.empty(n_b, dtype=bool)
        for i, (pq, th) in enumerate(zip(mesh.boundary_edges, mesh.boundary_thetas)):
            a, b = int(pq[0]), int(pq[1])
            key = (a, b) if a < b else (b, a)
            t, le = edge_tri[key]
            mid = nv + edge_id[key]
            node_xy[mid] = mesh.domain.point(0.5 * (th[0] + th[1]))
            dirichlet[[a, b, mid]] = True
            self.b_tri[i] = t
            self.b_local[i] = le
            self.b_forward[i] = int(tris[t, edge_locals[le][0]]) == a

        self.tri_nodes = tri_nodes
        self.node_xy = node_xy
        self.n_nodes = n_nodes
        self.n_vertices = nv
        self.dirichlet = dirichlet
        self.coords = node_xy[tri_nodes]          # (nt, 6, 2)

    def jacobians(self, dn: np.ndarray):
        """J, detJ, invJ at one reference point for every element.

        dn has shape (6, 2) or (nt, 6, 2) for per-element reference points.
        """
        if dn.ndim == 2:
            jac = np.einsum("tkc,kd->tcd", self.coords, dn)
        else:
            jac = np.einsum("tkc,tkd->tcd", self.coords, dn)
        det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
        if np.any(det <= 0.0):
            raise MeshError("non-positive Jacobian in element map")
        inv = np.empty_like(jac)
        inv[:, 0, 0] = jac[:, 1, 1]
        inv[:, 0, 1] = -jac[:, 0, 1]
        inv[:, 1, 0] = -jac[:, 1, 0]
        inv[:, 1, 1] = jac[:, 0, 0]
        inv /= det[:, None, None]
        return jac, det, inv

    def ref_point_on_boundary(self, sector: np.ndarray, tau: np.ndarray) -> np.ndarray:
        """Reference coords of the boundary point at edge fraction tau."""
        edge_locals = np.array(((0, 1), (1, 2), (2, 0)))
        la = edge_locals[self.b_local[sector], 0]
        lb = edge_locals[self.b_local[sector], 1]
        tt = np.where(self.b_forward[sector], tau, 1.0 - tau)
        ref_v = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        return ref_v[la] * (1.0 - tt)[:, None] + ref_v[lb] * tt[:, None]


def _pcg(a_mat, b: np.ndarray, rtol: float, max_iter: int):
    """Jacobi-preconditioned conjugate gradients; returns (x, relres, iters)."""
    diag = a_mat.diagonal()
    if np.any(diag <= 0.0):
        raise SolverError("stiffness diagonal not positive", residual=np.inf)
    minv = 1.0 / diag
    bnorm = float(np.linalg.norm(b))
    x = np.zeros_like(b)
    if bnorm == 0.0:
        return x, 0.0, 0
    r = b.copy()
    z = minv * r
    p = z.copy()
    rz = float(r @ z)
    for it in range(1, max_iter + 1):
        ap = a_mat @ p
        alpha = rz / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        rn = float(np.linalg.norm(r))
        if rn <= rtol * bnorm:
            return x, rn / bnorm, it
        z = minv * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverError(
        "conjugate gradients hit the iteration cap %d with relative residual %.3e" % (max_iter, rn / bnorm),
        residual=rn / bnorm,
    )


@dataclasses.dataclass(eq=False)
class TorsionField:
    """Discrete torsion function with recovered derivatives.

    u, grad, hess hold nodal values at all P2 nodes (vertices first).  u_nu
    holds the outward normal derivative at the boundary node parameters
    boundary_node_thetas.  Quadrature-point caches (qp_*) back the volume
    integrals used by the identity checks.
    """

    mesh: TriMesh
    u: np.ndarray
    grad: np.ndarray
    hess: np.ndarray
    boundary_node_thetas: np.ndarray
    u_nu: np.ndarray
    M: float
    min_points: np.ndarray
    residual_norm: float
    iterations: int
    area: float
    qp_points: np.ndarray
    qp_weights: np.ndarray
    qp_u: np.ndarray
    qp_grad: np.ndarray
    qp_hess: np.ndarray
    space: "_P2Space"


def _element_fields(space: _P2Space, u_full: np.ndarray):
    """Per-quadrature-point u, gradient, Hessian, positions, weights."""
    coords = space.coords
    u_el = u_full[space.tri_nodes]
    nt = coords.shape[0]
    href = np.einsum("tk,kde->tde", u_el, _D2N)          # reference Hessian, constant
    cmap = np.einsum("tkc,kde->tcde", coords, _D2N)      # map curvature terms
    qp_xy = np.einsum("tkc,qk->tqc", coords, _N_AT_QP)
    qp_u = np.einsum("tk,qk->tq", u_el, _N_AT_QP)
    qp_w = np.empty((nt, 7))
    qp_g = np.empty((nt, 7, 2))
    qp_h = np.empty((nt, 7, 2, 2))
    for qi in range(7):
        _, det, inv = space.jacobians(_DN_AT_QP[qi])
        qp_w[:, qi] = 0.5 * _QW[qi] * det
        gref = np.einsum("tk,kd->td", u_el, _DN_AT_QP[qi])
        g = np.einsum("td,tdc->tc", gref, inv)
        qp_g[:, qi] = g
        tmp = href - np.einsum("tc,tcde->tde", g, cmap)
        qp_h[:, qi] = np.einsum("tdc,tde,tef->tcf", inv, tmp, inv)
    return qp_xy, qp_w, qp_u, qp_g, qp_h, href, cmap, u_el


def _recover_nodal(space: _P2Space, u_el: np.ndarray, href: np.ndarray, cmap: np.ndarray, areas: np.ndarray):
    """Area-weighted nodal averaging of per-element derivative evaluations."""
    nn = space.n_nodes
    grad = np.zeros((nn, 2))
    hess = np.zeros((nn, 2, 2))
    wsum = np.zeros(nn)
    for k in range(6):
        _, _, inv = space.jacobians(_DN_AT_NODES[k])
        gref = np.einsum("tk,kd->td", u_el, _DN_AT_NODES[k])
        g = np.einsum("td,tdc->tc", gref, inv)
        tmp = href - np.einsum("tc,tcde->tde", g, cmap)
        hx = np.einsum("tdc,tde,tef->tcf", inv, tmp, inv)
        idx = space.tri_nodes[:, k]
        np.add.at(grad, idx, areas[:, None] * g)
        np.add.at(hess, idx, areas[:, None, None] * hx)
        np.add.at(wsum, idx, areas)
    grad /= wsum[:, None]
    hess /= wsum[:, None, None]
    return grad, hess


def _outward_normals(domain: StarDomain, theta: np.ndarray) -> np.ndarray:
    rho = domain.radius(theta)
    d1 = domain.radius_d1(theta)
    ct, st = np.cos(theta), np.sin(theta)
    speed = np.sqrt(rho * rho + d1 * d1)
    return np.stack([(rho * ct + d1 * st) / speed, (rho * st - d1 * ct) / speed], axis=-1)


def _boundary_gradient(space: _P2Space, u_full: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Gradient of the FE solution at boundary parameters theta (one-sided)."""
    mesh = space.mesh
    thetas = np.asarray(thetas, dtype=float)
    two_pi = 2.0 * np.pi
    wrapped = np.mod(thetas, two_pi)
    dtheta = two_pi / mesh.n_angular
    sector = np.minimum((wrapped / dtheta).astype(np.int64), mesh.n_angular - 1)
    tau = wrapped / dtheta - sector
    # clamp round-off spill to the sector edges
    tau = np.clip(tau, 0.0, 1.0)
    refs = space.ref_point_on_boundary(sector, tau)
    els = space.b_tri[sector]
    coords = space.coords[els]
    u_el = u_full[space.tri_nodes[els]]
    dn = _dshape(refs)                                  # (m, 6, 2)
    jac = np.einsum("mkc,mkd->mcd", coords, dn)
    det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
    inv = np.empty_like(jac)
    inv[:, 0, 0] = jac[:, 1, 1]
    inv[:, 0, 1] = -jac[:, 0, 1]
    inv[:, 1, 0] = -jac[:, 1, 0]
    inv[:, 1, 1] = jac[:, 0, 0]
    inv /= det[:, None, None]
    gref = np.einsum("mk,mkd->md", u_el, dn)
    return np.einsum("md,mdc->mc", gref, inv)


def _min_points(space: _P2Space, u_full: np.ndarray) -> np.ndarray:
    """Locations of the interior minima, refined by local quadratic fits.

    Nodes within 1e-9 * max|u| of the global minimum are clustered by
    element adjacency; each cluster contributes one refined location from a
    least-squares quadratic on its two-ring node patch.
    """
    umax = float(np.max(np.abs(u_full)))
    umin = float(np.min(u_full))
    tol = 1e-9 * umax
    cand = np.nonzero(u_full <= umin + tol)[0]
    cand_set = set(int(c) for c in cand)

    node_els: dict[int, list[int]] = {}
    for t, nodes in enumerate(space.tri_nodes):
        for nd in nodes:
            nd = int(nd)
            if nd in cand_set:
                node_els.setdefault(nd, []).append(t)

    # connected components through shared elements
    parent = {c: c for c in cand_set}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t in set(t for lst in node_els.values() for t in lst):
        members = [int(nd) for nd in space.tri_nodes[t] if int(nd) in cand_set]
        for m in members[1:]:
            ra, rb = find(members[0]), find(m)
            if ra != rb:
                parent[rb] = ra

    comps: dict[int, list[int]] = {}
    for c in cand_set:
        comps.setdefault(find(c), []).append(c)

    tris_of_node: dict[int, list[int]] = {}
    for t, nodes in enumerate(space.tri_nodes):
        for nd in nodes:
            tris_of_node.setdefault(int(nd), []).append(t)

    out = []
    for comp in comps.values():
        seed = min(comp, key=lambda c: (u_full[c], c))
        ring = set(comp)
        for _ in range(2):
            grown = set(ring)
            for nd in ring:
                for t in tris_of_node.get(nd, []):
                    grown.update(int(x) for x in space.tri_nodes[t])
            ring = grown
        patch = np.asarray(sorted(ring), dtype=np.int64)
        xy = space.node_xy[patch] - space.node_xy[seed]
        scale = max(float(np.max(np.abs(xy))), 1e-30)
        xs, ys = xy[:, 0] / scale, xy[:, 1] / scale
        design = np.column_stack([np.ones_like(xs), xs, ys, xs * xs, xs * ys, ys * ys])
        coef, *_ = np.linalg.lstsq(design, u_full[patch], rcond=None)
        hess = np.array([[2.0 * coef[3], coef[4]], [coef[4], 2.0 * coef[5]]])
        z = space.node_xy[seed].copy()
        det = np.linalg.det(hess)
        if det > 0.0 and hess[0, 0] > 0.0:
            step = np.linalg.solve(hess, -coef[1:3])
            if float(np.hypot(*step)) <= 2.0:
                z = space.node_xy[seed] + scale * step
        out.append(z)
    out.sort(key=lambda v: (v[0], v[1]))
    return np.asarray(out)


def solve_torsion(mesh: TriMesh, rtol: float = 1e-10, max_iter: int | None = None) -> TorsionField:
    """Solve laplace(u) = 2 with u = 0 on the boundary; recover derivatives.

    The iteration cap defaults to 50 sqrt(ndof).  Raises SolverError when the
    cap is reached before the relative residual drops below rtol.
    """
    space = _P2Space(mesh)
    nt = space.tri_nodes.shape[0]

    ke = np.zeros((nt, 6, 6))
    fe = np.zeros((nt, 6))
    for qi in range(7):
        _, det, inv = space.jacobians(_DN_AT_QP[qi])
        gp = np.einsum("kd,tdc->tkc", _DN_AT_QP[qi], inv)
        ke += 0.5 * _QW[qi] * det[:, None, None] * np.einsum("tkc,tlc->tkl", gp, gp)
        fe += 0.5 * _QW[qi] * det[:, None] * (-2.0) * _N_AT_QP[qi][None, :]

    rows = np.broadcast_to(space.tri_nodes[:, :, None], (nt, 6, 6)).ravel()
    cols = np.broadcast_to(space.tri_nodes[:, None, :], (nt, 6, 6)).ravel()
    a_full = sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(space.n_nodes, space.n_nodes)).tocsr()
    f_full = np.zeros(space.n_nodes)
    np.add.at(f_full, space.tri_nodes.ravel(), fe.ravel())

    interior = np.nonzero(~space.dirichlet)[0]
    a_in = a_full[interior, :][:, interior]
    b_in = f_full[interior]
    if max_iter is None:
        max_iter = int(50 * np.sqrt(interior.size)) + 10
    x, relres, iters = _pcg(a_in, b_in, rtol=rtol, max_iter=max_iter)

    u_full = np.zeros(space.n_nodes)
    u_full[interior] = x

    qp_xy, qp_w, qp_u, qp_g, qp_h, href, cmap, u_el = _element_fields(space, u_full)
    areas = np.sum(qp_w, axis=1)
    grad, hess = _recover_nodal(space, u_el, href, cmap, areas)

    # boundary node parameters: edge endpoints and curved midsides
    n_b = mesh.boundary_edges.shape[0]
    th0 = mesh.boundary_thetas[:, 0]
    th1 = mesh.boundary_thetas[:, 1]
    bn_thetas = np.sort(np.concatenate([th0, 0.5 * (th0 + th1)]))
    bgrad = _boundary_gradient(space, u_full, bn_thetas)
    u_nu = np.einsum("mc,mc->m", bgrad, _outward_normals(mesh.domain, bn_thetas))

    m_const = max(
        float(np.max(np.hypot(qp_g[..., 0], qp_g[..., 1]))),
        float(np.max(np.hypot(grad[:, 0], grad[:, 1]))),
        float(np.max(np.hypot(bgrad[:, 0], bgrad[:, 1]))),
    )

    return TorsionField(
        mesh=mesh,
        u=u_full,
        grad=grad,
        hess=hess,
        boundary_node_thetas=bn_thetas,
        u_nu=u_nu,
        M=m_const,
        min_points=_min_points(space, u_full),
        residual_norm=relres,
        iterations=iters,
        area=float(np.sum(qp_w)),
        qp_points=qp_xy,
        qp_weights=qp_w,
        qp_u=qp_u,
        qp_grad=qp_g,
        qp_hess=qp_h,
        space=space,
    )


def boundary_normal_derivative(field: TorsionField, thetas: np.ndarray) -> np.ndarray:
    """u_nu at arbitrary boundary parameters (analytic outward normals)."""
    g = _boundary_gradient(field.space, field.u, thetas)
    nu = _outward_normals(field.mesh.domain, np.asarray(thetas, dtype=float))
    return np.einsum("mc,mc->m", g, nu)


def harmonic_deficit_field(field: TorsionField, z, a: float):
    """Nodal h = q - u for q = (|x - z|^2 - a)/2, plus int |hess h|^2.

    h is harmonic exactly when u is the true torsion function; the returned
    integral of |I - hess u|^2 over the domain measures the Cauchy-Schwarz
    deficit in its Hessian form.
    """
    z = np.asarray(z, dtype=float)
    xy = field.space.node_xy
    d = xy - z[None, :]
    h = 0.5 * (np.einsum("ic,ic->i", d, d) - a) - field.u
    grad_h = d - field.grad
    eye = np.eye(2)
    dev = eye[None, None, :, :] - field.qp_hess
    hess_sq = float(np.sum(field.qp_weights * np.einsum("tqcd,tqcd->tq", dev, dev)))
    return h, grad_h, hess_sq


def eval_at_points(field: TorsionField, pts: np.ndarray):
    """Evaluate (u, grad u) at interior points by structured element lookup."""
    mesh = field.mesh
    space = field.space
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    n_a, n_r = mesh.n_angular, mesh.n_radial
    s_grid = mesh.radial_fractions
    vals = np.empty(pts.shape[0])
    grads = np.empty((pts.shape[0], 2))

    def candidates(p: np.ndarray) -> list[int]:
        rel = p - mesh.domain.center
        th = np.mod(np.arctan2(rel[1], rel[0]), 2.0 * np.pi)
        sec = min(int(th * n_a / (2.0 * np.pi)), n_a - 1)
        rho = float(mesh.domain.radius(np.asarray(th)))
        frac = np.hypot(rel[0], rel[1]) / rho
        block = min(int(np.searchsorted(s_grid, frac, side="right")), n_r - 1)
        cand = []
        for b in (block, max(block - 1, 0), min(block + 1, n_r - 1)):
            for si in (sec, (sec - 1) % n_a, (sec + 1) % n_a):
                if b == 0:
                    cand.append(si)
                else:
                    start = n_a + (b - 1) * 2 * n_a
                    cand.extend((start + 2 * si, start + 2 * si + 1))
        seen = set()
        return [c for c in cand if not (c in seen or seen.add(c))]

    def invert(t: int, p: np.ndarray):
        nodes = space.tri_nodes[t]
        cxy = space.node_xy[nodes]
        v0, v1, v2 = cxy[0], cxy[1], cxy[2]
        amat = np.column_stack([v1 - v0, v2 - v0])
        try:
            ref = np.linalg.solve(amat, p - v0)
        except np.linalg.LinAlgError:
            return None
        for _ in range(30):
            shp = _shape(ref)
            x = shp @ cxy
            r = x - p
            if float(np.hypot(*r)) < 1e-13 * (1.0 + float(np.hypot(*p))):
                break
            dn = _dshape(ref)
            jac = np.einsum("kc,kd->cd", cxy, dn)
            try:
                ref = ref - np.linalg.solve(jac, r)
            except np.linalg.LinAlgError:
                return None
        eps = 1e-9
        if ref[0] < -eps or ref[1] < -eps or ref[0] + ref[1] > 1.0 + eps:
            return None
        return ref

    for ip, p in enumerate(pts):
        found = False
        for t in candidates(p):
            ref = invert(t, p)
            if ref is None:
                continue
            nodes = space.tri_nodes[t]
            u_el = field.u[nodes]
            shp = _shape(ref)
            dn = _dshape(ref)
            cxy = space.node_xy[nodes]
            jac = np.einsum("kc,kd->cd", cxy, dn)
            inv = np.linalg.inv(jac)
            vals[ip] = float(shp @ u_el)
            grads[ip] = (u_el @ dn) @ inv
            found = True
            break
        if not found:
            raise MeshError("point %s not located in the mesh" % (p,))
    return vals, grads


def domain_quadrature(mesh: TriMesh):
    """Quadrature points and weights covering the (curved-cell) domain."""
    space = _P2Space(mesh)
    nt = space.tri_nodes.shape[0]
    qp_xy = np.einsum("tkc,qk->tqc", space.coords, _N_AT_QP)
    qp_w = np.empty((nt, 7))
    for qi in range(7):
        _, det, _ = space.jacobians(_DN_AT_QP[qi])
        qp_w[:, qi] = 0.5 * _QW[qi] * det
    return qp_xy.reshape(-1, 2), qp_w.ravel()


def dump_solution(field: TorsionField, path: str) -> None:
    """Write vertices, triangles, and vertex values of u as plain JSON."""
    nv = field.mesh.vertices.shape[0]
    payload = {
        "vertices": [[float(x), float(y)] for x, y in field.mesh.vertices],
        "triangles": [[int(a), int(b), int(c)] for a, b, c in field.mesh.triangles],
        "u": [float(v) for v in field.u[:nv]],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")
