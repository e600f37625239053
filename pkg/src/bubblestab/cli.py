"""Config-driven command line front end.

Subcommands: verify (identity suites over refinement levels), sweep
(stability checks over a perturbation family), spectral, oracles, and
convergence (refinement study of the solver).  All outputs are deterministic:
floats are printed with 17 significant digits, rows keep input order, and no
timestamps or environment data enter the files.

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import fem, geometry, identities, oracles, spectral, stability


class ConfigError(Exception):
    """Malformed configuration; the message names the offending key."""


def _fmt(x) -> str:
    if x is None or isinstance(x, str):
        return x or ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _jsonify(obj):
    """Recursively convert numpy scalars/arrays and dataclasses for json.dump."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonify(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _write_json(path: str, payload) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonify(payload), fh, sort_keys=True, indent=1)
        fh.write("\n")


# -- config ------------------------------------------------------------------

_DEFAULTS = {
    "domain": {"base_radius": 1.0, "cos_coeffs": [], "sin_coeffs": [], "center": [0.0, 0.0]},
    "mesh": {"n_radial": 32, "n_angular": 128, "refinement_levels": 3},
    "theorems": ["main"],
    "outputs": {"csv_path": "sweep.csv", "json_path": "report.json"},
    "params": {
        "gamma": 0.5,
        "sobolev_c": None,
        "c0": 1.0,
        "basis_degree": 12,
        "x0_policy": "min_point",
        "mu2": None,
        "n_trace": 1024,
        "residual_threshold": 0.01,
    },
}


def _need(cond: bool, key: str, what: str):
    if not cond:
        raise ConfigError("config key '%s' %s" % (key, what))


def _number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v)


def load_config(path: str) -> dict:
    """Read, default-fill, and validate an experiment config."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise ConfigError("config %s is not valid JSON: %s" % (path, exc))
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")

    cfg = {}
    for section, defaults in _DEFAULTS.items():
        if isinstance(defaults, dict):
            got = raw.get(section, {})
            _need(isinstance(got, dict), section, "must be an object")
            merged = dict(defaults)
            merged.update(got)
            cfg[section] = merged
        else:
            cfg[section] = raw.get(section, defaults)
    if "sweep" in raw:
        _need(isinstance(raw["sweep"], dict), "sweep", "must be an object")
        cfg["sweep"] = dict({"parameter": "t", "mode_k": 3}, **raw["sweep"])

    dom = cfg["domain"]
    _need(_number(dom["base_radius"]) and dom["base_radius"] > 0, "domain.base_radius", "must be a positive number")
    for key in ("cos_coeffs", "sin_coeffs"):
        _need(isinstance(dom[key], list) and all(_number(v) for v in dom[key]), "domain.%s" % key, "must be a list of numbers")
    _need(
        isinstance(dom["center"], list) and len(dom["center"]) == 2 and all(_number(v) for v in dom["center"]),
        "domain.center",
        "must be a pair of numbers",
    )

    mesh = cfg["mesh"]
    _need(isinstance(mesh["n_radial"], int) and mesh["n_radial"] >= 4, "mesh.n_radial", "must be an integer >= 4")
    _need(
        isinstance(mesh["n_angular"], int) and mesh["n_angular"] >= 16 and mesh["n_angular"] % 4 == 0,
        "mesh.n_angular",
        "must be an integer multiple of 4, >= 16",
    )
    _need(
        isinstance(mesh["refinement_levels"], int) and mesh["refinement_levels"] >= 1,
        "mesh.refinement_levels",
        "must be an integer >= 1",
    )

    if "sweep" in cfg:
        sw = cfg["sweep"]
        _need("values" in sw, "sweep.values", "is required")
        vals = sw["values"]
        _need(isinstance(vals, list) and len(vals) > 0, "sweep.values", "must be a nonempty list")
        _need(all(_number(v) and v > 0 for v in vals), "sweep.values", "must contain positive numbers")
        _need(all(b > a for a, b in zip(vals, vals[1:])), "sweep.values", "must be strictly increasing")
        _need(isinstance(sw["mode_k"], int) and sw["mode_k"] >= 1, "sweep.mode_k", "must be an integer >= 1")

    _need(
        isinstance(cfg["theorems"], list)
        and len(cfg["theorems"]) > 0
        and all(t in stability.THEOREMS for t in cfg["theorems"]),
        "theorems",
        "must be a nonempty list drawn from %s" % (stability.THEOREMS,),
    )

    par = cfg["params"]
    _need(_number(par["gamma"]) and 0.0 < par["gamma"] < 1.0, "params.gamma", "must lie in (0, 1)")
    _need(par["sobolev_c"] is None or (_number(par["sobolev_c"]) and par["sobolev_c"] > 0), "params.sobolev_c", "must be null or positive")
    _need(_number(par["c0"]) and par["c0"] > 0, "params.c0", "must be positive")
    _need(isinstance(par["basis_degree"], int) and par["basis_degree"] >= 1, "params.basis_degree", "must be an integer >= 1")
    _need(par["x0_policy"] in ("min_point", "center_of_mass"), "params.x0_policy", "must be 'min_point' or 'center_of_mass'")
    _need(par["mu2"] is None or (_number(par["mu2"]) and par["mu2"] > 0), "params.mu2", "must be null or positive")
    _need(isinstance(par["n_trace"], int) and par["n_trace"] >= 64, "params.n_trace", "must be an integer >= 64")
    _need(_number(par["residual_threshold"]) and par["residual_threshold"] > 0, "params.residual_threshold", "must be positive")

    for key in ("csv_path", "json_path"):
        _need(isinstance(cfg["outputs"][key], str) and cfg["outputs"][key], "outputs.%s" % key, "must be a nonempty string")
    return cfg


def _domain_from_config(cfg: dict) -> geometry.StarDomain:
    dom = cfg["domain"]
    try:
        return geometry.StarDomain(
            base_radius=float(dom["base_radius"]),
            cos_coeffs=np.asarray(dom["cos_coeffs"], dtype=float),
            sin_coeffs=np.asarray(dom["sin_coeffs"], dtype=float),
            center=np.asarray(dom["center"], dtype=float),
        )
    except geometry.DomainError as exc:
        raise ConfigError("config key 'domain' invalid: %s" % exc)


def _params_from_config(cfg: dict) -> stability.StabilityParams:
    par = cfg["params"]
    return stability.StabilityParams(
        gamma=float(par["gamma"]),
        sobolev_c=None if par["sobolev_c"] is None else float(par["sobolev_c"]),
        c0=float(par["c0"]),
        basis_degree=int(par["basis_degree"]),
        x0_policy=str(par["x0_policy"]),
        mu2=None if par["mu2"] is None else float(par["mu2"]),
    )


def _out_path(out_dir: str, name: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


# -- subcommands -------------------------------------------------------------


def cmd_verify(cfg: dict, out_dir: str) -> int:
    domain = _domain_from_config(cfg)
    n_r = cfg["mesh"]["n_radial"]
    n_a = cfg["mesh"]["n_angular"]
    levels = cfg["mesh"]["refinement_levels"]
    n_trace = cfg["params"]["n_trace"]
    threshold = cfg["params"]["residual_threshold"]

    worst_finest = 0.0
    for lev in range(levels):
        mesh = fem.generate_mesh(domain, n_r * 2**lev, n_a * 2**lev)
        field = fem.solve_torsion(mesh)
        trace = geometry.boundary_trace(domain, max(n_trace, 4 * mesh.n_angular))
        summary = geometry.geometry_summary(domain, trace)
        reports = identities.identity_suite(field, trace, summary)
        deficit = identities.cs_deficit(field)
        serrin = identities.serrin_checks(field, trace, summary)
        payload = {
            "level": lev,
            "n_radial": mesh.n_radial,
            "n_angular": mesh.n_angular,
            "mesh_h": mesh.h,
            "solver_residual": field.residual_norm,
            "identities": reports,
            "deficit": deficit,
            "serrin": serrin,
        }
        _write_json(_out_path(out_dir, "verify_level%d.json" % lev), payload)
        if lev == levels - 1:
            worst_finest = max(
                (r.residual_rel for r in reports if r.applicable), default=0.0
            )
    print("verify: finest-level worst residual_rel = %s (threshold %s)" % (_fmt(worst_finest), _fmt(threshold)))
    return 0 if worst_finest <= threshold else 1


_CSV_COLUMNS = ("t", "dev_L1", "dev_inf", "rho_i", "rho_e", "gap", "C", "eps", "tau", "holds", "smallness_ok", "error")


def cmd_sweep(cfg: dict, out_dir: str) -> int:
    if "sweep" not in cfg:
        raise ConfigError("config key 'sweep' is required for the sweep command")
    base = _domain_from_config(cfg)
    params = _params_from_config(cfg)
    sw = cfg["sweep"]
    mode_k = sw["mode_k"]
    theorems = cfg["theorems"]
    n_r = cfg["mesh"]["n_radial"]
    n_a = cfg["mesh"]["n_angular"]
    n_trace = cfg["params"]["n_trace"]

    rows: list[dict] = []
    detail = []
    failed = False
    for t in sw["values"]:
        cos = np.zeros(mode_k)
        if base.cos_coeffs.size:
            cos[: base.cos_coeffs.size] = base.cos_coeffs[:mode_k]
        cos[mode_k - 1] = t
        try:
            domain = geometry.StarDomain(
                base_radius=base.base_radius,
                cos_coeffs=cos,
                sin_coeffs=base.sin_coeffs,
                center=base.center,
            )
            analysis = stability.analyze_domain(
                domain,
                n_radial=n_r,
                n_angular=n_a,
                n_trace=n_trace,
                theorems=theorems,
                params=params,
            )
        except Exception as exc:  # per-row failure lands in the error column
            for theorem in theorems:
                rows.append({"t": t, "error": "%s: %s" % (type(exc).__name__, exc)})
            failed = True
            continue
        dev = stability.deviation_norms(analysis.trace, analysis.field, analysis.summary)
        for rep in analysis.reports:
            rows.append(
                {
                    "t": t,
                    "dev_L1": dev.h0_minus_h_l1,
                    "dev_inf": dev.h0_minus_h_inf,
                    "rho_i": rep.rho_i,
                    "rho_e": rep.rho_e,
                    "gap": rep.gap,
                    "C": rep.c_stab,
                    "eps": rep.eps,
                    "tau": rep.tau,
                    "holds": rep.holds,
                    "smallness_ok": rep.smallness_ok,
                    "error": "",
                }
            )
            if not rep.holds:
                failed = True
        detail.append(
            {
                "t": t,
                "deviation_norms": dev,
                "summary": analysis.summary,
                "spectral": analysis.spectral,
                "gradient_bounds": analysis.grad_bounds,
                "M": analysis.field.M,
                "reports": analysis.reports,
            }
        )

    csv_path = _out_path(out_dir, cfg["outputs"]["csv_path"])
    with open(csv_path, "w") as fh:
        fh.write(",".join(_CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(col, "")) if col != "error" else str(row.get("error", "")) for col in _CSV_COLUMNS) + "\n")
    _write_json(_out_path(out_dir, cfg["outputs"]["json_path"]), {"mode_k": mode_k, "rows": detail})
    print("sweep: %d rows -> %s" % (len(rows), csv_path))
    return 1 if failed else 0


def cmd_spectral(cfg: dict, out_dir: str) -> int:
    domain = _domain_from_config(cfg)
    params = _params_from_config(cfg)
    n_trace = cfg["params"]["n_trace"]
    trace = geometry.boundary_trace(domain, n_trace)
    summary = geometry.geometry_summary(domain, trace)
    mesh = fem.generate_mesh(domain, cfg["mesh"]["n_radial"], cfg["mesh"]["n_angular"])
    if params.x0_policy == "min_point":
        x0 = fem.solve_torsion(mesh).min_points[0]
    else:
        x0 = summary.center_of_mass
    if float(np.min(trace.curvatures)) > 0.0:
        mu2 = spectral.mu2_lower_convex(summary.diameter)
    else:
        mu2 = params.mu2
    est = spectral.spectral_estimate(
        mesh,
        r_interior=summary.r_interior,
        area=summary.area,
        degree=params.basis_degree,
        x0=x0,
        mu2=mu2,
    )
    _write_json(_out_path(out_dir, "spectral.json"), est)
    print(
        "spectral: mu0_upper=%s mubar_upper=%s mu0_lower=%s"
        % (_fmt(est.mu0_upper), _fmt(est.mubar_upper), _fmt(est.mu0_lower))
    )
    return 0


def cmd_oracles(cfg: dict | None, out_dir: str, fsup_dim: int | None = None) -> int:
    if fsup_dim is not None:
        rec = oracles.f_sup(fsup_dim, mode="derived")
        payload = _jsonify(rec)
        print(json.dumps(payload, sort_keys=True))
        _write_json(_out_path(out_dir, "fsup_N%d.json" % fsup_dim), rec)
        return 0
    kappas = np.round(np.arange(0.05, 0.951, 0.05), 10)
    table = []
    for dim in range(2, 9):
        table.append(
            {
                "N": dim,
                "kappa": list(kappas),
                "f_printed": list(oracles.f_kappa(kappas, dim, "printed")),
                "f_derived": list(oracles.f_kappa(kappas, dim, "derived")),
                "f_sup": oracles.f_sup(dim, "derived"),
            }
        )
    annulus = []
    for dim in range(2, 7):
        for kappa in np.round(np.arange(0.1, 0.91, 0.2), 10):
            spec_a = oracles.AnnulusSpec(dim=dim, r=float(kappa), R=1.0)
            ends, _ = oracles.annulus_torsion(spec_a, np.array([spec_a.r, spec_a.R]))
            mid = 0.5 * (spec_a.r + spec_a.R)
            annulus.append(
                {
                    "N": dim,
                    "kappa": float(kappa),
                    "boundary_abs_max": float(np.max(np.abs(ends))),
                    "fd_laplacian_residual_mid": float(
                        oracles.fd_laplacian_residual(spec_a, np.array([mid]))[0]
                    ),
                }
            )
    _write_json(_out_path(out_dir, "oracles.json"), {"f_table": table, "annulus": annulus})
    print("oracles: wrote f tables for N=2..8 and annulus checks")
    return 0


def cmd_convergence(cfg: dict, out_dir: str) -> int:
    domain = _domain_from_config(cfg)
    levels = cfg["mesh"]["refinement_levels"]
    if levels < 2:
        raise ConfigError("config key 'mesh.refinement_levels' must be >= 2 for convergence")
    n_r = cfg["mesh"]["n_radial"]
    n_a = cfg["mesh"]["n_angular"]
    is_disk = domain.cos_coeffs.size == 0 and domain.sin_coeffs.size == 0

    records = []
    probe_offsets = None
    probe_vals = []
    for lev in range(levels):
        mesh = fem.generate_mesh(domain, n_r * 2**lev, n_a * 2**lev)
        field = fem.solve_torsion(mesh)
        rec = {"level": lev, "n_radial": mesh.n_radial, "n_angular": mesh.n_angular, "h": mesh.h}
        if is_disk:
            nodes = field.space.node_xy - domain.center[None, :]
            exact = 0.5 * (np.einsum("ic,ic->i", nodes, nodes) - domain.base_radius**2)
            rec["linf_error"] = float(np.max(np.abs(field.u - exact)))
        else:
            if probe_offsets is None:
                ang = np.pi * np.arange(8) / 4.0
                probe_offsets = 0.3 * domain.radius(ang)[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
            vals, _ = fem.eval_at_points(field, domain.center[None, :] + probe_offsets)
            probe_vals.append(vals)
        records.append(rec)

    orders = []
    if is_disk:
        for a, b in zip(records, records[1:]):
            if b["linf_error"] > 0:
                orders.append(float(np.log2(a["linf_error"] / b["linf_error"])))
    else:
        diffs = [float(np.max(np.abs(v2 - v1))) for v1, v2 in zip(probe_vals, probe_vals[1:])]
        for i, d in enumerate(diffs):
            records[i + 1]["probe_diff"] = d
        for a, b in zip(diffs, diffs[1:]):
            if b > 0:
                orders.append(float(np.log2(a / b)))
    _write_json(_out_path(out_dir, "convergence.json"), {"levels": records, "orders": orders})
    print("convergence: orders %s" % (", ".join(_fmt(o) for o in orders) or "n/a"))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bubblestab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("verify", "sweep", "spectral", "oracles", "convergence"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=(name != "oracles"), help="experiment config (JSON)")
        p.add_argument("--out", default=".", help="output directory")
        if name == "oracles":
            p.add_argument("--fsup", action="store_true", help="report only the f supremum")
            p.add_argument("--N", type=int, default=2, help="dimension for --fsup")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        cfg = load_config(args.config) if args.config else None
        if args.command == "verify":
            return cmd_verify(cfg, args.out)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out)
        if args.command == "spectral":
            return cmd_spectral(cfg, args.out)
        if args.command == "oracles":
            return cmd_oracles(cfg, args.out, fsup_dim=args.N if args.fsup else None)
        return cmd_convergence(cfg, args.out)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except (geometry.DomainError, fem.MeshError, fem.SolverError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
