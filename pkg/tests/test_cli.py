import json
import subprocess
import sys

import pytest

from bubblestab import cli

DISK_SMALL = {
    "mesh": {"n_radial": 8, "n_angular": 32, "refinement_levels": 2},
    "params": {"n_trace": 256},
}


def write_cfg(tmp_path, payload, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


def test_load_config_fills_defaults(tmp_path):
    cfg = cli.load_config(write_cfg(tmp_path, {}))
    assert cfg["mesh"]["n_radial"] == 32
    assert cfg["params"]["x0_policy"] == "min_point"
    assert cfg["theorems"] == ["main"]
    assert "sweep" not in cfg


@pytest.mark.parametrize(
    "payload,fragment",
    [
        ({"mesh": {"n_radial": 3}}, "mesh.n_radial"),
        ({"mesh": {"n_angular": 30}}, "mesh.n_angular"),
        ({"mesh": {"refinement_levels": 0}}, "mesh.refinement_levels"),
        ({"params": {"x0_policy": "weird"}}, "params.x0_policy"),
        ({"params": {"gamma": 1.5}}, "params.gamma"),
        ({"params": {"n_trace": 32}}, "params.n_trace"),
        ({"sweep": {"values": []}}, "sweep.values"),
        ({"sweep": {"values": [0.2, 0.1]}}, "sweep.values"),
        ({"sweep": {"values": [0.1], "mode_k": 0}}, "sweep.mode_k"),
        ({"theorems": ["nope"]}, "theorems"),
        ({"domain": {"base_radius": -1.0}}, "domain.base_radius"),
    ],
)
def test_load_config_names_bad_key(tmp_path, payload, fragment):
    with pytest.raises(cli.ConfigError, match=fragment.replace(".", r"\.")):
        cli.load_config(write_cfg(tmp_path, payload))


def test_load_config_bad_files(tmp_path):
    with pytest.raises(cli.ConfigError):
        cli.load_config(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("not json {")
    with pytest.raises(cli.ConfigError):
        cli.load_config(str(bad))
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(cli.ConfigError):
        cli.load_config(str(arr))


def test_verify_disk(tmp_path):
    cfg = write_cfg(tmp_path, DISK_SMALL)
    out = tmp_path / "out"
    assert cli.main(["verify", "--config", cfg, "--out", str(out)]) == 0
    for lev in (0, 1):
        payload = json.loads((out / ("verify_level%d.json" % lev)).read_text())
        names = [r["name"] for r in payload["identities"]]
        assert names[0] == "fundamental" and "deficit_equivalence" in names
        assert payload["solver_residual"] < 1e-8
        assert "serrin" in payload and "deficit" in payload


def test_verify_exit_one_on_tight_threshold(tmp_path):
    payload = dict(DISK_SMALL)
    payload["params"] = {"n_trace": 256, "residual_threshold": 1e-12}
    cfg = write_cfg(tmp_path, payload)
    assert cli.main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def sweep_payload(values):
    return {
        "mesh": {"n_radial": 8, "n_angular": 32, "refinement_levels": 1},
        "params": {"n_trace": 256},
        "sweep": {"values": values, "mode_k": 3},
        "theorems": ["main"],
    }


def test_sweep_outputs_and_determinism(tmp_path):
    cfg = write_cfg(tmp_path, sweep_payload([0.02, 0.05]))
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["sweep", "--config", cfg, "--out", str(out1)]) == 0
    assert cli.main(["sweep", "--config", cfg, "--out", str(out2)]) == 0
    lines = (out1 / "sweep.csv").read_text().splitlines()
    assert lines[0] == ",".join(cli._CSV_COLUMNS)
    assert len(lines) == 3
    for line in lines[1:]:
        cells = line.split(",")
        assert cells[9] == "true"  # holds
        assert cells[-1] == ""  # error column empty
    assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    detail = json.loads((out1 / "report.json").read_text())
    assert [row["t"] for row in detail["rows"]] == [0.02, 0.05]


def test_sweep_row_failure_lands_in_error_column(tmp_path):
    # t = 1.1 makes the radius vanish, an invalid domain for that row only
    cfg = write_cfg(tmp_path, sweep_payload([0.02, 1.1]))
    out = tmp_path / "out"
    assert cli.main(["sweep", "--config", cfg, "--out", str(out)]) == 1
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) == 3
    assert lines[1].split(",")[-1] == ""
    assert "DomainError" in lines[2]


def test_spectral_disk(tmp_path):
    payload = {
        "mesh": {"n_radial": 8, "n_angular": 32, "refinement_levels": 1},
        "params": {"n_trace": 256, "basis_degree": 6},
    }
    cfg = write_cfg(tmp_path, payload)
    out = tmp_path / "out"
    assert cli.main(["spectral", "--config", cfg, "--out", str(out)]) == 0
    est = json.loads((out / "spectral.json").read_text())
    assert abs(est["mu0_upper"] - 4.0) < 1e-2
    assert est["mu0_lower"] is not None  # convex domain gets the Neumann gap
    assert est["mu0_lower"] < est["mu0_upper"]


def test_oracles_fsup(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["oracles", "--fsup", "--N", "3", "--out", str(out)]) == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    rec = json.loads(line)
    assert rec["computed"] == pytest.approx(1.5, abs=1e-6)
    assert rec["discrepancy"] is False
    assert (out / "fsup_N3.json").exists()

    assert cli.main(["oracles", "--fsup", "--N", "2", "--out", str(out)]) == 0
    rec2 = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert rec2["computed"] == pytest.approx(1.0, abs=1e-6)
    assert rec2["claimed"] == pytest.approx(1.5)
    assert rec2["discrepancy"] is True


def test_oracles_table(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["oracles", "--out", str(out)]) == 0
    payload = json.loads((out / "oracles.json").read_text())
    assert [row["N"] for row in payload["f_table"]] == list(range(2, 9))
    row4 = payload["f_table"][2]
    for a, b in zip(row4["f_printed"], row4["f_derived"]):
        assert abs(a - b) < 1e-10
    assert len(payload["annulus"]) == 25
    assert all(rec["boundary_abs_max"] < 1e-12 for rec in payload["annulus"])


def test_convergence_disk(tmp_path):
    payload = {"mesh": {"n_radial": 8, "n_angular": 32, "refinement_levels": 3}}
    cfg = write_cfg(tmp_path, payload)
    out = tmp_path / "out"
    assert cli.main(["convergence", "--config", cfg, "--out", str(out)]) == 0
    rec = json.loads((out / "convergence.json").read_text())
    errs = [lev["linf_error"] for lev in rec["levels"]]
    assert errs[0] > errs[1] > errs[2]
    assert all(o > 2.0 for o in rec["orders"])


def test_convergence_needs_two_levels(tmp_path):
    payload = {"mesh": {"n_radial": 8, "n_angular": 32, "refinement_levels": 1}}
    cfg = write_cfg(tmp_path, payload)
    assert cli.main(["convergence", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_usage_errors(tmp_path):
    assert cli.main([]) == 2
    assert cli.main(["frobnicate"]) == 2
    assert cli.main(["verify"]) == 2  # --config required
    assert cli.main(["verify", "--config", str(tmp_path / "missing.json")]) == 2


def test_console_script(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "bubblestab.cli"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    proc = subprocess.run(
        ["bubblestab", "oracles", "--fsup", "--N", "4", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout.strip())["computed"] == pytest.approx(2.0, abs=1e-6)
