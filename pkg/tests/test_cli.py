import json
import subprocess
import sys

import pytest

from liegeo.cli import (
    EXIT_CONFIG,
    EXIT_INAPPLICABLE,
    EXIT_OK,
    build_group,
    config_hash,
    main,
    normalize_config,
)
from liegeo.errors import ConfigError


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "liegeo.cli", *args],
        cwd=cwd,
        capture_output=True,
        text=True,
    )


def test_normalize_round_trip():
    raw = {"group": "so4", "T": 5, "metric": {"kind": "cheeger", "delta": -0.5}}
    cfg = normalize_config(raw)
    assert normalize_config(cfg) == cfg
    assert cfg["T"] == 5.0 and cfg["seed"] == 0


def test_normalize_rejects_bad_fields():
    with pytest.raises(ConfigError):
        normalize_config({"bogus": 1})
    with pytest.raises(ConfigError):
        normalize_config({"T": -1})
    with pytest.raises(ConfigError):
        normalize_config({"criterion": "nope"})
    with pytest.raises(ConfigError):
        normalize_config({"deltas": [-2.0]})


def test_config_hash_stable():
    cfg = normalize_config({"group": "so3"})
    assert config_hash(cfg) == config_hash(json.loads(json.dumps(cfg)))
    assert config_hash(cfg) != config_hash(normalize_config({"group": "so4"}))


def test_build_group_names():
    assert build_group("so3").name == "so(3)"
    assert build_group("so(4)").name == "so(4)"
    assert build_group("su3-with-so3").name == "su(3)/so(3)"
    assert build_group("berger-sphere").subalgebra_dim == 1
    assert build_group("torus2").dim == 2
    with pytest.raises(ConfigError):
        build_group("e8")


def test_cmd_conjugate_blocks(tmp_path):
    code = main(
        [
            "conjugate",
            "--group", "so3",
            "--metric", "rigid-body", "1,2,3",
            "--u0", "e12",
            "--criterion", "steady-blocks",
            "--out", str(tmp_path / "run"),
        ]
    )
    assert code == EXIT_OK
    doc = json.loads((tmp_path / "run" / "conjugate.json").read_text())
    assert doc["criterion"] == "steady-blocks"
    assert doc["conjugate_times"][0] == pytest.approx(9.0869145, abs=1e-5)
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
    assert manifest["config_hash"] == doc["config_hash"]


def test_cmd_curvature_zeitlin(tmp_path):
    code = main(
        [
            "curvature",
            "--group", "su3-with-so3",
            "--metric", "cheeger", "-0.66666666666666667",
            "--out", str(tmp_path / "run"),
        ]
    )
    assert code == EXIT_OK
    doc = json.loads((tmp_path / "run" / "block_einstein.json").read_text())
    assert doc["C2"] == pytest.approx(5.0, abs=1e-9)
    assert doc["residual"] < 1e-9
    ricci_lines = (tmp_path / "run" / "ricci.csv").read_text().splitlines()
    assert ricci_lines[0].startswith("# config_hash: ")
    assert len(ricci_lines) == 2 + 8


def test_exit_codes(tmp_path):
    assert main(["curvature", "--group", "e9", "--out", str(tmp_path)]) == EXIT_CONFIG
    code = main(
        [
            "conjugate",
            "--group", "torus2",
            "--metric", "diagonal", "1,2",
            "--u0", "1,0.7",
            "--criterion", "steady-det",
            "--out", str(tmp_path / "t"),
        ]
    )
    assert code == EXIT_INAPPLICABLE


def test_locus_cli_and_determinism(tmp_path):
    # identical config (including out path) -> byte-identical outputs
    args = [
        "locus",
        "--deltas", "-0.25,-0.5",
        "--angles", "64",
        "--out", str(tmp_path / "a" / "locus.svg"),
    ]
    assert main(args) == EXIT_OK
    first_csv = (tmp_path / "a" / "locus.csv").read_bytes()
    first_svg = (tmp_path / "a" / "locus.svg").read_bytes()
    assert main(args) == EXIT_OK
    assert (tmp_path / "a" / "locus.csv").read_bytes() == first_csv
    assert (tmp_path / "a" / "locus.svg").read_bytes() == first_svg


def test_conjugate_determinism(tmp_path):
    args = [
        "conjugate",
        "--group", "berger-sphere",
        "--metric", "cheeger", "-0.5",
        "--u0", "1;1,0",
        "--T", "3",
        "--seed", "7",
        "--out", str(tmp_path / "x"),
    ]
    main(args)
    first = (tmp_path / "x" / "conjugate.json").read_bytes()
    main(args)
    assert (tmp_path / "x" / "conjugate.json").read_bytes() == first


def test_cmd_conjugate_closed_route(tmp_path):
    code = main(
        [
            "conjugate",
            "--group", "berger-sphere",
            "--metric", "cheeger", "-0.5",
            "--u0", "1;1,0",
            "--T", "7",
            "--criterion", "closed",
            "--out", str(tmp_path / "run"),
        ]
    )
    assert code == EXIT_OK
    doc = json.loads((tmp_path / "run" / "conjugate.json").read_text())
    assert doc["status"] == "conjugate-at-or-before-tau"
    assert doc["diagnostics"]["isometry_ok"] is True
    assert doc["diagnostics"]["tau"] == pytest.approx(5.6198518, abs=1e-5)


def test_cmd_conjugate_nonsteady_phi_route(tmp_path):
    code = main(
        [
            "conjugate",
            "--group", "su3-with-so3",
            "--metric", "cheeger", "-0.6666666666666666",
            "--u0", "0.4,0.1,0.3;0.2,0.5,0.1,0.2,0.3",
            "--T", "1.5",
            "--criterion", "nonsteady-phi",
            "--out", str(tmp_path / "run"),
        ]
    )
    assert code == EXIT_OK
    doc = json.loads((tmp_path / "run" / "conjugate.json").read_text())
    assert doc["status"] == "satisfied-on-horizon"
    assert doc["diagnostics"]["phi_min"] > 0
    assert doc["diagnostics"]["index_form_tau"] > 0


def test_cli_subprocess_entry(tmp_path):
    res = run_cli(
        ["geodesic", "--group", "so3", "--metric", "rigid-body", "1,2,3",
         "--u0", "e12", "--T", "0.5", "--out", "g"],
        cwd=tmp_path,
    )
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "g" / "trajectory.csv").exists()
    assert (tmp_path / "g" / "manifest.json").exists()
