import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from biphoton.cli import main

SCHEMA = json.loads(resources.files("biphoton").joinpath("report.schema.json").read_text())

BASE = """\
[crystal]
preset = ppktp-790
length = 2 cm
{crystal}
[pump]
bandwidth = 3 THz

[state]
{state}
[output]
dir = out
"""

SYMMETRIC = "dispersion_order = 1\n"


def write(tmp_path, crystal="", state="", extra=""):
    p = tmp_path / "run.ini"
    p.write_text(BASE.format(crystal=crystal, state=state) + extra)
    return p


def report(path):
    r = json.loads((path / "report.json").read_text())
    jsonschema.validate(r, SCHEMA)
    return r


def test_design(tmp_path):
    assert main(["design", "--config", str(write(tmp_path))]) == 0
    out = tmp_path / "out"
    table = dict(line.split(",") for line in (out / "design.csv").read_text().splitlines()[1:])
    assert float(table["grating_period_um"]) == pytest.approx(47.7, rel=1e-12)
    r = report(out)
    assert r["status"] == "ok" and r["outputs"] == ["design.csv"]
    assert r["observables"]["phase_match"]["satisfied"]["overall"] is True
    assert r["derived"]["window"]["L_min"] == pytest.approx(2380.95, rel=1e-5)


@pytest.mark.parametrize("sub, files", [
    ("jsa", ["jsa.csv", "marginals.csv"]),
    ("schmidt", ["schmidt.csv"]),
    ("timedomain", ["timedomain.csv"]),
])
def test_grid_subcommands(tmp_path, sub, files):
    assert main([sub, "--config", str(write(tmp_path, SYMMETRIC, "flat_prefactor = true\n"))]) == 0
    r = report(tmp_path / "out")
    assert r["outputs"] == files
    for f in files:
        assert (tmp_path / "out" / f).stat().st_size > 0


@pytest.mark.parametrize("kind", ["TB", "DB", "DB_L"])
@pytest.mark.parametrize("sub", ["hom", "mz"])
def test_scans(tmp_path, sub, kind):
    cfg = write(tmp_path, SYMMETRIC, f"kind = {kind}\nflat_prefactor = true\n")
    assert main([sub, "--config", str(cfg), "--format", "json"]) == 0
    out = tmp_path / "out"
    r = report(out)
    data = json.loads((out / f"{sub}.json").read_text())
    assert len(data["tau"]) == len(data["P"]) == r["observables"]["scan"]["points"]
    assert r["observables"]["scan"]["state_kind"] == kind


def test_hom_dip_width_matches_tb(tmp_path):
    cfg = write(tmp_path, SYMMETRIC, "kind = DB_L\nflat_prefactor = true\n")
    assert main(["hom", "--config", str(cfg)]) == 0
    r = report(tmp_path / "out")
    assert r["observables"]["scan"]["dip_width"] == pytest.approx(r["derived"]["tb_dip_width"], rel=0.05)
    header = (tmp_path / "out" / "hom.csv").read_text().splitlines()[0]
    assert json.loads(header.lstrip("# "))["mode"] == "HOM"


def test_physics_error_exit_code(tmp_path):
    # full second-order preset is not exchange symmetric
    assert main(["hom", "--config", str(write(tmp_path))]) == 2
    r = report(tmp_path / "out")
    assert r["status"] == "physics_error" and "symmetric" in r["error"]


def test_under_resolved_grid_exit_code(tmp_path):
    assert main(["jsa", "--config", str(write(tmp_path, extra="[grid]\nn = 16\n"))]) == 2
    assert report(tmp_path / "out")["status"] == "physics_error"


def test_config_error_exit_code(tmp_path, caplog):
    p = tmp_path / "bad.ini"
    p.write_text("[crystal]\npreset = ppktp-790\nlength = 2 parsecs\n[pump]\nbandwidth = 3 THz\n")
    assert main(["design", "--config", str(p)]) == 1
    assert "bad.ini:3" in caplog.text
    assert main(["design", "--config", str(tmp_path / "missing.ini")]) == 1


def test_output_dir_precedence(tmp_path, monkeypatch):
    cfg = write(tmp_path)
    monkeypatch.setenv("BIPHOTON_OUT", str(tmp_path / "env"))
    assert main(["design", "--config", str(cfg)]) == 0
    assert (tmp_path / "env" / "report.json").exists()
    assert main(["design", "--config", str(cfg), "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "report.json").exists()
    assert not (tmp_path / "out").exists()


def test_window_warning(tmp_path):
    cfg = write(tmp_path).read_text().replace("length = 2 cm", "length = 0.5 cm")
    (tmp_path / "run.ini").write_text(cfg)
    assert main(["design", "--config", str(tmp_path / "run.ini")]) == 0
    assert any("validity window" in w for w in report(tmp_path / "out")["warnings"])


@pytest.mark.parametrize("sub", ["design", "schmidt", "mz"])
def test_deterministic_output(tmp_path, sub):
    cfg = write(tmp_path, SYMMETRIC, "flat_prefactor = true\n")
    blobs = []
    for d in ("a", "b"):
        assert main([sub, "--config", str(cfg), "--out", str(tmp_path / d)]) == 0
        blobs.append({f.name: f.read_bytes() for f in sorted((tmp_path / d).iterdir())})
    assert blobs[0] == blobs[1]


def test_console_entry(tmp_path):
    cfg = write(tmp_path)
    proc = subprocess.run([sys.executable, "-m", "biphoton", "design", "--config", str(cfg)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "biphoton", "bogus", "--config", str(cfg)],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "invalid choice" in proc.stderr
