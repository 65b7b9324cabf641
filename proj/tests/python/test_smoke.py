import json
import os
import subprocess
from fractions import Fraction
from pathlib import Path

import pytest

ftcpy = pytest.importorskip("ftcpy")

ROOT = Path(os.environ.get("FTC_SOURCE_DIR", Path(__file__).resolve().parents[2]))
CLI = os.environ.get("FTC_CLI", "ftc")


def config(name):
    return str(ROOT / "configs" / f"{name}.json")


def test_cantor_masses():
    p = ftcpy.Pipeline(config("cantor-1-3"))
    assert p.ftc_verified()
    assert p.gamma_size() == 1
    addrs = p.addresses(3)
    assert len(addrs) == 8
    assert all(Fraction(p.mass(a)) == Fraction(1, 8) for a in addrs)
    assert p.mass([0]) == "1"


def test_golden_partition_and_global():
    p = ftcpy.Pipeline(config("golden-bernoulli"))
    for n in range(1, 6):
        total = sum(Fraction(p.mass(a)) for a in p.addresses(n))
        assert total == 1
        assert all(p.mass(a) == p.mass_global(a) for a in p.addresses(n))


def test_tau_one_is_zero():
    p = ftcpy.Pipeline(config("golden-bernoulli"))
    t = p.tau(1.0)
    assert abs(t["tau"]) < 1e-9
    curve = p.lq_curve("0.5:2:0.5")
    assert [c["q"] for c in curve] == [0.5, 1.0, 1.5, 2.0]
    assert all(c["lower"] <= c["tau"] <= c["upper"] for c in curve)


def test_canonical_round_trip():
    text = Path(config("complex-pisot-demo")).read_text()
    assert ftcpy.canonical(text) == text
    with pytest.raises(ValueError):
        ftcpy.canonical("{}")


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def test_cli_exit_codes(tmp_path):
    ok = run("check-ftc", "--config", config("golden-bernoulli"))
    assert ok.returncode == 0
    report = json.loads(ok.stdout)
    assert report["ftc"] == "verified"
    assert report["config_sha256"] == ftcpy.sha256_hex(Path(config("golden-bernoulli")).read_text())

    overlap = run("check-ftc", "--config", str(ROOT / "tests" / "data" / "overlap-2-3.json"))
    assert overlap.returncode == 2

    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x"}')
    assert run("build", "--config", str(bad)).returncode == 1


def test_cli_mass_and_spectrum(tmp_path):
    m = run("mass", "--config", config("cantor-1-3"), "--children", "1,2,1")
    assert m.returncode == 0
    assert json.loads(m.stdout)["mass"] == "1/8"
    sweep = run("mass", "--config", config("lebesgue-1-2"), "--sweep", "6")
    assert json.loads(sweep.stdout)["total"] == "1"
    s = run("spectrum", "--config", config("cantor-1-3"), "--q-grid", "1:3:1", "--out", str(tmp_path))
    assert s.returncode == 0
    rows = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert rows[0] == "q,tau,tau_lower,tau_upper,method,n"
    assert len(rows) == 4
    diag = json.loads((tmp_path / "spectrum.json").read_text())
    assert len(diag["config_sha256"]) == 64
