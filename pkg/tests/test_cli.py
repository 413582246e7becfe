import json
from pathlib import Path

import pytest

from wwmc.cli import main
from wwmc.reference import load_reference

BASE = ["--histories", "400"]


def _run(tmp_path, name, *args):
    out = tmp_path / name
    code = main(["run", "azurv1_impulse", "--out", str(out), *BASE, *args])
    return code, out


def test_run_analog_writes_all_quantities(tmp_path):
    code, out = _run(tmp_path, "analog", "--mode", "analog", "--seed", "1")
    assert code == 0
    flux = (out / "flux.csv").read_text().splitlines()
    assert flux[0] == "step,t,cell,x_center,value"
    assert len(flux) == 1 + 20 * 201
    for name in ("rel_sdev", "fom", "census_phi", "census_current", "sm_raw", "sm_filtered", "particles"):
        assert (out / f"{name}.csv").exists()
    # analog mode: no window or auxiliary-flux files
    assert not (out / "windows.csv").exists()
    assert not (out / "aux_flux.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["windows"]["rho"] == 2.5
    assert manifest["config"]["mc"]["seed"] == 1
    assert len(manifest["per_step"]) == 20


def test_rerun_same_seed_byte_identical(tmp_path):
    _, out1 = _run(tmp_path, "a", "--mode", "ww-losm-cn", "--seed", "9")
    _, out2 = _run(tmp_path, "b", "--mode", "ww-losm-cn", "--seed", "9")
    names = sorted(p.name for p in out1.glob("*.csv"))
    assert "windows.csv" in names and "aux_flux.csv" in names
    for name in names:
        if name == "fom.csv":  # divides by measured wall time
            continue
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_cli_overrides_reach_manifest(tmp_path):
    code, out = _run(
        tmp_path, "ovr", "--mode", "ww-losm-be", "--seed", "3", "--rho", "3.5",
        "--filter-k", "4",
    )
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["windows"]["rho"] == 3.5
    assert manifest["config"]["filter"]["k"] == 4
    assert manifest["config"]["run"]["mode"] == "ww-losm-be"


def test_unknown_mode_exits_1(tmp_path):
    code = main(["run", "azurv1_impulse", "--mode", "nonsense", "--out", str(tmp_path / "x")])
    assert code == 1


def test_missing_config_exits_1(tmp_path):
    code = main(["run", str(tmp_path / "missing.cfg"), "--out", str(tmp_path / "x")])
    assert code == 1


def test_ww_reference_needs_reference_flag(tmp_path):
    code = main(["run", "azurv1_impulse", "--mode", "ww-reference", "--out", str(tmp_path / "x"), *BASE])
    assert code == 1


def test_bad_reference_exits_3(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n")
    code = main([
        "run", "azurv1_impulse", "--mode", "ww-reference", "--reference", str(bad),
        "--out", str(tmp_path / "x"), *BASE,
    ])
    assert code == 3


def test_make_reference_then_consume(tmp_path):
    ref = tmp_path / "ref.csv"
    code = main(["make-reference", "azurv1_impulse", "--histories", "800", "--seed", "2", "--out", str(ref)])
    assert code == 0
    table = load_reference(ref, n_cells=201)
    assert table.times.size == 21

    out = tmp_path / "wwref"
    code = main([
        "run", "azurv1_impulse", "--mode", "ww-reference", "--reference", str(ref),
        "--seed", "4", "--out", str(out), *BASE,
    ])
    assert code == 0
    assert (out / "rel_error.csv").exists()
    assert (out / "windows.csv").exists()
