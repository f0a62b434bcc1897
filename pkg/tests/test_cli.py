"""End-to-end CLI runs against temp directories (in-process)."""

import json
import math

import pytest

from sflocal import cli

DC_CONFIG = {"model": "double_chain", "t1": 1.0, "t2": 1.0, "delta": 4.0,
             "gamma": math.sqrt(15.0), "n_cells": 20, "m": 11}
IMP_CONFIG = {"model": "impurity_chain", "t": 1.0, "gamma": 2.05,
              "length": 40, "m": 20}


def _write(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _read_csv(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    return header, [dict(zip(header, ln.split(","))) for ln in lines[1:]]


def test_spectrum_csv(tmp_path):
    cfg = _write(tmp_path, DC_CONFIG)
    assert cli.main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 0
    header, rows = _read_csv(tmp_path / "spectrum.csv")
    assert header == ["index", "re_e", "im_e", "class", "chi", "xi", "residual", "method"]
    assert len(rows) == 40
    assert all(r["method"] == "dense" for r in rows)
    n_im = sum(1 for r in rows if abs(float(r["im_e"])) > 1e-8)
    assert n_im == 38


def test_spectrum_deterministic(tmp_path):
    cfg = _write(tmp_path, DC_CONFIG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["spectrum", "--config", cfg, "--out", str(out1)]) == 0
    assert cli.main(["spectrum", "--config", cfg, "--out", str(out2)]) == 0
    assert (out1 / "spectrum.csv").read_bytes() == (out2 / "spectrum.csv").read_bytes()


def test_spectrum_json_format(tmp_path):
    cfg = _write(tmp_path, IMP_CONFIG)
    assert cli.main(["spectrum", "--config", cfg, "--out", str(tmp_path),
                     "--format", "json"]) == 0
    doc = json.loads((tmp_path / "spectrum.json").read_text())
    assert len(doc) == 40
    assert {"index", "re_e", "im_e", "class"} <= set(doc[0])


def test_spectrum_both_methods_match(tmp_path):
    cfg = _write(tmp_path, {"model": DC_CONFIG, "method": "both"})
    assert cli.main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "match.json").read_text())
    assert doc["match_distance"] <= 1e-7


def test_spectrum_bound_state_row(tmp_path):
    cfg = _write(tmp_path, IMP_CONFIG)
    assert cli.main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 0
    _, rows = _read_csv(tmp_path / "spectrum.csv")
    # the single-size heuristic may also tag the narrowest bulk states, but
    # the defect mode must be present and carries the largest imaginary part
    bound = [r for r in rows if r["class"] == "bound"]
    assert bound
    top = max(rows, key=lambda r: float(r["im_e"]))
    assert top["class"] == "bound"
    assert abs(float(top["re_e"])) <= 1e-8
    assert abs(float(top["im_e"]) - 0.4523651324) <= 1e-6


def test_spectrum_secular_rejected_for_quasiperiodic(tmp_path):
    cfg = _write(tmp_path, {"model": "aa_imaginary", "t": 1.0, "lambda": 0.1,
                            "gamma": 1.0, "length": 40, "m": 20})
    assert cli.main(["spectrum", "--config", cfg, "--out", str(tmp_path),
                     "--method", "secular"]) == 2


def test_bad_config_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert cli.main(["spectrum", "--config", str(path), "--out", str(tmp_path)]) == 2
    cfg = _write(tmp_path, {"model": "triangle"})
    assert cli.main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_phase_diagram(tmp_path):
    cfg = _write(tmp_path, DC_CONFIG)
    assert cli.main(["phase-diagram", "--config", cfg, "--out", str(tmp_path),
                     "--delta-range", "4:4:1", "--gamma-range", "0:6.5:14"]) == 0
    header, rows = _read_csv(tmp_path / "phase.csv")
    assert header == ["delta", "gamma", "n_im", "n_bound", "regime",
                      "gamma_c1", "gamma_a", "gamma_c2", "error"]
    assert len(rows) == 14
    assert all(float(r["gamma_c1"]) == 3.0 for r in rows)
    assert all(abs(float(r["gamma_a"]) - math.sqrt(15.0)) <= 1e-12 for r in rows)
    regimes = [r["regime"] for r in rows]
    assert regimes[0] == "pt_unbroken" and regimes[-1] == "pt_restoration"
    assert "pt_broken" in regimes


def test_phase_diagram_bad_range(tmp_path):
    cfg = _write(tmp_path, DC_CONFIG)
    assert cli.main(["phase-diagram", "--config", cfg, "--out", str(tmp_path),
                     "--delta-range", "oops", "--gamma-range", "0:1:2"]) == 2


def test_scaling(tmp_path):
    cfg = _write(tmp_path, {"model": "double_chain", "t1": 1.0, "t2": 1.0,
                            "delta": 4.0, "gamma": 3.4, "n_cells": 20, "m": 11})
    assert cli.main(["scaling", "--config", cfg, "--out", str(tmp_path),
                     "--sizes", "40,80,160"]) == 0
    header, rows = _read_csv(tmp_path / "scaling.csv")
    assert header == ["size", "xi", "xi_over_size", "chi", "collapse_error"]
    assert [int(r["size"]) for r in rows] == [40, 80, 160]
    ratios = [float(r["xi_over_size"]) for r in rows]
    assert max(ratios) / min(ratios) - 1.0 <= 0.02
    assert float(rows[0]["collapse_error"]) == 0.0


def test_scaling_bad_selector(tmp_path):
    cfg = _write(tmp_path, DC_CONFIG)
    assert cli.main(["scaling", "--config", cfg, "--out", str(tmp_path),
                     "--sizes", "40,80", "--selector", "bogus"]) == 2


def test_states_dump(tmp_path):
    cfg = _write(tmp_path, IMP_CONFIG)
    assert cli.main(["states", "--config", cfg, "--out", str(tmp_path)]) == 0
    header, rows = _read_csv(tmp_path / "states.csv")
    assert header == ["state_index", "re_e", "im_e", "class", "site", "re_psi", "im_psi"]
    assert len(rows) == 40 * 40
    assert max(abs(float(r["re_psi"])) for r in rows) == pytest.approx(1.0)
