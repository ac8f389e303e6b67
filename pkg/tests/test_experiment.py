"""Scenario ingestion, sweeps, CSV/plot emission, and the CLI surface."""

import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

from geoscatter.cli import main as cli_main
from geoscatter.experiment import (
    CSV_HEADER,
    ScenarioParseError,
    ScenarioValidationError,
    SweepError,
    SweepRow,
    emit_csv,
    emit_plot_script,
    load_scenario,
    parse_csv,
    run_sweep,
    scenario_comment_lines,
    scenario_from_dict,
    scenario_to_dict,
)

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


def write_scenario(tmp_path, doc, name="case.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


MINIMAL_FLAT = {
    "defects": [{"position": [0.7, -0.4]}],
    "sweep": {"kind": "k_sweep", "grid": {"min": 0.5, "max": 1.5, "count": 3}, "fixed": 0.0},
}


# ---------------------------------------------------------------- loading


def test_minimal_flat_scenario(tmp_path):
    sc = load_scenario(write_scenario(tmp_path, MINIMAL_FLAT))
    assert sc.surface is None
    assert len(sc.defects) == 1
    assert sc.lambda1 == 0.5 and sc.lambda2 == -0.5 and sc.theta0 == 0.0
    assert sc.sigma_ref == 1.0
    assert any("lambda2=-0.5" in d for d in sc.applied_defaults)
    assert any("coupling" in d for d in sc.applied_defaults)


def test_defaults_echoed_in_header(tmp_path):
    sc = load_scenario(write_scenario(tmp_path, MINIMAL_FLAT))
    lines = scenario_comment_lines(sc)
    joined = "\n".join(lines)
    assert "defaults applied:" in joined
    assert "lambda2=-0.5" in joined


def test_unknown_keys_rejected(tmp_path):
    doc = dict(MINIMAL_FLAT)
    doc["mystery"] = 1
    with pytest.raises(ScenarioValidationError) as info:
        load_scenario(write_scenario(tmp_path, doc))
    assert "mystery" in str(info.value)


def test_nested_unknown_keys_rejected(tmp_path):
    doc = json.loads(json.dumps(MINIMAL_FLAT))
    doc["sweep"]["grid"]["step"] = 0.1
    with pytest.raises(ScenarioValidationError):
        load_scenario(write_scenario(tmp_path, doc))


def test_all_violations_reported_at_once():
    doc = {
        "lambda1": "half",
        "defects": [{"position": [0.0]}],
        "sweep": {"kind": "spiral", "grid": {"min": 2.0, "max": 1.0, "count": 1}},
    }
    with pytest.raises(ScenarioValidationError) as info:
        scenario_from_dict(doc)
    text = str(info.value)
    for fragment in ("lambda1", "position", "kind", "min must be < max", "count"):
        assert fragment in text


def test_parse_error_carries_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"defects": [,]}')
    with pytest.raises(ScenarioParseError) as info:
        load_scenario(path)
    assert ":1:" in str(info.value)


def test_roundtrip_through_serialization():
    sc = load_scenario(SCENARIOS / "fig3a_distant_x.json")
    doc = scenario_to_dict(sc)
    sc2 = scenario_from_dict(json.loads(json.dumps(doc)), name=sc.name)
    assert scenario_to_dict(sc2) == doc


def test_eta_and_delta_forms_agree(tmp_path):
    base = {
        "surface": {"bumps": [{"sigma": 2.0, "eta": 0.04, "center": [0.0, 0.0]}]},
        "sweep": {"kind": "theta_sweep", "grid": {"min": 0.0, "max": 3.0, "count": 3},
                  "fixed": 1.0},
    }
    alt = json.loads(json.dumps(base))
    alt["surface"]["bumps"][0] = {"sigma": 2.0, "delta": 0.4, "center": [0.0, 0.0]}
    sc1 = load_scenario(write_scenario(tmp_path, base, "a.json"))
    sc2 = load_scenario(write_scenario(tmp_path, alt, "b.json"))
    assert sc1.surface.bumps[0][0].eta == pytest.approx(sc2.surface.bumps[0][0].eta)
    both = json.loads(json.dumps(base))
    both["surface"]["bumps"][0]["delta"] = 0.4
    with pytest.raises(ScenarioValidationError):
        load_scenario(write_scenario(tmp_path, both, "c.json"))


def test_quadrature_overrides(tmp_path):
    doc = json.loads(json.dumps(MINIMAL_FLAT))
    doc["quadrature"] = {"rel_tol": 1e-7, "truncation_radius": 12.0}
    sc = load_scenario(write_scenario(tmp_path, doc))
    assert sc.quadrature.rel_tol == 1e-7
    assert sc.quadrature.truncation_radius == 12.0
    assert sc.quadrature.abs_tol == 1e-12


# ---------------------------------------------------------------- sweeps


def test_flat_sweep_has_zero_geometry_column(tmp_path):
    sc = load_scenario(write_scenario(tmp_path, MINIMAL_FLAT))
    rows = run_sweep(sc)
    assert len(rows) == 3
    assert [r.k_sigma for r in rows] == sorted(r.k_sigma for r in rows)
    for r in rows:
        assert r.re_f1 == 0.0 and r.im_f1 == 0.0
        assert r.delta_dcs_over_sigma == 0.0
        assert r.dcs_over_sigma >= 0.0


def test_theta_sweep_periodicity(tmp_path):
    doc = {
        "surface": {"bumps": [{"sigma": 1.0, "eta": 0.1}]},
        "defects": [{"position": [0.0, 0.0]}],
        "sweep": {
            "kind": "theta_sweep",
            "grid": {"min": 0.0, "max": 4 * math.pi, "count": 17},
            "fixed": 1.0,
        },
    }
    rows = run_sweep(load_scenario(write_scenario(tmp_path, doc)))
    for i in range(8):
        a, b = rows[i], rows[i + 8]
        assert b.theta == pytest.approx(a.theta + 2 * math.pi)
        assert b.re_f0 == pytest.approx(a.re_f0, abs=1e-12)
        assert b.im_f0 == pytest.approx(a.im_f0, abs=1e-12)
        assert b.re_f1 == pytest.approx(a.re_f1, abs=1e-12)
        assert b.im_f1 == pytest.approx(a.im_f1, abs=1e-12)
        assert b.dcs_over_sigma == pytest.approx(a.dcs_over_sigma, rel=1e-10)


def test_sweep_determinism_across_thread_caps(tmp_path, monkeypatch):
    sc = load_scenario(SCENARIOS / "fig7a_central_plus_distant.json")
    monkeypatch.setenv("GEOSCATTER_THREADS", "1")
    serial = run_sweep(sc)
    monkeypatch.setenv("GEOSCATTER_THREADS", "5")
    threaded = run_sweep(sc)
    assert serial == threaded
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(serial, p1, comments=scenario_comment_lines(sc))
    emit_csv(threaded, p2, comments=scenario_comment_lines(sc))
    assert p1.read_bytes() == p2.read_bytes()


def test_sweep_aborts_when_most_rows_fail(tmp_path):
    # a resonant coupling (g = 2i) makes every row raise
    doc = {
        "defects": [{"position": [0.0, 0.0], "coupling": [0.0, 2.0]}],
        "sweep": {"kind": "k_sweep", "grid": {"min": 0.5, "max": 1.5, "count": 4},
                  "fixed": 0.0},
    }
    with pytest.raises(SweepError):
        run_sweep(load_scenario(write_scenario(tmp_path, doc)))


# ---------------------------------------------------------------- emission


def sample_rows():
    return [
        SweepRow(0.5, 0.0, 0.1, -0.2, 0.01, 0.02, 0.3, 0.001),
        SweepRow(1.0, 0.0, 1 / 3, -2e-17, 0.5**0.5, 0.02, 0.25, -0.002),
    ]


def test_csv_line_count_and_header(tmp_path):
    path = tmp_path / "out.csv"
    emit_csv(sample_rows(), path)
    lines = path.read_text().split("\n")
    assert lines[-1] == ""  # trailing LF
    assert len(lines) == 4  # header + 2 rows + trailing empty split
    assert lines[0] == CSV_HEADER
    assert "\r" not in path.read_bytes().decode()


def test_csv_roundtrip_bit_exact(tmp_path):
    path = tmp_path / "out.csv"
    rows = sample_rows()
    emit_csv(rows, path, comments=["any", "comment"])
    back = parse_csv(path)
    assert back == rows


def test_csv_refuses_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_csv([], tmp_path / "x.csv")


def test_plot_script_references_csv(tmp_path):
    csv_path = tmp_path / "sweep.csv"
    script_path = tmp_path / "sweep.py"
    rows = sample_rows()
    emit_csv(rows, csv_path)
    emit_plot_script(rows, script_path)
    text = script_path.read_text()
    assert "sweep.csv" in text
    assert '"k_sigma"' in text or "'k_sigma'" in text
    theta_rows = [SweepRow(1.0, t, 0, 0, 0, 0, 0.1, 0.0) for t in (0.0, 1.0)]
    emit_plot_script(theta_rows, script_path)
    assert "'theta'" in script_path.read_text()


# ---------------------------------------------------------------- cli


def test_cli_run_and_validate(tmp_path):
    out = tmp_path / "flat.csv"
    scenario = write_scenario(tmp_path, MINIMAL_FLAT, "flat.json")
    assert cli_main(["run", str(scenario), "-o", str(out),
                     "--plot-script", str(tmp_path / "flat_plot.py")]) == 0
    assert out.exists() and (tmp_path / "flat_plot.py").exists()
    text = out.read_text()
    assert text.startswith("# scenario:")
    assert CSV_HEADER in text
    assert cli_main(["validate", str(scenario)]) == 0


def test_cli_validate_rejects_bad_file(tmp_path, capsys):
    doc = dict(MINIMAL_FLAT)
    doc["nonsense"] = True
    scenario = write_scenario(tmp_path, doc, "bad.json")
    assert cli_main(["validate", str(scenario)]) == 1
    assert "nonsense" in capsys.readouterr().err


def test_cli_oracle_flat(tmp_path, capsys):
    scenario = write_scenario(tmp_path, MINIMAL_FLAT, "flat.json")
    assert cli_main(["oracle", str(scenario)]) == 0
    assert "flat" in capsys.readouterr().out


def test_cli_oracle_bump(capsys):
    assert cli_main(["oracle", str(SCENARIOS / "fig2b_central_theta_sweep.json")]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 2 and "FAIL" not in out


def test_cli_run_reproduces_bytes(tmp_path):
    scenario = SCENARIOS / "fig12_geometry_only_theta_sweep.json"
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli_main(["run", str(scenario), "-o", str(out1)]) == 0
    assert cli_main(["run", str(scenario), "-o", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
