import json

import pytest

from sigmapoly import io
from sigmapoly.cli import run
from sigmapoly.polycycle import normal_form_model

SYSTEM = {
    "X": {"fx": [[0, 0, 1.0]], "fy": [[1, 0, 1.0]]},
    "Y": {"fx": [[0, 0, 1.0]], "fy": [[0, 0, -1.0]]},
    "h": [[0, 1, 1.0]],
}


@pytest.fixture
def system_path(tmp_path):
    p = tmp_path / "sys.json"
    p.write_text(json.dumps(SYSTEM))
    return str(p)


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_classify(system_path, capsys):
    assert run(["classify", "--system", system_path, "--point=-0.5,0"]) == 0
    d = _json_out(capsys)
    assert d["class"] == "crossing"


def test_classify_tangency(system_path, capsys):
    assert run(["classify", "--system", system_path, "--point", "0,0"]) == 0
    d = _json_out(capsys)
    assert d["class"] == "tangency"
    assert d["order"] == 2


def test_transition_oracle(system_path, capsys):
    rc = run([
        "transition", "--system", system_path,
        "--section", "1,0,0,1,2", "--x", "0.3",
    ])
    assert rc == 0
    assert _json_out(capsys)["T"] == pytest.approx((1 - 0.09) / 2, abs=1e-9)


def test_mirror_oracle(system_path, capsys):
    assert run(["mirror", "--system", system_path, "--x", "0.4"]) == 0
    assert _json_out(capsys)["rho"] == pytest.approx(-0.4, abs=1e-8)


def test_germ_roundtrip(system_path, tmp_path, capsys):
    out = tmp_path / "germ.json"
    rc = run([
        "germ", "--system", system_path, "--section", "1,0,0,1,2",
        "--degree", "2", "--window", "0.3", "--out", str(out),
    ])
    assert rc == 0
    g = io.read_germ(str(out))
    assert g.kappa == pytest.approx(-0.5, rel=1e-6)
    # round-trip invariant: re-serializing gives identical bytes
    assert io.dumps(g.to_dict()) + "\n" == out.read_text()


def test_polycycle_solve(tmp_path, capsys):
    model = normal_form_model(1.0, -0.25, 2, lam=(0.01,))
    mp = tmp_path / "model.json"
    mp.write_text(io.dumps(io.model_to_dict(model)))
    assert run(["polycycle-solve", "--model", str(mp)]) == 0
    reports = _json_out(capsys)
    pts = sorted(r["point"][0] for r in reports if r["locus"] == "interior")
    assert pts == pytest.approx([-0.2, -0.05], abs=1e-9)


def test_scenario_curves_values(capsys):
    rc = run(["scenario-curves", "--scenario", "cusp-synthetic", "--param", "0.03"])
    assert rc == 0
    d = _json_out(capsys)
    assert d["Vbar"] == pytest.approx(-0.102, abs=1e-12)
    assert d["Ibar"] == pytest.approx(0.098, abs=1e-12)
    assert d["Abar"] == pytest.approx(0.198, abs=1e-12)


def test_exit_code_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run(["classify", "--system", str(bad), "--point", "0,0"]) == 2


def test_exit_code_numeric_error(system_path, capsys):
    # tiny section far from the orbit: NoHit
    rc = run([
        "transition", "--system", system_path,
        "--section=-5,-5,0,1,0.01", "--x", "0.3",
    ])
    assert rc == 3


def test_exit_code_io_failure(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert run(["classify", "--system", missing, "--point", "0,0"]) == 4


def test_unknown_scenario(capsys):
    assert run(["scenario-curves", "--scenario", "nope", "--param", "0.1"]) == 2


def test_diagram_deterministic(tmp_path, capsys):
    for d in ("d1", "d2"):
        rc = run([
            "diagram", "--scenario", "vi-foldfold-synthetic",
            "--grid", "5x5", "--out", str(tmp_path / d),
        ])
        assert rc == 0
    for name in ("diagram.csv", "curves.csv"):
        b1 = (tmp_path / "d1" / name).read_bytes()
        b2 = (tmp_path / "d2" / name).read_bytes()
        assert b1 == b2 and len(b1) > 0


def test_diagram_ranges_override(tmp_path):
    rc = run([
        "diagram", "--scenario", "cusp-synthetic", "--grid", "3x3",
        "--ranges", "0:0.04,-0.1:0.1", "--out", str(tmp_path / "d"),
    ])
    assert rc == 0
    lines = (tmp_path / "d" / "diagram.csv").read_text().strip().split("\n")
    assert len(lines) == 10
    p1s = sorted({float(l.split(",")[0]) for l in lines[1:]})
    assert p1s == pytest.approx([0.0, 0.02, 0.04])


def test_diagram_bad_ranges(tmp_path, capsys):
    rc = run([
        "diagram", "--scenario", "cusp-synthetic", "--grid", "3x3",
        "--ranges", "oops", "--out", str(tmp_path / "d"),
    ])
    assert rc == 2
