import csv
import io
import json
import math

import numpy as np
import pytest

from nhkit import cli
from nhkit.errors import ConfigError
from nhkit.problems import IndexSet

SINH1 = 1.1752011936438014569
HALF_E2 = 3.1945280494653251136  # (e^2 - 1) / 2


def _write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def _strip_timings(text):
    env = json.loads(text)
    env.pop("timings")
    return json.dumps(env, sort_keys=True)


VERIFY = {"problem": {"variant": "separated", "h": [1.0]}, "N": 4, "analysis": "verify", "seed": 7}
HS_DELTA = {
    "problem": {"variant": "separated", "h": [math.e]},
    "N": 6,
    "operator": {"type": "multiplier", "factors": [{"builtin": "delta"}]},
    "analysis": {"name": "hs"},
}
NONLOCAL = {
    "problem": {"variant": "nonlocal", "a": 2.0, "b": -1.0, "q": {"name": "zero"}},
    "N": 8,
    "analysis": "nonlocal-spectrum",
}


# validation -----------------------------------------------------------------


@pytest.mark.parametrize(
    "patch, path",
    [
        ({"problem": {"variant": "separated", "h": [-1.0]}}, "problem.h[0]"),
        ({"problem": {"variant": "torus", "h": [1.0]}}, "problem.variant"),
        ({"N": -1}, "N"),
        ({"N": 2.5}, "N"),
        ({"analysis": "spectral"}, "analysis.name"),
        ({"analysis": "hs"}, "operator"),
        ({"operator": {"type": "multiplier", "factors": [{"builtin": "bogus"}]}, "analysis": "trace"},
         "operator.factors[0].builtin"),
        ({"operator": {"type": "multiplier", "factors": [{"builtin": "weight_power"}]}, "analysis": "trace"},
         "operator.factors[0].s"),
        ({"output": {"format": "xml"}}, "output.format"),
        ({"grid": {"nodes_per_dim": 64, "panels_per_dim": 100}}, "grid"),
        ({"extra": 1}, "extra"),
    ],
)
def test_validate_reports_field_path(patch, path):
    with pytest.raises(ConfigError) as info:
        cli.validate(dict(VERIFY, **patch))
    assert info.value.path == path


def test_validate_nonlocal_normalisation():
    bad = dict(NONLOCAL, problem={"variant": "nonlocal", "a": 3.0, "b": -1.0})
    with pytest.raises(ConfigError) as info:
        cli.validate(bad)
    assert info.value.path == "problem.a"
    auto = cli.validate(dict(NONLOCAL, problem={"variant": "nonlocal", "a": "auto", "b": -1.0,
                                                "q": {"name": "cos", "amplitude": 0.1}}))
    assert auto["problem"]["a"] == pytest.approx(2.0)


def test_validate_builds_nothing(monkeypatch):
    def boom(*args, **kwargs):
        raise AssertionError("validation constructed a grid")

    monkeypatch.setattr(cli, "grid_for", boom)
    monkeypatch.setattr(cli, "build_grid", boom)
    cli.validate(HS_DELTA)
    with pytest.raises(ConfigError):
        cli.validate(dict(HS_DELTA, N=1000))


def test_main_exit_codes(tmp_path, capsys):
    assert cli.main(["validate", _write(tmp_path, VERIFY)]) == 0
    bad = _write(tmp_path, dict(VERIFY, N="four"), "bad.json")
    assert cli.main(["run", bad]) == 2
    assert "N" in capsys.readouterr().err
    assert cli.main(["validate", str(tmp_path / "missing.json")]) == 2
    # the resolvent symbol is singular at xi = 0 when h = e
    singular = dict(HS_DELTA, operator={"type": "multiplier", "factors": [{"builtin": "resolvent_power", "s": 1}]},
                    analysis="trace")
    assert cli.main(["run", _write(tmp_path, singular, "sing.json"), "--out", str(tmp_path / "o.json")]) == 1
    err = capsys.readouterr().err
    assert "nhkit.symbols" in err


def test_list_builtins(capsys):
    assert cli.main(["list-builtins"]) == 0
    out = capsys.readouterr().out
    for name in ("separated", "nonlocal", "weight_power", "resolvent_power", "trig", "dirichlet", "nuclearity"):
        assert name in out


# run --------------------------------------------------------------------------


def test_run_verify_periodic():
    env = cli.run(VERIFY)
    assert env["summary"]["biorthogonality_defect"] <= 1e-12
    assert env["seed"] == 7
    assert env["payload"]["columns"][0] == "xi_1"
    assert [tuple(r[:1]) for r in env["payload"]["rows"]] == list(IndexSet(1, 4))


def test_run_hs_delta_two_paths():
    s = cli.run(HS_DELTA)["summary"]
    assert s["kernel"] == pytest.approx(SINH1, rel=1e-12)
    assert s["convolution"] == pytest.approx(math.sqrt(HALF_E2), rel=1e-12)
    assert s["sandwich_holds"]


def test_run_nonlocal_seeds():
    env = cli.run(NONLOCAL)
    rows = env["payload"]["rows"]
    assert len(rows) == 17
    cols = env["payload"]["columns"]
    j, lam = cols.index("j"), cols.index("lambda")
    for r in rows:
        assert abs(r[lam] - (2 * math.pi * r[j] - 1j * math.log(2))) <= 1e-12
    assert [r[j] for r in rows] == [xi[0] for xi in IndexSet(1, 8)]


@pytest.mark.parametrize("analysis", [
    {"name": "schatten", "r": [0.5, 1.0]},
    {"name": "trace"},
    {"name": "nuclearity", "r": 0.5},
    {"name": "summability", "r": 1.0, "p": 2.0},
])
def test_run_operator_analyses(analysis):
    cfg = {
        "problem": {"variant": "separated", "h": [0.5]},
        "N": 4,
        "operator": {"type": "full_symbol", "factors": [{"builtin": "weight_power", "s": 3}],
                     "window": {"builtin": "trig", "amplitude": 0.3}},
        "analysis": analysis,
    }
    env = cli.run(cfg)
    assert env["analysis"] == analysis["name"]
    assert env["payload"]["columns"]
    for row in env["payload"]["rows"]:
        assert len(row) == len(env["payload"]["columns"])


def test_run_fd_blackbox_schatten():
    cfg = {
        "problem": {"variant": "separated", "h": [1.0]},
        "N": 2,
        "grid": {"nodes_per_dim": 16, "panels_per_dim": 4},
        "operator": {"type": "fd", "coeffs": [{"alpha": [2], "a": 1.0}]},
        "analysis": {"name": "schatten", "r": 2.0},
    }
    env = cli.run(cfg)
    assert env["summary"]["rank"] >= 1


# export -----------------------------------------------------------------------


def test_deterministic_bytes(tmp_path):
    cfg = dict(HS_DELTA, seed=3)
    a = cli.to_json(cli.run(cfg))
    b = cli.to_json(cli.run(cfg))
    assert _strip_timings(a) == _strip_timings(b)
    assert cli.to_csv(cli.run(cfg)) == cli.to_csv(cli.run(cfg))


def test_json_round_trip():
    env = cli.run(NONLOCAL)
    back = json.loads(cli.to_json(env))
    assert back["version"] == env["version"]
    assert back["config"]["problem"]["b"] == {"re": -1.0, "im": 0.0}
    for row, orig in zip(back["payload"]["rows"], env["payload"]["rows"]):
        lam = orig[1]
        assert complex(row[1]["re"], row[1]["im"]) == lam
    assert back["summary"]["max_residual"] == env["summary"]["max_residual"]


def test_csv_complex_columns_and_precision():
    env = cli.run(NONLOCAL)
    rows = list(csv.reader(io.StringIO(cli.to_csv(env))))
    header = rows[0]
    assert header[:3] == ["j", "lambda_re", "lambda_im"]
    assert len(rows) == 18
    for line, orig in zip(rows[1:], env["payload"]["rows"]):
        assert complex(float(line[1]), float(line[2])) == orig[1]


def test_empty_payload_header_only():
    cfg = {
        "problem": {"variant": "separated", "h": [1.0]},
        "N": 2,
        "operator": {"type": "multiplier", "factors": [{"builtin": "identity"}], "scale": 0.0},
        "analysis": {"name": "schatten", "r": 1.0},
    }
    text = cli.to_csv(cli.run(cfg))
    assert text == "rank,singular_value,eigenvalue\n"


def test_export_to_path(tmp_path, capsys):
    env = cli.run(VERIFY)
    out = tmp_path / "r.csv"
    cli.export(env, "csv", str(out))
    assert out.read_text().splitlines()[0].startswith("xi_1,weight")
    with pytest.raises(OSError, match="nope"):
        cli.export(env, "json", str(tmp_path / "nope" / "r.json"))
    cli.export(env, "json", None)
    assert json.loads(capsys.readouterr().out)["analysis"] == "verify"


def test_main_writes_configured_output(tmp_path):
    out = tmp_path / "spectrum.csv"
    cfg = dict(NONLOCAL, output={"path": str(out), "format": "csv"})
    assert cli.main(["run", _write(tmp_path, cfg)]) == 0
    assert len(out.read_text().splitlines()) == 18
    assert cli.main(["run", _write(tmp_path, cfg), "--format", "json", "--out", str(tmp_path / "o.json")]) == 0
    env = json.loads((tmp_path / "o.json").read_text())
    assert np.isclose(env["summary"]["max_residual"], 0.0, atol=1e-12)


def test_thread_env(monkeypatch, tmp_path):
    monkeypatch.setenv("NHKIT_THREADS", "1")
    assert cli.main(["run", _write(tmp_path, VERIFY), "--out", str(tmp_path / "v.json")]) == 0


def test_demo_configs_validate():
    import glob
    import os

    paths = sorted(glob.glob(os.path.join(os.path.dirname(__file__), "..", "demos", "configs", "*.json")))
    assert paths
    for path in paths:
        assert cli.main(["validate", path]) == 0
