import json
import math
import shutil
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from bergfock.cli import ConfigError, RunConfig, run
from bergfock.serialize import dumps, loads, read_poly
from bergfock.space import Poly


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, data in {"const1": [[1, 0]], "z": [0, 1], "k": [[1, 0], [1, 0]], "z6": [0] * 6 + [1]}.items():
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(data))
        paths[name] = str(path)
    return paths


def call(argv, capsys):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_p2_example(files, capsys):
    code, out, _ = call(["solve", "--p", "2", "--degree", "3", "--kernel", files["z"], "--weight", "fock:alpha=1"], capsys)
    assert code == 0
    rep = loads(out)
    assert rep["coefficients"][1][0] == pytest.approx(1 / math.sqrt(math.pi), rel=1e-14)
    assert all(c == [0.0, 0.0] for i, c in enumerate(rep["coefficients"]) if i != 1)
    assert {"coefficients", "dual_norm", "residual", "iterations"} <= set(rep)


def test_solve_general_p_writes_file(files, tmp_path, capsys):
    out = tmp_path / "sol.json"
    code, _, _ = call(["solve", "--weight", "fock:alpha=1", "--p", "3", "--degree", "8", "--kernel", files["k"],
                       "--out", str(out)], capsys)
    assert code == 0
    rep = loads(out.read_text())
    assert rep["converged"] and rep["residual"] < 1e-8
    assert read_poly(str(out)).degree == 8  # solution files are valid polynomial inputs


def test_verify_plane_equality(files, capsys):
    code, out, _ = call(["verify", "plane", "--weight", "fock:alpha=1", "--p", "2", "--kernel", files["const1"]], capsys)
    assert code == 0
    (rep,) = loads(out)
    assert abs(rep["slack"]) < 1e-9 and rep["pass"]


def test_verify_disc_batch(files, capsys):
    code, out, _ = call(["verify", "disc", "--weight", "affine:a=2,b=1,R=1", "--p", "1.5", "3",
                         "--kernel", files["k"], files["z"], "--degree", "8", "--tol", "1e-6"], capsys)
    assert code == 0
    reps = loads(out)
    assert len(reps) == 4 and all(r["pass"] for r in reps)
    assert [r["context"]["p"] for r in reps] == [1.5, 3.0, 1.5, 3.0]


def test_verify_failure_exit_code(files, capsys):
    # a negative tolerance makes even the equality case fail
    code, _, _ = call(["verify", "plane", "--weight", "fock:alpha=1", "--p", "2", "--kernel", files["const1"],
                       "--tol", "-1"], capsys)
    assert code == 2
    code, _, _ = call(["verify", "base-identity", "--weight", "power:beta=2,R=1", "--p", "2.5", "--f", files["k"]], capsys)
    assert code == 0


def test_missing_weight_is_usage_error(files, capsys):
    code, _, err = call(["solve", "--p", "2", "--degree", "3", "--kernel", files["z"]], capsys)
    assert code == 2
    assert "usage" in err and "--weight" in err


@pytest.mark.parametrize("argv,key", [
    (["solve", "--weight", "fock:alpha=-1", "--kernel", "k"], "weight"),
    (["solve", "--weight", "fock:gamma=1", "--kernel", "k"], "weight.gamma"),
    (["solve", "--weight", "fock:alpha=1", "--kernel", "k", "--degree", "-2"], "degree"),
    (["solve", "--weight", "fock:alpha=1", "--kernel", "k", "--radial-order", "2"], "radial_order"),
])
def test_bad_config_single_line(argv, key, capsys):
    code, _, err = call(argv, capsys)
    assert code == 2
    last = err.strip().splitlines()[-1]
    assert last.startswith(f"bergfock: error: {key}")


def test_unknown_subcommand(capsys):
    assert call(["frobnicate"], capsys)[0] == 2
    assert call([], capsys)[0] == 2


def test_missing_kernel_file(capsys):
    code, _, err = call(["solve", "--weight", "fock:alpha=1", "--kernel", "/nonexistent.json"], capsys)
    assert code == 2 and "nonexistent" in err


def test_deterministic_output(files, capsys):
    argv = ["solve", "--weight", "affine:a=2,b=1,R=1", "--p", "3", "--degree", "5", "--kernel", files["k"]]
    a = call(argv, capsys)[1]
    b = call(argv, capsys)[1]
    assert a == b
    assert "0.0" in a


def test_means_csv(files, capsys):
    code, out, _ = call(["means", "--f", files["k"], "--weight", "affine:a=2,b=1,R=1", "--p", "2", "--count", "3"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("#") and lines[1] == "r,Mp,Dp,Np" and len(lines) == 5
    r, mp = map(float, lines[-1].split(",")[:2])
    assert mp == pytest.approx(math.sqrt(4 * math.pi), rel=1e-14)


def test_logconvex_subcommands(files, tmp_path, capsys):
    code, out, _ = call(["logconvex", "s-integral", "--weight", "fock:alpha=1", "--x0", "1"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "x0,S"
    assert float(out.splitlines()[1].split(",")[1]) == pytest.approx(0.6894680390, abs=1e-9)
    g = tmp_path / "g.csv"
    code, _, err = call(["logconvex", "decay", "--f", files["z6"], "--p", "2", "--weight", "fock:alpha=1",
                         "--out", str(g)], capsys)
    assert code == 0 and json.loads(err)["pass"]
    assert g.read_text().splitlines()[0] == "r,g"
    code, out, _ = call(["logconvex", "convexity", "--f", files["k"], "--p", "3", "--weight", "fock:alpha=1"], capsys)
    assert code == 0 and loads(out)["passed"]
    code, out, _ = call(["logconvex", "gamma", "--x", "10,20,40,80"], capsys)
    assert code == 0 and out.splitlines()[0] == "x,ratio"


def test_density_subcommands(capsys):
    code, out, _ = call(["density", "check", "--weight", "fock:alpha=1", "--p", "2", "--rho", "0.5", "--beta", "0.75"], capsys)
    assert code == 0 and loads(out)[0]["finite"]
    code, out, _ = call(["density", "check", "--weight", "fock:alpha=1", "--p", "2", "--rho", "0.9", "--beta", "0.5"], capsys)
    assert code == 1 and loads(out)[0]["integrals"]["I1"]["value"] == math.inf
    code, out, _ = call(["density", "fock", "--alpha", "0.1", "1", "--p", "1.5", "3"], capsys)
    assert code == 0 and len(loads(out)) == 4
    code, _, _ = call(["density", "check", "--weight", "fock:alpha=1", "--beta", "1"], capsys)
    assert code == 2


def test_convergence_subcommands(files, capsys):
    code, out, _ = call(["convergence", "subspace", "--weight", "fock:alpha=1", "--p", "3", "--kernel", files["k"],
                         "--degrees", "1,2,4"], capsys)
    assert code == 0
    assert [r["n"] for r in loads(out)["rows"]] == [1, 2, 4]
    code, out, _ = call(["convergence", "kernel", "--weight", "fock:alpha=1", "--p", "2", "--kernel", files["const1"],
                         "--direction", files["z"], "--deltas", "0.1,0.01", "--degree", "3"], capsys)
    assert code == 0
    rows = loads(out)["rows"]
    assert rows[1]["distance"] < rows[0]["distance"]


def test_config_file_and_override(files, tmp_path, capsys):
    cfg = RunConfig(weight="fock:alpha=1", p=2.0, degree=3, kernel=files["z"])
    path = tmp_path / "cfg.json"
    path.write_text(cfg.serialize())
    code, out, _ = call(["solve", "--config", str(path)], capsys)
    assert code == 0 and loads(out)["degree"] == 3
    code, out, _ = call(["solve", "--config", str(path), "--degree", "5"], capsys)
    assert loads(out)["degree"] == 5


def test_threads_env(files, capsys, monkeypatch):
    monkeypatch.setenv("EXTREMAL_THREADS", "1")
    serial = call(["verify", "disc", "--weight", "power:beta=2,R=1", "--p", "1.5", "3", "--kernel", files["k"]], capsys)[1]
    monkeypatch.setenv("EXTREMAL_THREADS", "4")
    threaded = call(["verify", "disc", "--weight", "power:beta=2,R=1", "--p", "1.5", "3", "--kernel", files["k"]], capsys)[1]
    assert serial == threaded
    monkeypatch.setenv("EXTREMAL_THREADS", "many")
    assert call(["verify", "disc", "--weight", "power:beta=2,R=1", "--p", "2", "--kernel", files["k"]], capsys)[0] == 2


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit):
        from bergfock.cli import build_parser
        build_parser().parse_args(["solve", "--help"])
    assert "default" in capsys.readouterr().out


@pytest.mark.skipif(shutil.which("bergfock") is None, reason="console script not installed")
def test_console_script(files):
    out = subprocess.run(["bergfock", "logconvex", "gamma"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("x,ratio")
    out = subprocess.run([sys.executable, "-m", "bergfock.cli", "solve", "--kernel", files["z"]],
                         capture_output=True, text=True)
    assert out.returncode == 2


# RunConfig ----------------------------------------------------------------------

configs = st.builds(
    RunConfig,
    weight=st.sampled_from(["fock:alpha=1", "affine:a=2,b=1,R=1", "power:beta=2,R=1", "fock:alpha=0.25"]),
    p=st.floats(1.01, 10, allow_nan=False),
    degree=st.integers(0, 30),
    kernel=st.one_of(st.none(), st.text(min_size=1, max_size=10)),
    tol=st.one_of(st.none(), st.floats(1e-14, 1e-2)),
    grid_tol=st.floats(1e-15, 1e-6),
    radial_order=st.one_of(st.none(), st.integers(4, 128)),
    angular_order=st.one_of(st.none(), st.integers(4, 512)),
    max_degree=st.one_of(st.none(), st.integers(0, 40)),
    out=st.one_of(st.none(), st.text(min_size=1, max_size=10)),
)


@given(configs)
def test_config_round_trip(cfg):
    text = cfg.serialize()
    back = RunConfig.parse(text)
    assert back == cfg
    assert back.serialize() == text


@pytest.mark.parametrize("text,key", [
    ('{"weight": "fock:alpha=1", "colour": 1}', "colour"),
    ('{"p": 2}', "weight"),
    ('{"weight": "fock:alpha=1", "p": -1}', "p"),
    ('{"weight": "fock:alpha=1", "tol": 0}', "tol"),
    ('{"weight": "fock:alpha=1", "angular_order": 2}', "angular_order"),
    ('{"weight": "fock:alpha=1", "max_degree": -1}', "max_degree"),
    ("[1, 2]", "config"),
    ("{", "config"),
])
def test_config_rejections(text, key):
    with pytest.raises(ConfigError) as exc:
        RunConfig.parse(text)
    msg = str(exc.value)
    assert msg.startswith(key) and "\n" not in msg


# serialisation ------------------------------------------------------------------

def test_dumps_format():
    text = dumps({"b": 1.0, "a": [0.1, 2], "c": math.inf, "d": True, "p": Poly([1, 2j])})
    assert text.index('"b"') < text.index('"a"')
    assert "0.10000000000000001" in text and '"inf"' in text
    back = loads(text)
    assert back["c"] == math.inf and back["p"] == [[1.0, 0.0], [0.0, 2.0]]
    assert back["a"][0] == 0.1


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), max_size=8))
def test_dumps_float_round_trip(xs):
    assert loads(dumps({"x": xs}))["x"] == xs
