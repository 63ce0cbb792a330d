import contextlib
import io
import json
import math

from l3lab import cli


def run_cli(argv):
    buf = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
        code = cli.main(argv)
    return code, buf.getvalue(), err.getvalue()


def test_a_text():
    code, out, _ = run_cli(["a"])
    assert code == 0
    assert out.startswith("A = 0.17774")
    assert abs(float(out.splitlines()[0].split("=")[1]) - 0.177744) < 1e-5


def test_a_json_fields_and_agreement_with_text():
    code, out, _ = run_cli(["a", "--format", "json"])
    assert code == 0
    rec = json.loads(out)
    assert set(rec["outputs"]) == {"value", "err", "evals"}
    _, text, _ = run_cli(["a"])
    text_value = float(text.splitlines()[0].split("=")[1])
    assert text_value == rec["outputs"]["value"]


def test_a_tolerance_consistency():
    _, tight, _ = run_cli(["a"])
    _, coarse, _ = run_cli(["a", "--tol", "1e-6"])
    v1 = float(tight.splitlines()[0].split("=")[1])
    v2 = float(coarse.splitlines()[0].split("=")[1])
    assert abs(v1 - v2) < 1e-5


def test_a_record_roundtrip(tmp_path):
    path = tmp_path / "a.json"
    code, _, _ = run_cli(["a", "--format", "json", "--out", str(path)])
    assert code == 0
    rec = cli.ResultRecord.from_json(path.read_text())
    assert rec.command == "a"
    assert "wall_time_s" in rec.meta
    # bit-exact numeric round trip through serialization
    again = cli.ResultRecord.from_json(rec.to_json())
    assert again.outputs["value"] == rec.outputs["value"]
    assert again.meta["wall_time_s"] == rec.meta["wall_time_s"]


def test_stokes_csv_shape():
    code, out, _ = run_cli(["stokes", "--rho-min", "13", "--rho-max", "14",
                            "--rho-step", "1"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "rho,abs_deltaY,exp_rho,theta,digits_lost"
    assert len(lines) == 3
    row = lines[1].split(",")
    assert abs(float(row[3]) - 1.6373) < 5e-3
    assert abs(float(row[2]) - math.exp(13.0)) < 1e-6


def test_stokes_empty_range_usage_error():
    code, _, _ = run_cli(["stokes", "--rho-min", "15", "--rho-max", "13"])
    assert code == 2


def test_stokes_flags_precision_starved_rows():
    code, out, _ = run_cli(["stokes", "--rho-min", "13", "--rho-max", "13",
                            "--rho-step", "1", "--tol", "1e-6"])
    assert code == 1
    row = out.strip().splitlines()[1].split(",")
    assert row[3] == "nan"


def test_manifolds_csv(tmp_path):
    path = tmp_path / "m.csv"
    code, _, _ = run_cli(["manifolds", "--mu", "0.003", "--n", "25",
                          "--out", str(path)])
    assert code == 0
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "branch,t,q1,q2,r,theta"
    assert len(lines) == 51
    assert {line.split(",")[0] for line in lines[1:]} == {
        "unstable_plus", "stable_plus"}


def test_distance_text():
    code, out, _ = run_cli(["distance", "--mu", "1e-3",
                            "--theta-abs", "1.63"])
    assert code == 0
    vals = {line.split(" = ")[0]: float(line.split(" = ")[1])
            for line in out.strip().splitlines()}
    assert abs(vals["asymptotic"] - 9.37e-4) < 1e-5
    assert vals["measured"] > 0
    assert abs(vals["ratio"] - vals["measured"] / vals["asymptotic"]) < 1e-12


def test_singularities_output():
    code, out, _ = run_cli(["singularities"])
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("t*_1,+")


def test_l3_output():
    code, out, _ = run_cli(["l3", "--mu", "0.003"])
    assert code == 0
    assert out.startswith("d_mu = 1.00124999")
    assert "hyperbolic_over_sqrt_mu" in out


def test_separatrix_csv():
    code, out, _ = run_cli(["separatrix", "--t-max", "5", "--n", "21"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,lambda,Lambda,q"
    qs = [float(line.split(",")[3]) for line in lines[1:]]
    a_plus = (-1.0 + math.sqrt(2.0)) / 2.0
    assert all(a_plus - 1e-9 <= q < 1.0 for q in qs)


def test_determinism_of_commands():
    for argv in (["a"], ["a", "--format", "json"],
                 ["stokes", "--rho-min", "13", "--rho-max", "13",
                  "--rho-step", "1"], ["singularities"]):
        _, out1, _ = run_cli(argv)
        _, out2, _ = run_cli(argv)
        assert out1 == out2, argv


def test_config_file_defaults_and_override(tmp_path):
    cfg = tmp_path / "l3lab.cfg"
    cfg.write_text("# settings\ntol = 1e-6\n")
    _, with_cfg, _ = run_cli(["--config", str(cfg), "a", "--format", "json"])
    assert json.loads(with_cfg)["inputs"]["tol"] == 1e-6
    _, flag_wins, _ = run_cli(["--config", str(cfg), "a", "--tol", "1e-9",
                               "--format", "json"])
    assert json.loads(flag_wins)["inputs"]["tol"] == 1e-9


def test_unknown_command_exits_2():
    code, _, _ = run_cli(["frobnicate"])
    assert code == 2


def test_out_of_range_tolerance_exits_2():
    code, _, _ = run_cli(["a", "--tol", "1e-15"])
    assert code == 2


def test_thread_fanout_preserves_output(monkeypatch):
    argv = ["stokes", "--rho-min", "13", "--rho-max", "14", "--rho-step", "1"]
    _, serial, _ = run_cli(argv)
    monkeypatch.setenv("L3LAB_THREADS", "2")
    _, threaded, _ = run_cli(argv)
    assert serial == threaded
