import json

import pytest

from spherebranch import log
from spherebranch.cli import EXIT_COMPUTATION, EXIT_INVALID, EXIT_OK, build_parser, main


def _spec(k: int = 3, dim: int = 12, **extra) -> dict:
    spec = {
        "dim": dim,
        "L": {"builder": "Tk", "k": k},
        "C": {"builder": "harmonic"},
        "N": {"builder": "paired_rotation"},
    }
    spec.update(extra)
    return spec


@pytest.fixture(autouse=True)
def quiet_logs(monkeypatch):
    monkeypatch.setenv("SPHEREBRANCH_LOG", "error")
    monkeypatch.setattr(log, "_configured", False)


@pytest.fixture
def spec_file(tmp_path):
    def _write(payload, name: str = "problem.json"):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding="utf-8")
        return str(path)

    return _write


def test_parser_knows_every_subcommand():
    parser = build_parser()
    for argv in (
        ["certify", "--lambda-star", "0"],
        ["spectrum"],
        ["degree", "--alpha", "-0.5", "--beta", "0.5"],
        ["conjecture"],
        ["trace", "--anchor-lambda", "0"],
        ["bifurcations", "--lambda-star", "0"],
        ["map", "--window=-1,1,-1,8"],
        ["example", "k3"],
    ):
        args = parser.parse_args(argv)
        assert args.build(args)["command"] == argv[0]


def test_spectrum_writes_report(tmp_path, spec_file, capsys):
    out = tmp_path / "run"
    assert main(["spectrum", "--spec", spec_file(_spec()), "--out", str(out)]) == EXIT_OK
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    values = [(round(r["value"], 9), r["geometric_mult"]) for r in report["results"]["spectrum"]]
    assert values[0] == (0.0, 3)
    assert values[1:3] == [(4.0, 1), (5.0, 1)]
    assert (out / "timings.json").exists()
    assert json.loads(capsys.readouterr().out) == report


def test_certify_reports_parity(tmp_path, spec_file, capsys):
    code = main(["certify", "--spec", spec_file(_spec(k=2)), "--lambda-star", "0", "--out", str(tmp_path)])
    assert code == EXIT_OK
    (cert,) = json.loads(capsys.readouterr().out)["results"]["certificates"]
    assert cert["geometric_mult"] == 2
    assert cert["h2_odd"] is False
    assert cert["h3_holds"] is True


def test_trace_writes_branch_csv(tmp_path, spec_file, capsys):
    code = main(["trace", "--spec", spec_file(_spec()), "--anchor-lambda", "5", "--bound", "4", "--out", str(tmp_path)])
    assert code == EXIT_INVALID
    assert "bound" in capsys.readouterr().err

    code = main(["trace", "--spec", spec_file(_spec()), "--anchor-lambda", "5", "--out", str(tmp_path)])
    assert code == EXIT_OK
    result = json.loads(capsys.readouterr().out)["results"]["trace"]
    assert result["branch"]["termination"]["kind"] == "Unbounded"
    assert result["verdict"]["verdict"] == "Unbounded"
    header = (tmp_path / "branch.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("step,s,lambda,x_1")


def test_truncation_must_leave_a_tail(tmp_path, spec_file, capsys):
    code = main(["spectrum", "--spec", spec_file(_spec(k=4, dim=4)), "--out", str(tmp_path)])
    assert code == EXIT_INVALID
    assert "T_k" in capsys.readouterr().err


def test_eigenvalue_endpoint_is_a_computation_error(tmp_path, spec_file, capsys):
    code = main(["degree", "--spec", spec_file(_spec()), "--alpha", "0", "--beta", "1", "--out", str(tmp_path)])
    assert code == EXIT_COMPUTATION
    err = capsys.readouterr().err
    assert err.startswith("error: degree:")
    assert "endpoint" in err


def test_non_eigenvalue_anchor(tmp_path, spec_file, capsys):
    code = main(["trace", "--spec", spec_file(_spec()), "--anchor-lambda", "1", "--out", str(tmp_path)])
    assert code == EXIT_COMPUTATION
    assert "not an eigenvalue" in capsys.readouterr().err


@pytest.mark.parametrize(
    "payload",
    [
        _spec(extra_key=1),
        _spec(dim=1),
        {"dim": 4, "L": {"builder": "Tk"}, "C": {"builder": "harmonic"}, "N": {"builder": "paired_rotation"}},
        "{not json",
    ],
)
def test_invalid_specs_exit_with_three(tmp_path, spec_file, payload):
    assert main(["spectrum", "--spec", spec_file(payload), "--out", str(tmp_path)]) == EXIT_INVALID


def test_missing_spec_is_invalid(tmp_path):
    assert main(["spectrum", "--out", str(tmp_path)]) == EXIT_INVALID


def test_bad_flags_exit_with_three(tmp_path):
    assert main(["example", "k4"]) == EXIT_INVALID
    assert main(["example", "k3", "--n", "4", "--out", str(tmp_path)]) == EXIT_INVALID
    assert main(["map", "--window", "1,2"]) == EXIT_INVALID
    assert main(["degree", "--alpha", "1", "--beta", "0", "--out", str(tmp_path)]) == EXIT_INVALID


def test_bad_settings_file(tmp_path, spec_file):
    settings = tmp_path / "config.yaml"
    settings.write_text("continuation:\n  max_step: -1\n", encoding="utf-8")
    code = main(["spectrum", "--spec", spec_file(_spec()), "--config", str(settings), "--out", str(tmp_path)])
    assert code == EXIT_INVALID


def test_version_and_help_exit_cleanly(capsys):
    assert main(["--version"]) == EXIT_OK
    assert "spherebranch" in capsys.readouterr().out


def test_reports_are_byte_identical(tmp_path, spec_file):
    spec = spec_file(_spec(k=1, dim=10))
    first, second = tmp_path / "a", tmp_path / "b"
    for out in (first, second):
        argv = ["map", "--spec", spec, "--window=-1,1,-0.5,2.5", "--grid", "41,61", "--out", str(out)]
        assert main(argv) == EXIT_OK
    assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()
    assert (first / "component_0.csv").read_bytes() == (second / "component_0.csv").read_bytes()


def test_settings_choose_the_log_level(tmp_path, spec_file, monkeypatch, capsys):
    monkeypatch.delenv("SPHEREBRANCH_LOG", raising=False)
    spec = spec_file(_spec())
    quiet, loud = tmp_path / "quiet.yaml", tmp_path / "loud.yaml"
    quiet.write_text("logging:\n  level: error\n", encoding="utf-8")
    loud.write_text("logging:\n  level: info\n", encoding="utf-8")

    assert main(["spectrum", "--spec", spec, "--config", str(quiet), "--out", str(tmp_path / "q")]) == EXIT_OK
    assert "[Spectrum]" not in capsys.readouterr().err
    assert main(["spectrum", "--spec", spec, "--config", str(loud), "--out", str(tmp_path / "l")]) == EXIT_OK
    assert "[Spectrum]" in capsys.readouterr().err


def test_unknown_log_level_still_runs(tmp_path, spec_file, monkeypatch):
    monkeypatch.setenv("SPHEREBRANCH_LOG", "verbose")
    assert main(["spectrum", "--spec", spec_file(_spec()), "--out", str(tmp_path)]) == EXIT_OK


def test_bad_thread_count_is_invalid_input(tmp_path, spec_file, monkeypatch):
    monkeypatch.setenv("SPHEREBRANCH_THREADS", "many")
    assert main(["spectrum", "--spec", spec_file(_spec()), "--out", str(tmp_path)]) == EXIT_INVALID


def test_seed_defaults_to_runtime_setting(tmp_path, spec_file, capsys):
    settings = tmp_path / "seeded.yaml"
    settings.write_text("runtime:\n  seed: 7\n", encoding="utf-8")
    spec = spec_file(_spec())
    assert main(["spectrum", "--spec", spec, "--config", str(settings), "--out", str(tmp_path / "a")]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["seed"] == 7
    argv = ["spectrum", "--spec", spec, "--config", str(settings), "--seed", "3", "--out", str(tmp_path / "b")]
    assert main(argv) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["seed"] == 3


def test_closed_loop_trace_reports(tmp_path, spec_file, capsys):
    code = main(["trace", "--spec", spec_file(_spec(k=2)), "--anchor-lambda", "0", "--out", str(tmp_path)])
    assert code == EXIT_OK
    result = json.loads(capsys.readouterr().out)["results"]["trace"]
    assert result["branch"]["termination"]["kind"] == "ClosedLoop"
    assert result["branch"]["termination"]["detail"]["on_trivial_set"] is True
    assert result["verdict"]["verdict"] == "IsolatedCompact"
