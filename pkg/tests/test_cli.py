import json

import pytest
from returns.result import Failure

from cqblab.cli import suite as suite_module
from cqblab.cli.main import (
    EXIT_ERROR,
    EXIT_OK,
    EXIT_VERDICT_FAILED,
    build_parser,
    load_config,
    parse_metric,
    parse_phi,
    run_cli,
)
from cqblab.cli.suite import format_table, suite
from cqblab.models.config import AnalysisSettings, Command
from cqblab.models.suite import CriterionResult

FLAG = ["--family", "A", "--rank", "2", "--phi", "1,2", "--metric", "ke"]


def output(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def test_positive_cqb_space(capsys):
    argv = ["check", "--family", "A", "--rank", "5", "--phi", "2,4", "--what", "cqb"]
    assert run_cli([*argv, "--metric", "ke"]) == EXIT_OK
    assert output(capsys)["report"]["verdict"] == "positive"


def test_flag_is_only_nonnegative(capsys):
    assert run_cli(["check", *FLAG, "--what", "cqb", "--sign", "pos"]) == (
        EXIT_VERDICT_FAILED
    )
    report = output(capsys)
    assert report["report"]["verdict"] == "nonnegative_with_kernel"
    assert report["holds"] is False
    assert run_cli(["check", *FLAG, "--what", "cqb", "--sign", "nonneg"]) == EXIT_OK


def test_rank_limited_check(capsys):
    argv = ["check", *FLAG, "--what", "rankk", "--rank-limit", "2", "--mode", "dcqb"]
    assert run_cli(argv) == EXIT_OK
    assert output(capsys)["report"]["rank_limit"] == 2


def test_rankk_needs_a_limit(capsys):
    assert run_cli(["check", *FLAG, "--what", "rankk"]) == EXIT_ERROR
    assert "rank-limit" in capsys.readouterr().err


def test_flow_closed_form(capsys, tmp_path):
    csv_path = tmp_path / "run.csv"
    argv = ["flow", "--n", "1", "--k0", "1", "--t-max", "0.5", "--dt", "1e-4"]
    assert run_cli([*argv, "--csv", str(csv_path)]) == EXIT_OK
    report = output(capsys)
    assert report["k_final"] == pytest.approx(2.0, abs=1e-6)
    assert report["notice"] is None
    assert csv_path.read_text().startswith("t,norm_R,min_ricci_eig")


def test_flow_step_defaults_to_curvature_scale(capsys):
    # |R0| = 99 gives dt = 1e-5
    argv = ["flow", "--n", "1", "--k0", "99", "--t-max", "1e-3"]
    assert run_cli(argv) == EXIT_OK
    report = output(capsys)
    assert report["steps"] == 100
    assert report["notice"] is None
    assert report["k_final"] == pytest.approx(99 / (1 - 99e-3), rel=1e-8)


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "--family", "A", "--rank", "2", "--phi", "1,x"],
        ["check", "--family", "A", "--rank", "2", "--phi", "1,2", "--metric", "c=1"],
        ["check", "--family", "D", "--rank", "2", "--phi", "1"],
        ["space", "--family", "A", "--rank", "2", "--phi", "5"],
    ],
)
def test_errors_exit_one(argv, capsys):
    assert run_cli(argv) == EXIT_ERROR
    assert capsys.readouterr().err.startswith("error:")


def test_unknown_family_from_config(tmp_path, capsys):
    config = tmp_path / "job.json"
    config.write_text(json.dumps({"family": "G", "rank": 2, "phi": "1"}))
    assert run_cli(["space", "--config", str(config)]) == EXIT_ERROR
    assert "Unknown Lie family" in capsys.readouterr().err


def test_flags_override_config_and_env(tmp_path):
    config = tmp_path / "job.json"
    config.write_text(json.dumps({"rank": 3, "seed": 11, "what": "dcqb"}))
    args = build_parser().parse_args(["check", "--config", str(config), "--rank", "4"])
    job = load_config(args, environ={"CQBLAB_SEED": "5"}).unwrap()
    assert job.command is Command.CHECK
    assert job.rank == 4
    assert job.seed == 11
    assert job.what.value == "dcqb"
    bare = build_parser().parse_args(["check"])
    assert load_config(bare, environ={"CQBLAB_SEED": "5"}).unwrap().seed == 5
    assert isinstance(load_config(bare, environ={"CQBLAB_SEED": "x"}), Failure)


def test_reports_are_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        argv = ["check", *FLAG, "--what", "rank1", "--seed", "3", "--json", str(path)]
        run_cli(argv)
    capsys.readouterr()
    first, second = (p.read_bytes() for p in paths)
    assert first == second
    text = first.decode()
    assert json.loads(text)["provenance"]["job"]["seed"] == 3
    assert text == json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n"


def test_space_command(capsys):
    assert run_cli(["space", "--family", "A", "--rank", "5", "--phi", "2,4"]) == EXIT_OK
    report = output(capsys)
    assert report["space"]["n"] == 12
    assert report["chevalley_verified"] is True
    assert report["kahler_einstein"]["c"] == ["4", "4"]


def test_curvature_dump_feeds_check(tmp_path, capsys):
    dump = tmp_path / "tensor.json"
    argv = ["curvature", *FLAG, "--tensor", str(dump)]
    assert run_cli(argv) == EXIT_OK
    curvature = output(capsys)
    assert curvature["einstein_constant"] == pytest.approx(1.0)
    check = ["check", "--tensor", str(dump), "--what", "dcqb"]
    assert run_cli(check) == EXIT_OK
    assert output(capsys)["report"]["verdict"] == "positive"


def test_parse_helpers(flag_a2):
    assert parse_phi("2, 4").unwrap() == [2, 4]
    assert isinstance(parse_phi(""), Failure)
    assert parse_metric(flag_a2.space, "c=1/2,1").unwrap().c[0] == 0.5
    assert isinstance(parse_metric(flag_a2.space, "c=a,b"), Failure)


def test_suite_isolates_failing_criteria(monkeypatch):
    def broken(cfg):
        raise RuntimeError("boom")

    def fine(cfg):
        return CriterionResult(number=2, name="fine", passed=True, tolerance=1e-8)

    monkeypatch.setattr(
        suite_module, "CRITERIA", [(1, "broken", broken), (2, "fine", fine)]
    )
    report = suite(AnalysisSettings())
    assert not report.passed
    assert report.criteria[0].detail == "Error running criterion: boom"
    assert report.criteria[1].passed
    table = format_table(report)
    assert "FAIL" in table
    assert "pass" in table
