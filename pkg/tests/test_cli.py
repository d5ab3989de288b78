import json

import pytest

from mazebdd.cli import EXIT_IO, EXIT_OK, EXIT_PARSE, EXIT_USAGE, main
from mazebdd.fixtures import fixture_path


def _run_args(tmp_path, episodes="40", **extra):
    args = [
        "run",
        "--site", str(fixture_path("shop.site")),
        "--scenario", str(fixture_path("place-order.scenario")),
        "--episodes", episodes,
        "--seed", "42",
        "--out", str(tmp_path / "out"),
    ]
    for key, value in extra.items():
        args.extend([f"--{key.replace('_', '-')}", value])
    return args


def test_run_command_end_to_end(tmp_path, capsys):
    assert main(_run_args(tmp_path)) == EXIT_OK
    out = capsys.readouterr().out
    assert "episodes: 40" in out
    assert "success rate:" in out
    assert "best reward: 11.750000" in out
    assert "scenarios emitted:" in out
    out_dir = tmp_path / "out"
    assert (out_dir / "metrics.csv").exists()
    assert (out_dir / "coverage.csv").exists()
    assert (out_dir / "run.json").exists()
    assert (out_dir / "features" / "place_order.feature").exists()
    payload = json.loads((out_dir / "run.json").read_text())
    assert payload["config"]["episodes"] == 40


def test_run_accepts_algo_and_bool_flags(tmp_path, capsys):
    code = main(_run_args(tmp_path, algo="reinforce", update_on_failure="true", policy_lr="0.1"))
    assert code == EXIT_OK
    payload = json.loads((tmp_path / "out" / "run.json").read_text())
    assert payload["config"]["algo"] == "reinforce"
    assert payload["config"]["update_on_failure"] is True


def test_missing_required_flag_is_usage_error(tmp_path, capsys):
    code = main(["run", "--site", str(fixture_path("shop.site")), "--out", str(tmp_path)])
    assert code == EXIT_USAGE
    assert "agent:" in capsys.readouterr().err


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["explore"]) == EXIT_USAGE


def test_bad_config_value_is_usage_error(tmp_path, capsys):
    assert main(_run_args(tmp_path, episodes="0")) == EXIT_USAGE
    assert "configuration error" in capsys.readouterr().err


def test_bad_bool_is_usage_error(tmp_path, capsys):
    assert main(_run_args(tmp_path, update_on_failure="maybe")) == EXIT_USAGE


def test_unknown_start_page_is_usage_error(tmp_path, capsys):
    scenario = tmp_path / "bad.scenario"
    scenario.write_text("scenario s\nstart nowhere\nendpoint terminal\n")
    args = _run_args(tmp_path)
    args[args.index("--scenario") + 1] = str(scenario)
    assert main(args) == EXIT_USAGE
    assert "configuration error" in capsys.readouterr().err


def test_parse_error_exit_code(tmp_path, capsys):
    site = tmp_path / "broken.site"
    site.write_text("start a\npage a \"A\"\nwarp a -> b\n")
    args = _run_args(tmp_path)
    args[args.index("--site") + 1] = str(site)
    assert main(args) == EXIT_PARSE
    assert "parse error" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path, capsys):
    args = _run_args(tmp_path)
    args[args.index("--site") + 1] = str(tmp_path / "absent.site")
    assert main(args) == EXIT_IO
    assert "i/o error" in capsys.readouterr().err


def test_validate_with_and_without_scenario(capsys):
    assert main(["validate", "--site", str(fixture_path("market.site"))]) == EXIT_OK
    base = capsys.readouterr().out
    assert "site: market" in base
    assert "scenario:" not in base
    code = main([
        "validate",
        "--site", str(fixture_path("market.site")),
        "--scenario", str(fixture_path("market-order.scenario")),
    ])
    assert code == EXIT_OK
    assert "scenario: market-order" in capsys.readouterr().out


def test_validate_parse_error(tmp_path, capsys):
    site = tmp_path / "oops.site"
    site.write_text("nonsense\n")
    assert main(["validate", "--site", str(site)]) == EXIT_PARSE
