"""CLI tests against the in-process service backend (no --server given)."""

import json

import pytest

from frenetflow import cli

EVOLVE_TOML = """\
subcommand = "evolve"
seed = 7

[grid]
n = 64

[initial]
preset = "perturbed_circle"
amplitude = 0.03
mode = 2

[flow]
a = "k"

[evolution]
dt = 1e-4
t_final = 3e-4
"""

SOLVE_TOML = """\
subcommand = "solve"

[grid]
n = 64
length = 6.283185307179586

[initial]
preset = "plane_wave"
amplitude = 0.4
mode = 1

[solver]
kind = "nls"

[evolution]
dt = 1e-3
t_final = 5e-3
"""


def run_cli(*argv):
    return cli.main(list(argv))


class TestExitCodes:
    def test_evolve_success(self, tmp_path, capsys):
        cfg = tmp_path / "run.toml"
        cfg.write_text(EVOLVE_TOML)
        code = run_cli("evolve", "--config", str(cfg), "--out", str(tmp_path / "out"))
        assert code == 0
        out = capsys.readouterr().out
        assert "wrote" in out
        assert (tmp_path / "out" / "manifest.json").exists()
        assert list((tmp_path / "out").glob("curve_*.csv"))

    def test_config_error_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "run.toml"
        cfg.write_text(EVOLVE_TOML.replace("n = 64", "n = 100"))
        code = run_cli("evolve", "--config", str(cfg), "--out", str(tmp_path / "out"))
        assert code == 2
        assert "power of two" in capsys.readouterr().err
        error = json.loads((tmp_path / "out" / "error.json").read_text())
        assert error["error"]["kind"] == "ConfigError"

    def test_numerical_error_exits_3(self, tmp_path, capsys):
        cfg = tmp_path / "run.toml"
        cfg.write_text(EVOLVE_TOML.replace('a = "k"', 'a = "0"\nc = "1000"'))
        code = run_cli("evolve", "--config", str(cfg), "--out", str(tmp_path / "out"))
        assert code == 3
        error = json.loads((tmp_path / "out" / "error.json").read_text())
        assert error["error"]["kind"] == "BlowUp"


class TestOverrides:
    def test_kind_flag_overrides_solver(self, tmp_path, capsys):
        cfg = tmp_path / "solve.toml"
        cfg.write_text(SOLVE_TOML.replace('kind = "nls"', 'kind = "hirota"\nw = 0.3'))
        code = run_cli(
            "solve",
            "--config",
            str(cfg),
            "--out",
            str(tmp_path / "out"),
            "--kind",
            "nls",
        )
        assert code == 0
        capsys.readouterr()
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["schemes"]["wave"] == "splitstep-yoshida4"
        assert manifest["config"]["solver"]["kind"] == "nls"

    def test_out_flag_overrides_config_directory(self, tmp_path, capsys):
        cfg = tmp_path / "run.toml"
        cfg.write_text(EVOLVE_TOML + '\n[output]\ndirectory = "ignored"\n')
        target = tmp_path / "elsewhere"
        code = run_cli("evolve", "--config", str(cfg), "--out", str(target))
        assert code == 0
        capsys.readouterr()
        assert (target / "manifest.json").exists()
        assert not (tmp_path / "ignored").exists()


class TestDeterminism:
    def test_identical_runs_produce_identical_csv(self, tmp_path, capsys):
        cfg = tmp_path / "run.toml"
        cfg.write_text(EVOLVE_TOML)
        for sub in ("a", "b"):
            assert run_cli(
                "evolve", "--config", str(cfg), "--out", str(tmp_path / sub)
            ) == 0
        capsys.readouterr()
        csvs = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
        assert csvs
        for name in csvs:
            assert (tmp_path / "a" / name).read_text() == (
                tmp_path / "b" / name
            ).read_text()


class TestDiagnose:
    def test_diagnose_consumes_evolve_output(self, tmp_path, capsys):
        cfg = tmp_path / "run.toml"
        cfg.write_text(EVOLVE_TOML)
        assert run_cli(
            "evolve", "--config", str(cfg), "--out", str(tmp_path / "out")
        ) == 0
        capsys.readouterr()
        diag = tmp_path / "diag.toml"
        diag.write_text(
            'subcommand = "diagnose"\n\n[grid]\nn = 64\n\n'
            '[diagnose]\nmanifest = "out/manifest.json"\n'
        )
        code = run_cli(
            "diagnose", "--config", str(diag), "--out", str(tmp_path / "rep")
        )
        assert code == 0
        summary = json.loads(capsys.readouterr().out.split("wrote")[0])
        assert "max_I1_drift" in summary
        assert (tmp_path / "rep" / "report.csv").exists()


class TestParser:
    def test_help_includes_expression_grammar(self):
        text = cli.build_parser().format_help()
        assert "d_s" in text
        assert "tau" in text

    def test_all_subcommands_registered(self):
        parser = cli.build_parser()
        args = parser.parse_args(["classify", "--config", "x.toml"])
        assert args.subcommand == "classify"
        args = parser.parse_args(["serve", "--port", "9000"])
        assert args.port == 9000

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.build_parser().parse_args(["--version"])
        assert exc.value.code == 0
        assert "frenetflow" in capsys.readouterr().out
