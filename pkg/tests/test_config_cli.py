"""Config parsing, hashing and command-line behavior."""

import json
import os

import pytest

from sqgkit.cli import load_targets, main, targets_path
from sqgkit.config import (
    ConfigError,
    DiagnosticsOptions,
    config_hash,
    parse_config_text,
)

MINIMAL = """
alpha = 1.0
N = 64
L = 10.0
t_end = 2.0
"""


class TestParse:
    def test_minimal_with_defaults(self):
        cfg, options, warnings = parse_config_text(MINIMAL)
        assert cfg.alpha == 1.0 and cfg.N == 64 and cfg.L == 10.0
        assert cfg.cfl == 0.5
        assert cfg.dealias is True
        assert options.wq_q == 4.0
        assert warnings == []

    def test_unknown_key_names_line(self):
        text = MINIMAL + "alhpa = 1.0\n"
        with pytest.raises(ConfigError, match=r":6.*alhpa"):
            parse_config_text(text)

    def test_missing_required(self):
        with pytest.raises(ConfigError, match="t_end"):
            parse_config_text("alpha=1.0\nN=64\nL=10.0\n")

    def test_type_error_names_line(self):
        with pytest.raises(ConfigError, match=r":2"):
            parse_config_text("alpha = 1.0\nN = sixty\nL = 10.0\nt_end = 1.0\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text(MINIMAL + "alpha = 0.5\n")

    def test_comments_and_blanks_ignored(self):
        text = "# run\nalpha = 1.0  # critical case\n\nN = 64\nL = 10.0\nt_end = 2.0\n"
        cfg, _, _ = parse_config_text(text)
        assert cfg.alpha == 1.0

    def test_supercritical_warning(self):
        cfg, _, warnings = parse_config_text(MINIMAL.replace("alpha = 1.0", "alpha = 1.5"))
        assert cfg.alpha == 1.5
        assert any("(0, 1]" in w for w in warnings)

    def test_checkpoints_and_centers(self):
        text = MINIMAL + "checkpoints = 0.5,1.0,2.0\ninit_kind = two_bump\ncenters = -1:0; 1:0\n"
        cfg, _, _ = parse_config_text(text)
        assert cfg.checkpoints == (0.5, 1.0, 2.0)
        assert cfg.centers == ((-1.0, 0.0), (1.0, 0.0))

    def test_solver_validation_surfaces_as_config_error(self):
        with pytest.raises(ConfigError, match="width"):
            parse_config_text(MINIMAL + "width = 5.0\n")


class TestHash:
    def test_stable_under_reordering(self):
        a = parse_config_text(MINIMAL + "cfl = 0.4\namplitude = 0.02\n")
        b = parse_config_text("amplitude = 0.02\n" + MINIMAL + "cfl = 0.4\n")
        assert config_hash(a[0], a[1]) == config_hash(b[0], b[1])

    def test_sensitive_to_values(self):
        a = parse_config_text(MINIMAL)
        b = parse_config_text(MINIMAL.replace("t_end = 2.0", "t_end = 3.0"))
        assert config_hash(a[0], a[1]) != config_hash(b[0], b[1])

    def test_diagnostics_options_enter_hash(self):
        cfg, options, _ = parse_config_text(MINIMAL)
        other = DiagnosticsOptions(wq_q=6.0)
        assert config_hash(cfg, options) != config_hash(cfg, other)


class TestTargetsTable:
    def test_bundled_and_repo_copies_agree(self):
        bundled = open(targets_path(), "r", encoding="utf-8").read()
        repo = open(
            os.path.join(os.path.dirname(__file__), "..", "targets.csv"),
            "r",
            encoding="utf-8",
        ).read()
        assert bundled == repo

    def test_values(self):
        targets = load_targets()
        assert targets[("linf", 1.0)] == -2.0
        assert targets[("linf", 0.5)] == -4.0
        assert targets[("h3", 1.0)] == -4.0
        assert targets[("wq_q4", 1.0)] == 0.5
        assert targets[("annulus_cancel", 0.75)] == 1.0


@pytest.fixture(scope="module")
def solved_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli")
    cfg_path = base / "run.cfg"
    cfg_path.write_text(
        "alpha = 1.0\nN = 64\nL = 10.0\nt_end = 1.0\namplitude = 0.01\n"
        "width = 1.0\ncheckpoints = 0.5,1.0\n"
    )
    out = base / "out"
    rc = main(["solve", "--config", str(cfg_path), "--out-dir", str(out)])
    assert rc == 0
    return base, cfg_path, out


class TestCli:
    def test_kernel_subcommand(self, tmp_path):
        out = tmp_path / "prof.csv"
        rc = main(["kernel", "--alpha", "1.0", "--r-max", "50", "--tol", "1e-8", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# alpha=1.0")
        assert lines[1] == "r,G,dGdr,tail_ratio"

    def test_solve_outputs(self, solved_dir):
        _, _, out = solved_dir
        names = sorted(os.listdir(out))
        assert "diagnostics.csv" in names
        assert "manifest.json" in names
        assert "profile.csv" in names
        assert "snapshot_0000.sqgf" in names and "snapshot_0002.sqgf" in names
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["status"] == "complete"
        header = (out / "diagnostics.csv").read_text().splitlines()[0]
        assert header == "t,mass,linf,l2,h3,wq_q4,annulus_cancel,v_weighted,wgrad_p4,l2_weighted"

    def test_unknown_config_key_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text(MINIMAL + "alhpa = 1.0\n")
        rc = main(["solve", "--config", str(bad), "--out-dir", str(tmp_path / "o")])
        assert rc == 2

    def test_resume_after_partial_run(self, solved_dir, tmp_path):
        base, cfg_path, out = solved_dir
        import shutil

        work = tmp_path / "resume"
        shutil.copytree(out, work)
        os.remove(work / "snapshot_0002.sqgf")
        progress = json.loads((work / "progress.json").read_text())
        progress["done"] = progress["done"][:1]
        (work / "progress.json").write_text(json.dumps(progress))
        rc = main(["solve", "--config", str(cfg_path), "--out-dir", str(work)])
        assert rc == 0
        assert (work / "snapshot_0002.sqgf").read_bytes() == (out / "snapshot_0002.sqgf").read_bytes()
        assert (work / "diagnostics.csv").read_text() == (out / "diagnostics.csv").read_text()

    def test_resume_refuses_mismatched_config(self, solved_dir, tmp_path):
        base, cfg_path, out = solved_dir
        other = tmp_path / "other.cfg"
        other.write_text(cfg_path.read_text().replace("amplitude = 0.01", "amplitude = 0.02"))
        rc = main(["solve", "--config", str(other), "--out-dir", str(out)])
        assert rc == 2

    def test_annulus_options_reach_the_records(self, tmp_path):
        cfg_path = tmp_path / "ann.cfg"
        cfg_path.write_text(
            "alpha = 1.0\nN = 64\nL = 10.0\nt_end = 1.0\namplitude = 0.01\n"
            "width = 1.0\ncheckpoints = 0.5,1.0\n"
            "annulus_r_min = 2.0\nannulus_r_max = 4.0\n"
        )
        out = tmp_path / "out"
        assert main(["solve", "--config", str(cfg_path), "--out-dir", str(out)]) == 0
        redone = tmp_path / "diag.csv"
        rc = main(
            [
                "diagnose",
                "--snapshots",
                str(out),
                "--alpha-profile",
                str(out / "profile.csv"),
                "--annulus",
                "2.0,4.0",
                "--out",
                str(redone),
            ]
        )
        assert rc == 0
        assert redone.read_text() == (out / "diagnostics.csv").read_text()

    def test_diagnose_matches_solve(self, solved_dir, tmp_path):
        _, _, out = solved_dir
        result = tmp_path / "diag.csv"
        rc = main(
            [
                "diagnose",
                "--snapshots",
                str(out),
                "--alpha-profile",
                str(out / "profile.csv"),
                "--annulus",
                "2.5,5.0",
                "--out",
                str(result),
            ]
        )
        assert rc == 0
        # solve used the same annulus (5 * width clamped to r_max/2 = 2.5)
        assert result.read_text() == (out / "diagnostics.csv").read_text()

    def test_sweep_rejects_empty_and_bad_alphas(self, solved_dir, tmp_path, capsys):
        _, cfg_path, _ = solved_dir
        rc = main(["sweep", "--alphas", " ", "--config", str(cfg_path), "--out-dir", str(tmp_path / "s")])
        assert rc == 1
        rc = main(["sweep", "--alphas", "1.5", "--config", str(cfg_path), "--out-dir", str(tmp_path / "s")])
        assert rc == 1

    def test_sweep_parallel_workers(self, tmp_path, monkeypatch):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text(
            "alpha = 1.0\nN = 64\nL = 10.0\nt_end = 1.0\namplitude = 0.01\n"
            "width = 1.0\ncheckpoints = 0.1,0.2,0.4,0.6,0.8,1.0\n"
        )
        monkeypatch.setenv("SQG_THREADS", "2")
        out = tmp_path / "sw"
        rc = main(["sweep", "--alphas", "0.75,1.0", "--config", str(cfg), "--out-dir", str(out)])
        assert rc == 0
        lines = (out / "exponents.csv").read_text().splitlines()
        assert lines[0].startswith("alpha,linf_exp,linf_target")
        assert len(lines) == 3
        for sub in ("alpha_0.75", "alpha_1"):
            manifest = json.loads((out / sub / "manifest.json").read_text())
            assert manifest["status"] == "complete"

    def test_verify_table_report_and_exit_code(self, tmp_path, monkeypatch):
        from sqgkit import cli as cli_module
        from sqgkit.contracts import ContractResult

        def fake(level="quick", ctx=None, ids=None):
            return [
                ContractResult("kernel.poisson_oracle", True, "1e-9", "<= 1e-6", 0.1),
                ContractResult("kernel.tail_constant_a05", False, "0.09", "<= 0.02", 0.1),
            ]

        monkeypatch.setattr(cli_module, "run_contracts", fake)
        report = tmp_path / "report.json"
        rc = main(["verify", "--level", "quick", "--report", str(report)])
        assert rc == 1
        payload = json.loads(report.read_text())
        assert payload[0]["contract"] == "kernel.poisson_oracle"
        assert payload[1]["passed"] is False

    def test_version_runs(self):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
