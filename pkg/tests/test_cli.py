import json

import pytest

from src.config import SEED_ENV
from src.errors import NumericalFailure
from src.experiments import FAIL, ScanResult
from src.main import EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, main


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


def read_stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


# ---------------------------------------------------------------------------
# Sequence commands
# ---------------------------------------------------------------------------
def test_construct_prints_terms_and_stats(capsys):
    assert main(["construct", "--lambda", "1.2", "--count", "12"]) == EXIT_OK
    payload = read_stdout_json(capsys)
    assert len(payload["terms"]) == 12
    assert payload["terms"][0] == 10
    assert 1.2 <= payload["stats"]["rho"] < 1.2 ** 3


def test_construct_needs_lambda():
    assert main(["construct"]) == EXIT_VALIDATION


def test_construct_rejects_lambda_outside_range():
    assert main(["construct", "--lambda", "1.3"]) == EXIT_VALIDATION


def test_refine(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(json.dumps([8 * 2 ** k for k in range(6)]))
    assert main(["refine", "--seq-file", str(path)]) == EXIT_OK
    payload = read_stdout_json(capsys)
    assert set(payload["original"]["terms"]) <= set(payload["refined"]["terms"])
    assert len(payload["pieces_per_block"]) == 6


def test_refine_rejects_small_first_term(seq_file):
    assert main(["refine", "--seq-file", str(seq_file)]) == EXIT_VALIDATION


def test_sigma_example(capsys):
    assert main(["sigma-example", "--sigmas", "4,8", "--M", "64"]) == EXIT_OK
    examples = read_stdout_json(capsys)["examples"]
    assert [e["stats"]["sigma"] for e in examples] == [4, 8]
    for e in examples:
        assert sorted(t for part in e["parts"] for t in part) == e["terms"]


# ---------------------------------------------------------------------------
# Square functions
# ---------------------------------------------------------------------------
def test_square_writes_artifacts(tmp_path, seq_file):
    outdir = tmp_path / "out"
    argv = ["square", "--seq-file", str(seq_file), "--input", "fN:64", "--p", "1.25",
            "--outdir", str(outdir), "--plot"]
    assert main(argv) == EXIT_OK

    summary = json.loads((outdir / "square.summary.json").read_text())
    lines = (outdir / "square.csv").read_text().splitlines()
    assert lines[0] == "x,S"
    assert len(lines) == summary["grid_size"] + 1
    assert (outdir / "square.blocks.csv").exists()
    assert (outdir / "square.plot").exists()

    assert summary["p"] == 1.25
    assert summary["quotient"] > 0
    assert summary["l2_ratio"] == pytest.approx(1.0, abs=1e-9)


def test_square_reports_uncovered_support(tmp_path):
    path = tmp_path / "short.json"
    path.write_text(json.dumps([1, 2, 4, 8, 16, 32, 64, 128]))
    argv = ["square", "--seq-file", str(path), "--input", "fN:64", "--outdir", str(tmp_path)]
    assert main(argv) == EXIT_VALIDATION


def test_square_rejects_unknown_input(seq_file, tmp_path):
    argv = ["square", "--seq-file", str(seq_file), "--input", "gauss:3", "--outdir", str(tmp_path)]
    assert main(argv) == EXIT_VALIDATION


def test_square2d(tmp_path, seq_file):
    argv = ["square2d", "--seq-file", str(seq_file), "--input", "fejer:4*fejer:3",
            "--outdir", str(tmp_path)]
    assert main(argv) == EXIT_OK
    lines = (tmp_path / "square2d.csv").read_text().splitlines()
    assert lines[0] == "x,y,S"
    rows, cols = json.loads((tmp_path / "square2d.summary.json").read_text())["grid_size"]
    assert len(lines) == rows * cols + 1


# ---------------------------------------------------------------------------
# Runs, determinism and exit codes
# ---------------------------------------------------------------------------
MIKHLIN = ["mikhlin", "--lambdas", "1.1,1.2", "--trials", "3", "--count", "8"]


def test_mikhlin_csv_is_identical_across_pool_sizes(tmp_path):
    assert main([*MIKHLIN, "--jobs", "1", "--outdir", str(tmp_path / "a")]) == EXIT_OK
    assert main([*MIKHLIN, "--jobs", "3", "--outdir", str(tmp_path / "b")]) == EXIT_OK
    for name in ("mikhlin.csv", "mikhlin.symbol.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(SEED_ENV, "5")
    assert main([*MIKHLIN, "--outdir", str(tmp_path)]) == EXIT_OK
    summary = json.loads((tmp_path / "mikhlin.summary.json").read_text())
    assert summary["config"]["seed"] == 5


def test_config_file_and_flag_override(tmp_path, capsys):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"lambda": 1.2, "count": 6}))
    assert main(["construct", "--config", str(path)]) == EXIT_OK
    assert len(read_stdout_json(capsys)["terms"]) == 6
    assert main(["construct", "--config", str(path), "--count", "8"]) == EXIT_OK
    assert len(read_stdout_json(capsys)["terms"]) == 8


def test_dry_run_lists_tasks_without_output(tmp_path, capsys):
    outdir = tmp_path / "out"
    assert main(["cardinality-scan", "--dry-run", "--outdir", str(outdir)]) == EXIT_OK
    assert "cardinality lambda=1.002" in capsys.readouterr().out
    assert not outdir.exists()


def test_dry_run_still_validates():
    assert main(["sharpness-scan", "--lambdas", "1.3", "--dry-run"]) == EXIT_VALIDATION
    assert main(["sigma-scan", "--sigmas", "4", "--M", "1000", "--dry-run"]) == EXIT_VALIDATION


def test_unknown_command_prints_usage(capsys):
    assert main(["fourier"]) == EXIT_VALIDATION
    assert "usage" in capsys.readouterr().err


def test_help():
    assert main(["--help"]) == EXIT_OK


def test_unwritable_outdir(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert main([*MIKHLIN, "--outdir", str(blocker / "out")]) == EXIT_VALIDATION


def test_numerical_failure_exits_3_with_capture(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise NumericalFailure("non-finite count", {"record": {"lambda": 1.1}})

    monkeypatch.setattr("src.commands.cardinality_scan", boom)
    argv = ["cardinality-scan", "--lambdas", "1.1,1.2", "--outdir", str(tmp_path)]
    assert main(argv) == EXIT_NUMERICAL
    [capture] = list((tmp_path / "debug").iterdir())
    assert json.loads(capture.read_text())["details"]["record"]["lambda"] == 1.1


def test_failed_check_exits_3(tmp_path, monkeypatch):
    def failing(*args, **kwargs):
        return ScanResult("cardinality-scan", [], checks={"cardinality_slope": FAIL})

    monkeypatch.setattr("src.commands.cardinality_scan", failing)
    argv = ["cardinality-scan", "--lambdas", "1.1,1.2", "--outdir", str(tmp_path)]
    assert main(argv) == EXIT_NUMERICAL
    assert (tmp_path / "cardinality-scan.csv").exists()
    assert len(list((tmp_path / "debug").iterdir())) == 1
