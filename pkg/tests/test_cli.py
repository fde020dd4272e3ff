import csv
import io
import json

import pytest

from glrank import cli
from glrank.errors import EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, EXIT_VERIFY
from glrank.verify import CheckResult, VerifyLevel, VerifyReport


@pytest.fixture
def cache_args(tmp_path):
    """Common flags pointing the cache at a throwaway directory."""
    yield ["--cache-dir", str(tmp_path / "cache")]


def _result(capsys):
    out = capsys.readouterr().out
    envelope = json.loads(out)
    assert envelope["schema"] == "1"
    return envelope


def test_dims_envelope(capsys):
    """dims prints the schema envelope with one bound per rank."""
    assert cli.main(["dims", "--n", "3", "--no-cache"]) == EXIT_OK
    envelope = _result(capsys)
    assert envelope["command"] == "dims"
    assert envelope["result"]["n"] == 3
    assert len(envelope["result"]["bounds"]) == 4


def test_dims_n1_skips_rank_one(capsys):
    """GL_1 only has rank 0 irreps, so dims reports a single bound."""
    assert cli.main(["dims", "--n", "1", "--no-cache"]) == EXIT_OK
    assert len(_result(capsys)["result"]["bounds"]) == 1


def test_dims_csv(capsys):
    """CSV output has a header and one row per rank."""
    assert cli.main(["dims", "--n", "3", "--format", "csv", "--no-cache"]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["n", "rank", "upper_degree", "lower_degree"]
    assert [row[1] for row in rows[1:]] == ["0", "1", "2", "3"]


def test_eta_command(capsys):
    """eta adds a first row to the trivial shape of tau."""
    tau = json.dumps({"n": 1, "trivial_shape": [1]})
    assert cli.main(["eta", "--n", "3", "--tau", tau, "--no-cache"]) == EXIT_OK
    result = _result(capsys)["result"]
    assert result["eta"]["trivial_shape"] == [2, 1]
    assert result["strict_rank"] == 1


def test_csv_unavailable_is_invalid_input(capsys):
    """Commands without a table form refuse --format csv."""
    tau = json.dumps({"n": 1, "trivial_shape": [1]})
    code = cli.main(["eta", "--n", "3", "--tau", tau, "--format", "csv", "--no-cache"])
    assert code == EXIT_USAGE
    assert "no CSV form" in capsys.readouterr().err


def test_pieri_command(capsys):
    """pieri lists the horizontal-strip constituents."""
    assert cli.main(["pieri", "--partition", "[1]", "--boxes", "2", "--no-cache"]) == EXIT_OK
    result = _result(capsys)["result"]
    assert {tuple(s) for s in result["constituents"]} == {(3,), (2, 1)}


def test_count_exact(capsys):
    """count with --q adds the exact rank counts of GL_2(F_3)."""
    assert cli.main(["count", "--n", "2", "--q", "3", "--no-cache"]) == EXIT_OK
    result = _result(capsys)["result"]
    assert result["exact"] == {"0": 2, "1": 3, "2": 3}
    assert len(result["leading"]) == 3


def test_ratios_csv_header(capsys):
    """ratios uses the fixed ratio table header."""
    assert cli.main(["ratios", "--n", "2", "--q", "3", "--format", "csv", "--no-cache"]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == cli.RATIO_CSV_HEADER
    assert len(rows) > 1


def test_invalid_input_exit_codes(capsys):
    """Bad values and bad usage both exit with the invalid-input code."""
    assert cli.main(["dims", "--n", "-1", "--no-cache"]) == EXIT_USAGE
    assert cli.main(["dims", "--no-cache"]) == EXIT_USAGE
    assert cli.main(["nonsense"]) == EXIT_USAGE
    assert cli.main(["walk", "--n", "1", "--q", "2", "--no-cache"]) == EXIT_USAGE
    assert cli.main(["eta", "--n", "3", "--tau", "{not json", "--no-cache"]) == EXIT_USAGE
    assert "glrank: error:" in capsys.readouterr().err


def test_resource_limit_exit_code(capsys):
    """A group above --max-group-order exits with the resource-limit code."""
    code = cli.main(
        ["chartab", "--group", "GL", "--n", "3", "--q", "3", "--max-group-order", "100", "--no-cache"]
    )
    assert code == EXIT_RESOURCE
    assert "Resource limit 'group_order'" in capsys.readouterr().err


def test_out_writes_file(tmp_path, capsys):
    """--out writes the artifact to disk and nothing to stdout."""
    target = tmp_path / "dims.json"
    assert cli.main(["dims", "--n", "2", "--out", str(target), "--no-cache"]) == EXIT_OK
    assert capsys.readouterr().out == ""
    data = json.loads(target.read_text())
    assert data["command"] == "dims"
    assert [p.name for p in tmp_path.iterdir()] == ["dims.json"]


def test_chartab_then_cache(cache_args, capsys):
    """chartab fills the cache, which cache list, verify and clear then see."""
    assert cli.main(["chartab", "--n", "2", "--q", "3", *cache_args]) == EXIT_OK
    result = _result(capsys)["result"]
    assert result["summary"]["order"] == 48
    assert len(result["ranks"]) == 8

    assert cli.main(["cache", "list", *cache_args]) == EXIT_OK
    kinds = {a["kind"] for a in _result(capsys)["result"]["artifacts"]}
    assert {"group", "chartab", "chartab-json"} <= kinds

    assert cli.main(["cache", "verify", *cache_args]) == EXIT_OK
    assert _result(capsys)["result"]["corrupted"] == []

    assert cli.main(["cache", "clear", *cache_args]) == EXIT_OK
    assert _result(capsys)["result"]["removed"] >= 3

    assert cli.main(["cache", "list", *cache_args]) == EXIT_OK
    assert _result(capsys)["result"]["artifacts"] == []


def test_cache_needs_store(capsys):
    """cache commands cannot run with --no-cache."""
    assert cli.main(["cache", "list", "--no-cache"]) == EXIT_USAGE


def test_walk_exact(cache_args, capsys):
    """The exact walk on SL_3(F_2) reports 7/8 after one step."""
    assert cli.main(["walk", "--n", "3", "--q", "2", "--steps", "3", *cache_args]) == EXIT_OK
    result = _result(capsys)["result"]
    assert result["steps"][0]["tv"] == "7/8"
    assert result["spectral_rate"] == "1/3"
    assert len(result["steps"]) == 3


def test_walk_mc(capsys):
    """Monte Carlo mode counts every trial once."""
    args = ["walk", "--n", "3", "--q", "2", "--mode", "mc", "--steps", "2", "--trials", "50", "--no-cache"]
    assert cli.main(args) == EXIT_OK
    result = _result(capsys)["result"]
    assert sum(result["histogram"].values()) == 50


def test_verify_failure_exit_code(monkeypatch, capsys):
    """A failed acceptance check maps to the verification exit code."""

    def fake_run(level, caps, store, progress, workers):
        report = VerifyReport(VerifyLevel(level))
        report.results.append(CheckResult("eta", False, "broken", 0.0))
        return report

    monkeypatch.setattr(cli, "run_verification", fake_run)
    assert cli.main(["verify", "--no-cache"]) == EXIT_VERIFY
    result = _result(capsys)["result"]
    assert result["passed"] is False
    assert result["checks"][0]["name"] == "eta"


class _Terminal(io.StringIO):
    def isatty(self):
        return True


def test_progress_flags(monkeypatch):
    """Progress follows the terminal by default and --no-progress always wins."""
    monkeypatch.setattr(cli.sys, "stderr", _Terminal())
    parser = cli.build_parser()
    assert cli.config_from_args(parser.parse_args(["dims", "--n", "2"])).progress
    quiet = parser.parse_args(["dims", "--n", "2", "--no-progress"])
    assert not cli.config_from_args(quiet).progress
    both = parser.parse_args(["dims", "--n", "2", "--progress", "--no-progress"])
    assert not cli.config_from_args(both).progress

    monkeypatch.setattr(cli.sys, "stderr", io.StringIO())
    assert not cli.config_from_args(parser.parse_args(["dims", "--n", "2"])).progress
    assert cli.config_from_args(parser.parse_args(["dims", "--n", "2", "--progress"])).progress
