from __future__ import annotations

import csv
import json
import re

import pytest

from app.api.cli import EXIT_OK, EXIT_USAGE, dispatch, find_crossing
from app.core.csscode import build_css
from app.core.gfvec import LinearCode
from app.storage.codebank import CodeBank, CodeRecord


def read_csv(path) -> tuple[list[str], list[dict[str, str]]]:
    lines = path.read_text().splitlines()
    comments = [ln[2:] for ln in lines if ln.startswith("# ")]
    rows = list(csv.DictReader(ln for ln in lines if not ln.startswith("#")))
    return comments, rows


@pytest.fixture
def bank_path(tmp_path, small_bank: CodeBank) -> str:
    path = tmp_path / "bank.txt"
    small_bank.save(str(path))
    return str(path)


def test_find_crossing() -> None:
    assert find_crossing([0.0, 1.0, 2.0], [1.0, 0.5, -0.5]) == pytest.approx(1.5)
    assert find_crossing([0.0, 1.0], [1.0, 0.5]) is None


def test_exponents_sweep(tmp_path, app_config) -> None:
    out = tmp_path / "exp.csv"
    code = dispatch(["exponents", "--p", "0.95,0.05", "--Rgrid", "0..1:0.01", "--out", str(out)], app_config)
    assert code == EXIT_OK
    comments, rows = read_csv(out)
    assert len(rows) == 101
    assert any(c.startswith("formula:") for c in comments)
    values = [float(r["E_star"]) for r in rows]
    assert all(b <= a + 1e-6 for a, b in zip(values, values[1:]))
    assert values[-1] == 0.0


def test_exponents_requires_distribution(app_config) -> None:
    assert dispatch(["exponents", "--variant", "estar"], app_config) == EXIT_USAGE
    assert dispatch(["exponents", "--variant", "joint"], app_config) == EXIT_USAGE


def test_rates_threshold(tmp_path, app_config) -> None:
    out = tmp_path / "rates.csv"
    code = dispatch(
        ["rates", "--channel", "depolarizing", "--qgrid", "0..0.2:0.005", "--out", str(out)], app_config
    )
    assert code == EXIT_OK
    comments, rows = read_csv(out)
    assert len(rows) == 41
    line = next(c for c in comments if c.startswith("crossing R_qkd"))
    marginal = float(re.search(r"crossing_marginal=([0-9.]+)", line).group(1))
    assert marginal == pytest.approx(0.11, abs=5e-4)


def test_simulate_requires_seed(bank_path, app_config) -> None:
    assert dispatch(["simulate", "--codebank", bank_path], app_config) == EXIT_USAGE


def test_unknown_flag_is_usage_error(app_config) -> None:
    assert dispatch(["rates", "--bogus", "1"], app_config) == EXIT_USAGE
    assert dispatch([], app_config) == EXIT_USAGE


def test_invalid_protocol_value(bank_path, app_config) -> None:
    argv = ["simulate", "--seed", "1", "--pa", "1.5", "--codebank", bank_path]
    assert dispatch(argv, app_config) == EXIT_USAGE


def test_simulate_is_byte_identical(tmp_path, bank_path, app_config) -> None:
    argv = ["simulate", "--m", "400", "--eps", "0", "--seed", "3", "--trials", "2", "--codebank", bank_path]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert dispatch([*argv, "--out", str(first)], app_config) == EXIT_OK
    assert dispatch([*argv, "--out", str(second)], app_config) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    artifact = json.loads(first.read_text())
    assert artifact["aggregate"]["trials"] == 2
    assert len(artifact["records"]) == 2
    assert artifact["config"]["m"] == 400


def test_config_file_merge(tmp_path, bank_path, app_config) -> None:
    config_file = tmp_path / "run.conf"
    config_file.write_text(f"m = 400\neps = 0\nseed = 5\ntrials = 1\ncodebank = {bank_path}\n")
    out = tmp_path / "run.json"
    argv = ["simulate", "--config", str(config_file), "--seed", "6", "--out", str(out)]
    assert dispatch(argv, app_config) == EXIT_OK
    echo = json.loads(out.read_text())["config"]
    assert echo["seed"] == 6
    assert echo["m"] == 400
    assert echo["trials"] == 1


def test_config_file_rejects_unknown_key(tmp_path, app_config) -> None:
    config_file = tmp_path / "bad.conf"
    config_file.write_text("nonsense = 1\n")
    assert dispatch(["rates", "--config", str(config_file)], app_config) == EXIT_USAGE


def test_codegen_writes_bank(tmp_path, app_config) -> None:
    out = tmp_path / "generated.txt"
    code = dispatch(["codegen", "--n", "8", "--tries", "100", "--seed", "1", "--out", str(out)], app_config)
    assert code == EXIT_OK
    bank = CodeBank.load(str(out))
    assert len(bank) >= 1
    assert bank.lengths(2) == [8]


def test_sample_bound(tmp_path, app_config) -> None:
    out = tmp_path / "tails.csv"
    argv = ["sample-bound", "--trials", "2000", "--seed", "1", "--out", str(out)]
    assert dispatch(argv, app_config) == EXIT_OK
    comments, rows = read_csv(out)
    assert "violations=0" in comments
    assert [float(r["eps"]) for r in rows][:2] == [0.0, 0.1]


def test_simulate_d5_with_estimation_slack(tmp_path, app_config) -> None:
    bank = CodeBank([CodeRecord.from_css(build_css(LinearCode.from_rows(["1200"], 5)))])
    path = tmp_path / "bank5.txt"
    bank.save(str(path))
    out = tmp_path / "d5.json"
    argv = ["simulate", "--d", "5", "--m", "800", "--eps", "0.02", "--seed", "1", "--trials", "1",
            "--codebank", str(path), "--out", str(out)]
    assert dispatch(argv, app_config) == EXIT_OK
    artifact = json.loads(out.read_text())
    assert artifact["config"]["d"] == 5
    assert artifact["aggregate"]["trials"] == 1


def test_verify_lists_protocol_check(monkeypatch, tmp_path, app_config) -> None:
    from app.api import cli
    from app.core.oracle import CheckResult

    def fake_suite(quick, seed, config):
        assert config is app_config
        return [CheckResult("protocol_end_to_end", True, "ok")]

    monkeypatch.setattr(cli, "run_verify_suite", fake_suite)
    out = tmp_path / "verify.json"
    assert dispatch(["verify", "--quick", "--out", str(out)], app_config) == EXIT_OK
    assert json.loads(out.read_text())["checks"][0]["name"] == "protocol_end_to_end"
