"""CLI behavior: formats, exit codes, files, and the verification gate."""
import json

import pytest

from fisr import cli
from fisr.derive import BracketError


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_derive_table_lists_all_constants(capsys):
    code, out, _ = run(capsys, "derive")
    assert code == 0
    for token in ("0x5F37642F", "0x5F375A86", "0x5F3863F7",
                  "0x5F37E75A", "0x5F37ADD5"):
        assert token in out
    assert "1.75118" in out
    assert len(out.splitlines()) == 7  # header plus six rows


def test_derive_csv_and_json_agree(capsys):
    code, csv_out, _ = run(capsys, "derive", "--format", "csv")
    assert code == 0
    code, json_out, _ = run(capsys, "derive", "--format", "json-lines")
    assert code == 0
    csv_lines = csv_out.splitlines()
    json_rows = [json.loads(line) for line in json_out.splitlines()]
    assert len(csv_lines) == 7 and len(json_rows) == 6
    header = csv_lines[0].split(",")
    first = dict(zip(header, csv_lines[1].split(",")))
    assert first["magic_hex"] == json_rows[0]["magic_hex"] == "0x5F37642F"
    assert float(first["t"]) == json_rows[0]["t"]
    assert json_rows[2]["magic"] == json_rows[1]["magic"]  # k=2 shares k=1's R


def test_eval_table_output(capsys):
    code, out, _ = run(capsys, "eval", "--r", "0x5F375A86", "--x", "2.0",
                       "--iters", "2")
    assert code == 0
    assert "0x3F3504F3" in out
    assert "0.70710678118654" in out  # double-precision reference line


def test_eval_accepts_bit_pattern_input(capsys):
    code, out, _ = run(capsys, "eval", "--x", "0x40000000",
                       "--format", "json-lines")
    assert code == 0
    record = json.loads(out)
    assert record["x"] == 2.0
    assert record["R"] == "0x5F3759DF"


@pytest.mark.parametrize("argv", [
    ("eval", "--x", "-1.0"),
    ("eval", "--x", "0.0"),
    ("eval", "--x", "1e-40"),
    ("eval", "--x", "1e300"),
    ("eval", "--x", "zebra"),
    ("eval", "--x", "1.0", "--iters", "-2"),
    ("eval", "--x", "1.0", "--r", "0x123456789"),
    ("nonsense",),
    (),
])
def test_usage_and_domain_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err  # some explanation lands on stderr


def test_solver_failure_exits_2(capsys, monkeypatch):
    def explode():
        raise BracketError("no sign change")
    monkeypatch.setattr(cli, "derive_all", explode)
    code, _, err = run(capsys, "derive")
    assert code == 2
    assert "solver" in err


def test_sweep_quick_json(capsys):
    code, out, _ = run(capsys, "sweep", "--r", "0x5F37642F", "--iters", "0",
                       "--samples", "2000", "--seed", "12",
                       "--format", "json-lines")
    assert code == 0
    record = json.loads(out)
    assert record["checked"] == 2000
    assert record["domain"] == "full-random"
    assert 0.02 < record["max_relative_error"] <= 0.034212838
    assert record["rng_seed"] == 12


def test_sweep_writes_cloud_and_figure(capsys, tmp_path):
    out_csv = tmp_path / "cloud.csv"
    code, _, err = run(capsys, "sweep", "--r", "0x5F375A86", "--iters", "1",
                       "--samples", "300", "--seed", "4",
                       "--out", str(out_csv))
    assert code == 0
    png = tmp_path / "cloud.png"
    assert out_csv.exists() and png.exists()
    assert png.stat().st_size > 1000
    assert out_csv.read_text().startswith("x,x_tilde,error_relative")
    assert str(png) in err


def test_sweep_out_with_png_suffix_keeps_both_files(capsys, tmp_path):
    target = tmp_path / "cloud.png"
    code, _, _ = run(capsys, "sweep", "--samples", "50", "--out", str(target))
    assert code == 0
    assert target.exists()
    assert (tmp_path / "cloud.csv").exists()


def test_verify_quick_passes(capsys):
    code, out, _ = run(capsys, "verify", "--level", "quick")
    assert code == 0
    assert "FAIL" not in out
    assert out.count("seed model") == 6  # classic plus five derived
    assert "scaling law" in out


def test_verify_reports_failure_for_injected_constant(capsys, monkeypatch):
    monkeypatch.setenv("FISR_INJECT_MAGIC", "0x5F400000")
    code, out, err = run(capsys, "verify", "--level", "quick")
    assert code == 3
    assert "FAIL" in out
    assert "failed" in err


def test_verify_accepts_injected_model_valid_constant(capsys, monkeypatch):
    monkeypatch.setenv("FISR_INJECT_MAGIC", "0x5F340000")
    code, out, _ = run(capsys, "verify", "--level", "quick")
    assert code == 0
    assert "0x5F340000" in out


def test_bench_checksum_deterministic(capsys):
    code, first, _ = run(capsys, "bench", "--samples", "2")
    assert code == 0
    code, second, _ = run(capsys, "bench", "--samples", "2")
    assert code == 0
    line = [l for l in first.splitlines() if l.startswith("checksum:")]
    assert line and line == [l for l in second.splitlines()
                             if l.startswith("checksum:")]
    assert "hardware-dependent, informational" in first
    ratio = float(first.split("invsqrt k=2):")[1].split("x")[0])
    assert ratio > 0.0


def test_entrypoint_raises_system_exit():
    with pytest.raises(SystemExit):
        cli.entrypoint()
