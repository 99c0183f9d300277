import csv
import subprocess
import sys
from pathlib import Path

import pytest

from framesync.cli import CSV_COLUMNS, cmd_threshold, cmd_word, main
from framesync.config import parse_config

FIXTURES = Path(__file__).parent / "fixtures"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_threshold_binary(capsys):
    code, out, _ = run(["threshold", "--eps-f", "0.1", "--eps-m", "0.1"], capsys)
    assert code == 0
    assert "alpha = 1.75777966 nats" in out
    assert "x(1) = 1" in out
    assert "D(x=0)=0, D(x=1)=1.75777966" in out


def test_threshold_awgn_shows_both_quantizations():
    text = cmd_threshold(P=8.0, sigma2=1.0, a=0.5)
    assert "exact: eps_f=0.0786496035" in text
    assert "paper_approx: eps_f=0.367879441" in text
    assert "P/(2 sigma2) = 4" in text


def test_threshold_from_config(tmp_path, capsys):
    p = tmp_path / "c.cfg"
    p.write_text("regime = fixed_length\nN = 2\ngrid = 2, 4\n")
    code, out, _ = run(["threshold", "--config", str(p)], capsys)
    assert code == 0 and out.count("P/(2 sigma2)") == 2


def test_threshold_usage_errors(capsys):
    assert run(["threshold"], capsys)[0] == 1
    assert run(["threshold", "--eps-f", "0.1"], capsys)[0] == 1
    assert run(["threshold", "--eps-f", "1.5", "--eps-m", "0.1"], capsys)[0] == 1


def test_threshold_underflow_reported_in_log_domain(capsys):
    code, out, _ = run(["threshold", "--P", "1e6"], capsys)
    assert code == 0 and "log domain" in out


def test_degenerate_channel_is_runtime_error(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("regime = fixed_power\nP = 1e6\ngrid = 2\n")
    code, _, err = run(["sweep", "--config", str(cfg)], capsys)
    assert code == 2 and "underflows" in err


def test_word_report_and_file(tmp_path):
    out = tmp_path / "w.txt"
    text = cmd_word(14, 2, str(out))
    assert "M = 3" in text and "N1 = 10" in text
    assert out.read_text() == "11010001111111\n"
    assert "M = -" in cmd_word(5)


def test_word_errors(capsys):
    assert run(["word"], capsys)[0] == 1
    assert run(["word", "--N", "3", "--K", "5"], capsys)[0] == 1


@pytest.mark.parametrize("name", ["golden", "golden_binary"])
def test_sweep_matches_golden(tmp_path, capsys, name):
    out = tmp_path / "out.csv"
    code, _, _ = run(["sweep", "--config", str(FIXTURES / f"{name}.cfg"), "--out", str(out)], capsys)
    assert code == 0
    assert out.read_bytes() == (FIXTURES / f"{name}.csv").read_bytes()


def test_sweep_schema_and_stdout(capsys):
    code, out, _ = run(["sweep", "--config", str(FIXTURES / "golden.cfg"), "--trials", "100"], capsys)
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 4
    assert all(r[CSV_COLUMNS.index("trials")] == "100" for r in rows[1:])


def test_sweep_header_only_on_first_point_failure(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("regime = fixed_length\nN = 4\ngrid = 400\nr = 2\n")
    out = tmp_path / "o.csv"
    code, _, err = run(["sweep", "--config", str(cfg), "--out", str(out)], capsys)
    assert code == 2 and "P=400.0" in err
    assert out.read_text().splitlines() == [",".join(CSV_COLUMNS)]


def test_sweep_partial_results_flushed(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("regime = fixed_length\nN = 4\ngrid = 2, 3, 400\nr = 2\ntrials = 50\n")
    out = tmp_path / "o.csv"
    code, _, err = run(["sweep", "--config", str(cfg), "--out", str(out)], capsys)
    assert code == 2 and "grid point (P=400.0)" in err
    assert len(out.read_text().splitlines()) == 3


def test_sweep_validation_errors(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("regime = fixed_length\nN = 4\ngrid = 2\na = 1.5\n")
    code, _, err = run(["sweep", "--config", str(cfg)], capsys)
    assert code == 1 and "line 4" in err
    assert run(["sweep", "--config", str(tmp_path / "missing.cfg")], capsys)[0] == 1
    cfg.write_text("regime = fixed_length\nN = 4\ngrid = 2\n")
    assert run(["sweep", "--config", str(cfg), "--workers", "0"], capsys)[0] == 1
    assert run(["sweep", "--config", str(cfg), "--trials", "-3"], capsys)[0] == 1
    with pytest.raises(SystemExit) as info:
        main(["sweep"])
    assert info.value.code == 1


def test_sweep_workers_do_not_change_csv(tmp_path, capsys):
    outs = []
    for w in ("1", "3"):
        out = tmp_path / f"o{w}.csv"
        run(["sweep", "--config", str(FIXTURES / "golden.cfg"), "--out", str(out), "--workers", w], capsys)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_oracle(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("regime = fixed_power\neps_f = 0.2\neps_m = 0.1\ngrid = 2\nmu = 1/N\nreference = limit\nA = 4\n")
    code, out, _ = run(["oracle", "--config", str(cfg)], capsys)
    assert code == 0
    assert "P(Correct) = 0.68202" in out and "method = enumeration" in out
    code, out, _ = run(["oracle", "--config", str(cfg), "--A", "500"], capsys)
    assert code == 0 and "run-length chain" in out
    cfg.write_text("regime = fixed_power\neps_f = 0.2\neps_m = 0.1\ngrid = 2\nmu = 0.5\nA = 500\n")
    assert run(["oracle", "--config", str(cfg)], capsys)[0] == 2


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "framesync", "threshold", "--eps-f", "0.1", "--eps-m", "0.1"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and "1.75777966" in res.stdout


def test_render_of_golden_config_roundtrips():
    cfg = parse_config((FIXTURES / "golden.cfg").read_text())
    assert parse_config(cfg.render()) == cfg
