"""End-to-end command-line tests, run in-process through main(argv)."""

import json
import math

import numpy as np
import pytest

from pitest.cli import main
from pitest.data import load_csv, save_csv, synthetic_pair
from pitest.errors import CsvParseError
from pitest.sweep import SWEEP_HEADER, SweepConfig, run_sweep


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-data")
    X, Y = synthetic_pair(n=20, d=2, m=2, dependence=0.0, seed=3)
    save_csv(root / "x.csv", X)
    save_csv(root / "y.csv", Y)
    return root


ALICE_ARGS = ["--epsilon", "10", "--delta", "0.01", "--eta", "0.5", "--nu", "0.5"]


def test_alice_writes_package(data_dir, tmp_path, capsys):
    out = tmp_path / "pkg.json"
    rc = main(["alice", "--input", str(data_dir / "x.csv"), *ALICE_ARGS,
               "--seed", "11", "--out", str(out)])
    assert rc == 0
    captured = capsys.readouterr()
    assert "wrote package" in captured.out
    assert "projection rows r = " in captured.out
    doc = json.loads(out.read_bytes())
    assert doc["version"] == 1
    assert doc["n"] == 20
    assert doc["privacy"]["split"] == "half-half"


def test_alice_is_reproducible(data_dir, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["alice", "--input", str(data_dir / "x.csv"), *ALICE_ARGS, "--seed", "1"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_alice_reports_unavailable_closed_form(data_dir, tmp_path, capsys):
    # nu = 0.5 saturates (m + n) nu, so the closed-form constant is n/a
    out = tmp_path / "pkg.json"
    main(["alice", "--input", str(data_dir / "x.csv"), *ALICE_ARGS, "--out", str(out)])
    assert "tau (closed form, m = 1) = n/a" in capsys.readouterr().out


def test_bob_round_trip(data_dir, tmp_path, capsys):
    pkg = tmp_path / "pkg.json"
    report = tmp_path / "report.json"
    main(["alice", "--input", str(data_dir / "x.csv"), *ALICE_ARGS,
          "--seed", "11", "--out", str(pkg)])
    capsys.readouterr()
    rc = main(["bob", "--package", str(pkg), "--input", str(data_dir / "y.csv"),
               "--report", str(report)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "Gamma = " in out and "threshold = " in out
    assert "reject" in out  # either verdict wording contains it
    doc = json.loads(report.read_text())
    assert doc["n"] == 20 and doc["m"] == 2
    assert doc["privacy"]["epsilon"] == 10.0
    assert isinstance(doc["reject"], bool)


def test_bob_degenerate_input_still_exits_zero(data_dir, tmp_path, capsys):
    pkg = tmp_path / "pkg.json"
    main(["alice", "--input", str(data_dir / "x.csv"), *ALICE_ARGS, "--out", str(pkg)])
    const = tmp_path / "const.csv"
    save_csv(const, np.ones((20, 2)))
    report = tmp_path / "report.json"
    rc = main(["bob", "--package", str(pkg), "--input", str(const),
               "--report", str(report)])
    assert rc == 0
    assert "degenerate" in capsys.readouterr().out
    assert json.loads(report.read_text())["statistic"] is None


def test_bob_shape_mismatch_is_runtime_error(data_dir, tmp_path, capsys):
    pkg = tmp_path / "pkg.json"
    main(["alice", "--input", str(data_dir / "x.csv"), *ALICE_ARGS, "--out", str(pkg)])
    short = tmp_path / "short.csv"
    save_csv(short, np.ones((5, 2)) * np.arange(5)[:, None])
    rc = main(["bob", "--package", str(pkg), "--input", str(short),
               "--report", str(tmp_path / "r.json")])
    assert rc == 1
    err = capsys.readouterr().err
    assert "error:" in err
    assert "built for n = 20 samples but Y has 5 rows" in err


def test_bob_corrupt_package_is_runtime_error(data_dir, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_bytes(b"{ not json")
    rc = main(["bob", "--package", str(bad), "--input", str(data_dir / "y.csv"),
               "--report", str(tmp_path / "r.json")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_missing_file_is_runtime_error(tmp_path, capsys):
    rc = main(["alice", "--input", str(tmp_path / "nope.csv"), *ALICE_ARGS,
               "--out", str(tmp_path / "pkg.json")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_usage_errors_exit_two(data_dir, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["alice", "--input", str(data_dir / "x.csv"), "--out", str(tmp_path / "p")])
    assert exc.value.code == 2  # --epsilon is required
    with pytest.raises(SystemExit) as exc:
        main(["alice", "--input", str(data_dir / "x.csv"), "--epsilon", "1",
              "--eta", "1.5", "--out", str(tmp_path / "p")])
    assert exc.value.code == 2  # eta outside (0, 1)
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--input-x", "a", "--input-y", "b", "--out", "c",
              "--epsilons", "4,2,1"])
    assert exc.value.code == 2  # not increasing


def test_run_reports_both_worlds(data_dir, tmp_path, capsys):
    report = tmp_path / "both.json"
    rc = main(["run", "--input-x", str(data_dir / "x.csv"),
               "--input-y", str(data_dir / "y.csv"),
               "--epsilon", "1000000", "--delta", "0.5", "--eta", "0.01",
               "--nu", "0.05", "--seed", "4", "--report", str(report)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "non-private: Gamma = " in out
    doc = json.loads(report.read_text())
    priv, ref = doc["private"], doc["nonprivate"]
    assert ref["degenerate"] is False
    # with an essentially unlimited budget the two statistics agree closely
    assert priv["statistic"] == pytest.approx(ref["statistic"], rel=0.15)


def test_sweep_writes_expected_table(data_dir, tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    rc = main(["sweep", "--input-x", str(data_dir / "x.csv"),
               "--input-y", str(data_dir / "y.csv"),
               "--epsilons", "100,10000", "--etas", "0.5", "--replications", "3",
               "--delta", "0.01", "--nu", "0.5", "--seed", "9", "--out", str(out)])
    assert rc == 0
    assert "wrote sweep table" in capsys.readouterr().out
    lines = out.read_text().strip().splitlines()
    assert lines[0] == SWEEP_HEADER
    assert len(lines) == 3  # 2 epsilons x 1 eta
    first = [float(v) for v in lines[1].split(",")]
    assert first[0] == 100.0 and first[1] == 0.5
    assert all(math.isfinite(v) for v in first)


# ------------------------------------------------------------- sweep library


def test_sweep_rows_deterministic_under_thread_cap(data_dir, monkeypatch):
    X = load_csv(data_dir / "x.csv")
    Y = load_csv(data_dir / "y.csv")
    cfg = SweepConfig(epsilons=(100.0,), replications=4, eta_values=(0.5,),
                      delta=0.01, nu=0.5, master_seed=1)
    monkeypatch.setenv("PI_TEST_THREADS", "1")
    serial = run_sweep(cfg, X, Y)
    monkeypatch.setenv("PI_TEST_THREADS", "4")
    parallel = run_sweep(cfg, X, Y)
    assert serial == parallel


def test_sweep_single_replication_has_zero_sd(data_dir):
    X = load_csv(data_dir / "x.csv")
    Y = load_csv(data_dir / "y.csv")
    cfg = SweepConfig(epsilons=(100.0,), replications=1, eta_values=(0.5,),
                      delta=0.01, nu=0.5)
    (row,) = run_sweep(cfg, X, Y)
    assert row.sd_gamma == 0.0 and row.sd_s == 0.0 and row.sd_omega == 0.0


def test_sweep_config_validation():
    from pitest.errors import InvalidInputError

    with pytest.raises(InvalidInputError):
        SweepConfig(epsilons=())
    with pytest.raises(InvalidInputError):
        SweepConfig(epsilons=(2.0, 1.0))
    with pytest.raises(InvalidInputError):
        SweepConfig(epsilons=(1.0,), replications=0)


# ----------------------------------------------------------------- CSV files


def test_load_csv_round_trip(tmp_path):
    path = tmp_path / "m.csv"
    M = np.array([[1.5, -2.0], [0.125, 3e8]])
    save_csv(path, M)
    assert np.array_equal(load_csv(path), M)


def test_load_csv_header_and_blank_lines(tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("a,b\n1,2\n\n3,4\n")
    assert np.array_equal(load_csv(path, has_header=True), [[1.0, 2.0], [3.0, 4.0]])


def test_load_csv_ragged_row(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("1,2\n3,4,5\n")
    with pytest.raises(CsvParseError, match="line 2: expected 2 columns, got 3"):
        load_csv(path)


def test_load_csv_non_numeric_cell(tmp_path):
    path = tmp_path / "n.csv"
    path.write_text("1,2\n3,oops\n")
    with pytest.raises(CsvParseError, match="line 2, column 2: not a number"):
        load_csv(path)


def test_load_csv_rejects_non_finite(tmp_path):
    path = tmp_path / "inf.csv"
    path.write_text("1,inf\n")
    with pytest.raises(CsvParseError, match="non-finite"):
        load_csv(path)


def test_load_csv_empty_file(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("")
    with pytest.raises(CsvParseError, match="no data rows"):
        load_csv(path)


def test_synthetic_pair_shapes_and_determinism():
    X1, Y1 = synthetic_pair(n=15, d=3, m=2, dependence=0.4, seed=8)
    X2, Y2 = synthetic_pair(n=15, d=3, m=2, dependence=0.4, seed=8)
    assert X1.shape == (15, 3) and Y1.shape == (15, 2)
    assert np.array_equal(X1, X2) and np.array_equal(Y1, Y2)
