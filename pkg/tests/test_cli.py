import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from mtcf.cli import BENCH_COLUMNS, EVAL_COLUMNS, main
from mtcf.ingest import parse_movielens

GOLDEN = Path(__file__).parent / "golden"
RATINGS = GOLDEN / "ratings_small.dat"


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_eval_csv_golden(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["eval", "--data", str(RATINGS), "--measure", "pcc,jaccard", "--top-n", "3,10", "-o", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / "eval_small.csv").read_bytes()
    assert tuple(_rows(out)[0]) == EVAL_COLUMNS


def test_eval_json_golden(tmp_path):
    out = tmp_path / "r.json"
    assert main(["eval", "--data", str(RATINGS), "--measure", "cosine", "--top-n", "5", "-o", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / "eval_small.json").read_bytes()
    assert tuple(json.loads(out.read_text())[0]) == EVAL_COLUMNS


def test_split_stats_golden(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["split-stats", "--data", str(RATINGS), "-o", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / "split_stats.csv").read_bytes()


def test_eval_row_count_and_workers(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["eval", "--data", str(RATINGS), "--measure", "pcc", "--top-n", "5,10,20,40"]
    assert main(args + ["-o", str(a)]) == 0
    assert main(args + ["--workers", "3", "-o", str(b)]) == 0
    assert len(_rows(a)) == 4
    assert a.read_bytes() == b.read_bytes()


def test_undefined_metrics_serialize_empty(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["eval", "--data", str(RATINGS), "--top-n", "5", "--threshold", "5", "-o", str(out)]) == 0
    row = _rows(out)[0]
    # one false positive and no hits: precision and recall are 0, f1 is undefined
    assert (row["tp"], row["fp"]) == ("0", "1")
    assert row["precision"] == "0.0" and row["recall"] == "0.0"
    assert row["f1"] == ""


def test_keep_fractions_column(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["eval", "--data", str(RATINGS), "--top-n", "5", "--keep-fractions", "0.5,1.0", "-o", str(out)]) == 0
    rows = _rows(out)
    assert tuple(rows[0]) == ("keep_fraction",) + EVAL_COLUMNS
    assert [r["keep_fraction"] for r in rows] == ["0.5", "1.0"]


def test_eval_missing_file(capsys):
    assert main(["eval", "--data", "/no/such/ratings.dat"]) == 1
    assert "/no/such/ratings.dat" in capsys.readouterr().err


def test_usage_errors_exit_1(capsys):
    assert main(["eval"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["eval", "--measure", "euclid"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1


def test_bench_grid(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code = main(["bench", "--format", "synthetic", "--n-users", "80", "--n-items", "40", "--density", "0.15",
                 "--workers", "1,2,4,8", "--measure", "jaccard,cosine,pcc", "--repeats", "1", "-o", str(out)])
    assert code == 0
    rows = _rows(out)
    assert tuple(rows[0]) == BENCH_COLUMNS
    assert len(rows) == 12
    for m in ("jaccard", "cosine", "pcc"):
        cells = [r for r in rows if r["measure"] == m]
        assert len({r["digest"] for r in cells}) == 1
        assert [r for r in cells if r["workers"] == "1"][0]["speedup"] == "1.0"
    assert "# cpu_count:" in capsys.readouterr().err


def test_bench_json_has_machine_info(tmp_path):
    out = tmp_path / "b.json"
    assert main(["bench", "--format", "synthetic", "--n-users", "60", "--n-items", "30", "--workers", "1,2",
                 "--measure", "pcc", "--repeats", "1", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert "cpu_count" in doc["machine"]
    assert tuple(doc["rows"][0]) == BENCH_COLUMNS


def test_bench_without_baseline(capsys):
    assert main(["bench", "--format", "synthetic", "--workers", "2,4"]) == 1
    assert "include 1" in capsys.readouterr().err


def test_bench_digest_mismatch_exit_2(monkeypatch):
    import mtcf.bench
    real = mtcf.bench.predict_all

    def broken(matrix, test, measure, n, workers=1, backend=None):
        out = real(matrix, test, measure, n, workers, backend)
        return out[::-1] if workers > 1 else out

    monkeypatch.setattr(mtcf.bench, "predict_all", broken)
    assert main(["bench", "--format", "synthetic", "--n-users", "60", "--n-items", "30",
                 "--workers", "1,2", "--measure", "jaccard", "--repeats", "1"]) == 2


def test_synth(tmp_path):
    a, b = tmp_path / "a.dat", tmp_path / "b.dat"
    assert main(["synth", "--n-users", "100", "--n-items", "50", "--density", "0.1", "--seed", "3", "-o", str(a)]) == 0
    assert main(["synth", "--n-users", "100", "--n-items", "50", "--density", "0.1", "--seed", "3", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    n = len(parse_movielens(a).ratings)
    assert 400 <= n <= 600  # expectation 500, sd about 21
    assert main(["synth", "--density", "0", "-o", str(a)]) == 1


def test_synth_csv(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["synth", "--n-users", "20", "--n-items", "10", "--density", "0.5", "-o", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "userId,movieId,rating,timestamp"


def test_module_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "mtcf", "eval", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "--top-n" in res.stdout and "default: 5,10,20,40" in res.stdout
