"""CLI subcommands, exit codes, determinism, and report schemas."""

import csv
import json

import numpy as np
import pytest

from falq.cli import EXIT_FORMAT, EXIT_IO, EXIT_OK, EXIT_PARAM, main
from falq.tensorio import read_tensor, write_tensor

try:
    import jsonschema
except ImportError:
    jsonschema = None

LLAMA3_8B_LAYERS = [
    [4096, 4096], [4096, 1024], [4096, 1024], [4096, 4096],
    [14336, 4096], [14336, 4096], [4096, 14336],
]


def _schema():
    import pathlib

    path = pathlib.Path(__file__).resolve().parent.parent / "docs" / "report.schema.json"
    return json.loads(path.read_text())


def _validate(report):
    if jsonschema is None:
        pytest.skip("jsonschema not installed")
    jsonschema.validate(report, _schema())


@pytest.fixture
def matrix_file(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "w.fatf"
    write_tensor(path, rng.standard_normal((32, 32)))
    return path


class TestCompress:
    def test_roundtrip_matches_report(self, tmp_path, matrix_file):
        out = tmp_path / "w.falq"
        report_path = tmp_path / "report.json"
        code = main([
            "compress", str(matrix_file), str(out),
            "--rank", "4", "--json", str(report_path),
        ])
        assert code == EXIT_OK
        report = json.loads(report_path.read_text())
        _validate(report)

        recon_path = tmp_path / "w_hat.fatf"
        assert main(["reconstruct", str(out), str(recon_path)]) == EXIT_OK
        W = read_tensor(matrix_file)
        W_hat = read_tensor(recon_path)
        rel = np.linalg.norm(W - W_hat) / np.linalg.norm(W)
        assert rel == pytest.approx(report["spatial_rel_error"], abs=1e-9)

    def test_missing_input_is_io_error(self, tmp_path):
        code = main(["compress", str(tmp_path / "absent.fatf"), str(tmp_path / "o")])
        assert code == EXIT_IO

    def test_odd_width_is_param_error(self, tmp_path):
        path = tmp_path / "odd.fatf"
        write_tensor(path, np.zeros((4, 5)) + 1.0)
        assert main(["compress", str(path), str(tmp_path / "o")]) == EXIT_PARAM

    def test_odd_width_permissive_ok(self, tmp_path):
        rng = np.random.default_rng(1)
        path = tmp_path / "odd.fatf"
        write_tensor(path, rng.standard_normal((4, 5)))
        out = tmp_path / "odd.falq"
        assert main([
            "compress", str(path), str(out), "--rank", "2", "--permissive-odd",
        ]) == EXIT_OK
        recon = tmp_path / "odd_hat.fatf"
        assert main(["reconstruct", str(out), str(recon)]) == EXIT_OK
        assert read_tensor(recon).shape == (4, 5)

    def test_bad_rank_is_param_error(self, tmp_path, matrix_file):
        code = main([
            "compress", str(matrix_file), str(tmp_path / "o"), "--rank", "99",
        ])
        assert code == EXIT_PARAM

    def test_calibrated_compress(self, tmp_path, matrix_file):
        calib_path = tmp_path / "c.fatf"
        write_tensor(calib_path, np.ones((32, 17)))
        out = tmp_path / "w.falq"
        assert main([
            "compress", str(matrix_file), str(out),
            "--rank", "4", "--calib", str(calib_path),
        ]) == EXIT_OK


class TestReconstruct:
    def test_deterministic_output(self, tmp_path, matrix_file):
        out = tmp_path / "w.falq"
        main(["compress", str(matrix_file), str(out), "--rank", "4"])
        a = tmp_path / "a.fatf"
        b = tmp_path / "b.fatf"
        assert main(["reconstruct", str(out), str(a)]) == EXIT_OK
        assert main(["reconstruct", str(out), str(b)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_truncated_container_is_format_error(self, tmp_path, matrix_file):
        out = tmp_path / "w.falq"
        main(["compress", str(matrix_file), str(out), "--rank", "4"])
        out.write_bytes(out.read_bytes()[:-7])
        assert main(["reconstruct", str(out), str(tmp_path / "x")]) == EXIT_FORMAT

    def test_garbage_container(self, tmp_path):
        bad = tmp_path / "bad.falq"
        bad.write_bytes(b"XXXXGARBAGE" * 20)
        assert main(["reconstruct", str(bad), str(tmp_path / "x")]) == EXIT_FORMAT


class TestAnalyze:
    def test_rank_one_spectrum(self, tmp_path):
        rng = np.random.default_rng(2)
        W = np.outer(rng.standard_normal(16), rng.standard_normal(16))
        path = tmp_path / "r1.fatf"
        write_tensor(path, W)
        out = tmp_path / "spec.csv"
        assert main(["analyze", str(path), "--csv", str(out)]) == EXIT_OK
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["k"] == "1"
        first = float(rows[0]["sigma_spatial"])
        second = float(rows[1]["sigma_spatial"])
        assert second < 1e-10 * first


class TestBudget:
    def test_reference_dims(self, tmp_path):
        dims_path = tmp_path / "dims.json"
        dims_path.write_text(json.dumps({"layers": LLAMA3_8B_LAYERS}))
        report_path = tmp_path / "budget.json"
        assert main([
            "budget", str(dims_path), "--bq", "2", "--bl", "16",
            "--rank", "256", "--json", str(report_path),
        ]) == EXIT_OK
        report = json.loads(report_path.read_text())
        _validate(report)
        assert report["average_bits"] == pytest.approx(3.538, abs=5e-4)
        assert report["rank_threshold"] == pytest.approx(2329.6, abs=0.05)

    def test_bad_dims_file(self, tmp_path):
        dims_path = tmp_path / "dims.json"
        dims_path.write_text(json.dumps({"nope": 1}))
        assert main(["budget", str(dims_path)]) == EXIT_PARAM


class TestBench:
    def test_domains_csv_schema(self, tmp_path):
        csv_path = tmp_path / "bench.csv"
        json_path = tmp_path / "bench.json"
        assert main([
            "bench", "--kind", "domains", "--size", "24", "--seeds", "5",
            "--rank", "4", "--seed", "0",
            "--csv", str(csv_path), "--json", str(json_path),
        ]) == EXIT_OK
        with open(csv_path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == [
            "seed", "rank", "spatial_err", "freq_err",
            "spatial_min_rank", "freq_min_rank",
        ]
        assert len(rows) == 1 + 5
        _validate(json.loads(json_path.read_text()))

    def test_bench_deterministic(self, tmp_path):
        args = [
            "bench", "--kind", "domains", "--size", "16", "--seeds", "4",
            "--rank", "2", "--seed", "3",
        ]
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(args + ["--csv", str(a)]) == EXIT_OK
        assert main(args + ["--csv", str(b), "--jobs", "4"]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_tail_json(self, tmp_path):
        json_path = tmp_path / "tail.json"
        assert main([
            "bench", "--kind", "tail", "--size", "32", "--rho", "0.7",
            "--seeds", "10", "--rank", "4", "--seed", "0",
            "--csv", str(tmp_path / "t.csv"), "--json", str(json_path),
        ]) == EXIT_OK
        _validate(json.loads(json_path.read_text()))

    def test_ablation_rows(self, tmp_path):
        csv_path = tmp_path / "abl.csv"
        assert main([
            "bench", "--kind", "ablation", "--size", "24", "--rank", "3",
            "--seed", "1", "--csv", str(csv_path),
        ]) == EXIT_OK
        with open(csv_path) as fh:
            rows = list(csv.DictReader(fh))
        assert [r["scheme"] for r in rows] == ["polar", "qim"]
