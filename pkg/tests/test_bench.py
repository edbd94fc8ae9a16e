import csv

import numpy as np
import pytest

from oracles import brute_roc_auc, lstsq_floor
from qnnspectra import bench
from qnnspectra.errors import ConfigError, ContractError
from qnnspectra.training import TrainConfig


class TestMetrics:
    def test_roc_example(self):
        assert bench.roc_auc([0, 0, 1, 1], [0.1, 0.4, 0.35, 0.8]) == 0.75

    def test_roc_separated(self):
        assert bench.roc_auc([0, 0, 1, 1], [0.1, 0.2, 0.7, 0.9]) == 1.0

    def test_roc_ties(self):
        assert bench.roc_auc([0, 1], [0.5, 0.5]) == 0.5

    def test_roc_matches_pairs_oracle(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            n = int(rng.integers(2, 51))
            y = rng.integers(0, 2, n)
            y[0], y[1] = 0, 1
            # coarse scores force plenty of ties
            s = rng.integers(0, 8, n) / 7
            assert abs(bench.roc_auc(y, s) - brute_roc_auc(y, s)) <= 1e-12

    def test_confusion_fixture(self):
        y = [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
        p = [1, 1, 0, 1, 0, 0, 0, 0, 0, 0]
        assert bench.confusion(y, p) == (2, 1, 1, 6)
        m = bench.metrics_from_confusion(2, 1, 1, 6)
        assert m["precision"] == 2 / 3 and m["recall"] == 2 / 3
        assert m["f1"] == pytest.approx(2 / 3, abs=1e-15)
        assert m["accuracy"] == 0.8

    def test_classification_metrics(self):
        m = bench.classification_metrics([0, 0, 1, 1], [0.1, 0.4, 0.35, 0.8])
        assert m["roc_auc"] == 0.75
        assert m["accuracy"] == 0.75 and m["precision"] == 1.0 and m["recall"] == 0.5

    def test_single_class(self):
        with pytest.raises(bench.RocAucUndefined) as info:
            bench.classification_metrics([1, 1, 1], [0.2, 0.7, 0.9])
        assert info.value.metrics["recall"] == 2 / 3
        assert info.value.metrics["roc_auc"] is None

    def test_score_range(self):
        with pytest.raises(ContractError):
            bench.classification_metrics([0, 1], [0.2, 1.3])


class TestFormatting:
    def test_fmt(self):
        assert bench.fmt(None) == ""
        assert bench.fmt(0.1) == "0.1"
        assert bench.fmt(np.float64(1 / 3)) == repr(1 / 3)
        assert bench.fmt(np.int64(4)) == "4"
        assert float(bench.fmt(2.5e-17)) == 2.5e-17


class TestCapability:
    def test_truncation_floor_matches_oracle(self):
        x = np.linspace(0, 2 * np.pi, 200)
        y = np.cos(x) + 0.4 * np.sin(3 * x) - 0.2 * np.cos(5 * x)
        for omega in ([0, 1], [-1, 0, 1, 2, 3], range(-5, 6)):
            assert bench.truncation_floor(x, y, omega) == pytest.approx(lstsq_floor(x, y, omega), abs=1e-12)

    def test_population_growth_bound(self):
        cfg = TrainConfig(epochs=15, learning_rate=0.05)
        small = bench.learning_capability("hamming", 1, 2, 2, 3, cfg, points=60, master_seed=5)
        big = bench.learning_capability("hamming", 1, 2, 2, 4, cfg, points=60, master_seed=5)
        assert [r.final_loss for r in small.per_function] == [r.final_loss for r in big.per_function[:3]]
        worst = max(r.final_loss for r in big.per_function)
        assert abs(big.mu - small.mu) <= worst / 4 + 1e-15
        assert big.q25 <= big.q75

    def test_parallel_matches_serial(self):
        cfg = TrainConfig(epochs=10, learning_rate=0.05)
        a = bench.learning_capability("binary", 2, 1, 2, 3, cfg, points=40, master_seed=1, workers=1)
        b = bench.learning_capability("binary", 2, 1, 2, 3, cfg, points=40, master_seed=1, workers=2)
        for ra, rb in zip(a.per_function, b.per_function):
            assert np.array_equal(ra.history, rb.history)

    def test_population_contract(self):
        with pytest.raises(ContractError):
            bench.learning_capability("hamming", 1, 1, 2, 0)


REGRESSION_YAML = """\
task: regression
seed: 3
architecture:
  family: [hamming, exponential]
  shapes: [[1, 1], [2, 1]]
training:
  epochs: 6
  learning_rate: 0.05
data:
  K: 2
  population: 2
  points: 30
"""


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestSuite:
    def test_regression_schema(self, tmp_path):
        cfg = tmp_path / "suite.yaml"
        cfg.write_text(REGRESSION_YAML)
        paths = bench.run_suite(cfg, tmp_path / "out")
        rows = _rows(paths["results"])
        assert len(rows) == 4
        assert list(rows[0]) == bench.RESULT_COLUMNS
        for r in rows:
            assert r["mu_K"] != "" and float(r["mu_K"]) >= 0
            assert float(r["q25"]) <= float(r["q75"])
            for col in ("accuracy", "precision", "recall", "f1", "roc_auc", "wall_time_s"):
                assert r[col] == ""
        assert len(paths["histories"]) == 4
        hist = _rows(paths["histories"][0])
        assert len(hist) == 6 and hist[0]["epoch"] == "1"
        assert len(_rows(paths["errors"])) == 0

    def test_rerun_byte_identical(self, tmp_path):
        cfg = tmp_path / "suite.yaml"
        cfg.write_text(REGRESSION_YAML)
        a = bench.run_suite(cfg, tmp_path / "a", workers=1)
        b = bench.run_suite(cfg, tmp_path / "b", workers=2)
        assert open(a["results"], "rb").read() == open(b["results"], "rb").read()
        for pa, pb in zip(a["histories"], b["histories"]):
            assert open(pa, "rb").read() == open(pb, "rb").read()

    def test_unknown_family(self, tmp_path):
        cfg = tmp_path / "suite.yaml"
        cfg.write_text(REGRESSION_YAML.replace("[hamming, exponential]", "[fibonacci]"))
        with pytest.raises(ConfigError, match="fibonacci"):
            bench.run_suite(cfg, tmp_path / "out")

    def test_unknown_keys_listed(self, tmp_path):
        cfg = tmp_path / "suite.yaml"
        cfg.write_text(REGRESSION_YAML + "colour: blue\nzeta: 1\n")
        with pytest.raises(ConfigError, match="colour, zeta"):
            bench.run_suite(cfg, tmp_path / "out")

    def test_bad_cell_recorded_and_suite_continues(self, tmp_path):
        cfg = tmp_path / "suite.yaml"
        # golomb needs block width 2 or 3, so R=1 fails; R=2 must still run
        cfg.write_text(REGRESSION_YAML.replace("[hamming, exponential]", "[golomb]"))
        paths = bench.run_suite(cfg, tmp_path / "out")
        rows = _rows(paths["results"])
        errs = _rows(paths["errors"])
        assert len(rows) == 2 and len(errs) == 1
        assert errs[0]["R"] == "1" and "ArchitectureError" in errs[0]["error"]
        ok = [r for r in rows if r["R"] == "2"][0]
        assert ok["mu_K"] != ""

    def test_timings_opt_in(self, tmp_path):
        cfg = tmp_path / "suite.yaml"
        cfg.write_text(REGRESSION_YAML.replace("[hamming, exponential]", "hamming").replace("[[1, 1], [2, 1]]", "[[1, 1]]"))
        rows = _rows(bench.run_suite(cfg, tmp_path / "out", record_timing=True)["results"])
        assert float(rows[0]["wall_time_s"]) > 0

    def test_classification_suite(self, tmp_path):
        rng = np.random.default_rng(0)
        d = tmp_path / "ds"
        d.mkdir()
        for name, n in (("train.csv", 40), ("test.csv", 20)):
            y = np.arange(n) % 2
            X = np.column_stack([(2 * y - 1) * 0.6 + 0.1 * rng.normal(size=n), 0.1 * rng.normal(size=n)])
            with open(d / name, "w") as fh:
                fh.write("rms1,rms2,label\n")
                for row, lab in zip(X, y):
                    fh.write(f"{row[0]},{row[1]},{lab}\n")
        cfg = tmp_path / "suite.yaml"
        cfg.write_text(
            "task: classification\n"
            "architecture: {family: exponential, shapes: [[1, 1]], features: 2, ansatz: sequential}\n"
            "training: {epochs: 3, batch_size: 16}\n"
            "data: {datasets: [{name: toy, dir: ds}]}\n"
        )
        rows = _rows(bench.run_suite(cfg, tmp_path / "out")["results"])
        assert len(rows) == 1
        r = rows[0]
        assert r["K_or_dataset"] == "toy" and r["mu_K"] == ""
        assert 0 <= float(r["roc_auc"]) <= 1 and 0 <= float(r["accuracy"]) <= 1

    def test_regression_rejects_multifeature(self):
        with pytest.raises(ConfigError):
            bench.plan_suite({"architecture": {"features": 2}})
