import json
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from src.bootstrap.csv_io import read_csv
from src.spectral.io import read_spectrum_csv
from src.worker.config import ExperimentConfig, save_config
from src.worker.experiment_worker import build_parser, config_from_args, main, run_experiment
from src.worker.strategies import STRATEGY_REGISTRY
from src.worker.strategies.base import BaseExperimentStrategy

pytestmark = pytest.mark.integration


def run_dir(root: Path, command: str) -> Path:
    matches = sorted(Path(root).glob(f"{command}_*"))
    assert len(matches) == 1, f"expected one {command} run under {root}, found {matches}"
    return matches[0]


def body_lines(path: Path):
    return [line for line in path.read_text().splitlines() if not line.startswith("#")]


def write_config(tmp_path: Path, **fields) -> Path:
    return save_config(ExperimentConfig(**fields), tmp_path / "config.json")


class FlaggingStrategy(BaseExperimentStrategy):
    command = "kpz"

    def execute(self) -> None:
        self.flag("check", ["tolerance exceeded"])


class TestParser:
    def test_subcommands(self):
        parser = build_parser()
        for command in STRATEGY_REGISTRY:
            assert parser.parse_args([command]).command == command

    def test_flags_override_config_file(self, tmp_path):
        path = write_config(tmp_path, n=20, gamma=0.5)
        args = build_parser().parse_args(["weyl", "--config", str(path), "--gamma", "1.2", "--replicas", "3"])
        config = config_from_args(args)
        assert config.n == 20
        assert config.gamma == 1.2
        assert config.replicas == 3
        assert config.strict is False

    def test_stored_input_flags(self):
        args = build_parser().parse_args(["spacing", "--spectrum", "s.csv", "--snapshot", "f.lqgf"])
        config = config_from_args(args)
        assert config.spectrum_path == Path("s.csv") and config.snapshot_path == Path("f.lqgf")

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["nope"])

    def test_run_experiment_unknown(self):
        with pytest.raises(KeyError):
            run_experiment("nope", ExperimentConfig())


class TestKpzCommand:
    def test_pure_gravity_exponent(self, tmp_path):
        assert main(["kpz", "--x", "0.5", "--gamma", "1.632993", "--out", str(tmp_path)]) == 0
        out = run_dir(tmp_path, "kpz")
        comments, header, rows = read_csv(out / "kpz.csv")
        assert header == ["x", "gamma", "delta", "one_minus_delta", "boundary_coupling"]
        assert comments[0].startswith("run_id=")
        assert float(rows[0][2]) == pytest.approx(0.651388, abs=1e-5)
        record = json.loads((out / "record.json").read_text())
        assert record["command"] == "kpz"
        assert record["flags"] == []

    def test_gamma_out_of_range(self, tmp_path):
        assert main(["kpz", "--gamma", "2.5", "--out", str(tmp_path)]) == 2

    def test_x_out_of_range(self, tmp_path):
        assert main(["kpz", "--x", "1.5", "--out", str(tmp_path)]) == 2

    def test_missing_config_file(self, tmp_path):
        assert main(["kpz", "--config", str(tmp_path / "absent.json"), "--out", str(tmp_path)]) == 2


class TestStrictMode:
    def test_flags_exit_four_only_when_strict(self, tmp_path):
        with patch.dict(STRATEGY_REGISTRY, {"kpz": FlaggingStrategy}):
            assert main(["kpz", "--out", str(tmp_path / "lenient")]) == 0
            assert main(["kpz", "--strict", "--out", str(tmp_path / "strict")]) == 4
        record = json.loads((run_dir(tmp_path / "strict", "kpz") / "record.json").read_text())
        assert record["flags"] == ["check: tolerance exceeded"]


class TestSpectrumCommand:
    def test_outputs(self, tmp_path):
        config = write_config(tmp_path, n=16, eigenfunctions=[1, 3])
        assert main(["spectrum", "--config", str(config), "--seed", "5", "--out", str(tmp_path / "runs")]) == 0
        out = run_dir(tmp_path / "runs", "spectrum")
        for name in ("spectrum.csv", "field.lqgf", "eigenfunction_1.csv", "eigenfunction_3.csv", "record.json"):
            assert (out / name).exists()
        record = json.loads((out / "record.json").read_text())
        assert record["seeds"]["field"] == [5]
        assert record["summary"]["orthonormality_error"] < 1e-8
        assert record["summary"]["semigroup_defect"] < 1e-8
        assert record["summary"]["points"] == len(read_spectrum_csv(out / "spectrum.csv"))

    def test_byte_identical_reruns(self, tmp_path):
        config = write_config(tmp_path, n=16)
        for name in ("a", "b"):
            assert main(["spectrum", "--config", str(config), "--out", str(tmp_path / name)]) == 0
        first = run_dir(tmp_path / "a", "spectrum")
        second = run_dir(tmp_path / "b", "spectrum")
        assert first.name == second.name
        assert (first / "spectrum.csv").read_bytes() == (second / "spectrum.csv").read_bytes()
        assert (first / "field.lqgf").read_bytes() == (second / "field.lqgf").read_bytes()

    def test_seed_changes_spectrum(self, tmp_path):
        config = write_config(tmp_path, n=16)
        for seed in ("1", "2"):
            assert main(["spectrum", "--config", str(config), "--seed", seed, "--out", str(tmp_path / seed)]) == 0
        a = read_spectrum_csv(run_dir(tmp_path / "1", "spectrum") / "spectrum.csv")
        b = read_spectrum_csv(run_dir(tmp_path / "2", "spectrum") / "spectrum.csv")
        assert not np.array_equal(a, b)


class TestStoredInputs:
    @pytest.fixture
    def stored(self, tmp_path):
        config = write_config(tmp_path, n=24, window_frac=(0.02, 0.5))
        assert main(["spectrum", "--config", str(config), "--out", str(tmp_path / "source")]) == 0
        return config, run_dir(tmp_path / "source", "spectrum")

    def test_spacing_from_files_matches_in_memory(self, tmp_path, stored):
        config, source = stored
        assert main(["spacing", "--config", str(config), "--out", str(tmp_path / "memory")]) == 0
        assert main(["spacing", "--config", str(config), "--spectrum", str(source / "spectrum.csv"),
                     "--snapshot", str(source / "field.lqgf"), "--out", str(tmp_path / "files")]) == 0
        memory = run_dir(tmp_path / "memory", "spacing")
        files = run_dir(tmp_path / "files", "spacing")
        assert body_lines(memory / "spacing.csv") == body_lines(files / "spacing.csv")

    def test_spectrum_without_snapshot(self, tmp_path, stored):
        config, source = stored
        assert main(["spacing", "--config", str(config), "--spectrum", str(source / "spectrum.csv"),
                     "--out", str(tmp_path / "bad")]) == 2

    def test_snapshot_size_mismatch(self, tmp_path, stored):
        _, source = stored
        assert main(["spacing", "--n", "16", "--snapshot", str(source / "field.lqgf"),
                     "--out", str(tmp_path / "bad")]) == 2

    def test_foreign_spectrum_file(self, tmp_path, stored):
        config, source = stored
        other = tmp_path / "other.csv"
        other.write_text("a,b\n1,2\n")
        assert main(["spacing", "--config", str(config), "--spectrum", str(other),
                     "--snapshot", str(source / "field.lqgf"), "--out", str(tmp_path / "bad")]) == 2
