import time
from abc import ABC, abstractmethod
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

from src.bootstrap.csv_io import write_csv
from src.bootstrap.errors import ConfigurationError, InconclusiveDiagnostic, LabError
from src.bootstrap.logger import get_logger
from src.bootstrap.seeds import derive_seed
from src.domain.grid import build_grid
from src.domain.schema import DomainGrid
from src.field.covariance import build_covariance
from src.field.schema import CouplingParams, CovarianceModel, GmcMeasure
from src.field.snapshot import read_snapshot
from src.spectral.pipeline import Replica, build_replica, replica_from_weights
from src.worker.config import ExperimentConfig, config_hash
from src.worker.records import RunRecord, make_run_id, write_record

logger = get_logger("worker.strategy")


class BaseExperimentStrategy(ABC):
    """One subcommand: runs its stages, writes CSVs and a RunRecord under output_dir/<command>_<run_id>."""

    command: str = "experiment"

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.params = CouplingParams(gamma=config.gamma)
        digest = config_hash(config)
        run_id = make_run_id(self.command, digest)
        self.output_dir = Path(config.output_dir) / f"{self.command}_{run_id}"
        self.record = RunRecord(run_id=run_id, command=self.command,
                                config=config.model_dump(mode="json"), config_hash=digest)
        self._grid: Optional[DomainGrid] = None
        self._model: Optional[CovarianceModel] = None

    @contextmanager
    def stage(self, name: str):
        start_time = time.time()
        logger.info(f"[{self.command}] Stage '{name}' started")
        try:
            yield
        except LabError as e:
            # innermost stage wins
            if e.stage is None:
                e.with_stage(name)
            raise
        finally:
            elapsed = time.time() - start_time
            self.record.stage_seconds[name] = round(self.record.stage_seconds.get(name, 0.0) + elapsed, 3)
            logger.info(f"[{self.command}] Stage '{name}' finished in {elapsed:.2f}s")

    @property
    def grid(self) -> DomainGrid:
        if self._grid is None:
            with self.stage("grid"):
                self._grid = build_grid(self.config.domain, self.config.n)
        return self._grid

    @property
    def model(self) -> CovarianceModel:
        if self._model is None:
            grid = self.grid
            with self.stage("covariance"):
                self._model = build_covariance(grid)
            self.record.summary["jitter_used"] = self._model.jitter_used
        return self._model

    def seed_for(self, stage: str, index: int = 0) -> int:
        seed = derive_seed(self.config.base_seed, stage, index)
        self.record.seeds.setdefault(stage, []).append(seed)
        return seed

    def replica(self, index: int = 0) -> Replica:
        model = self.model
        seed = self.seed_for("field", index)
        with self.stage("replica"):
            return build_replica(model, self.params, seed, index)

    def stored_measure(self) -> GmcMeasure:
        with self.stage("snapshot"):
            _, weights = read_snapshot(self.config.snapshot_path)
        return GmcMeasure(weights=weights, gamma=self.params.gamma)

    def stored_replica(self) -> Replica:
        """Replica rebuilt from the LQGF snapshot in config.snapshot_path."""
        grid = self.grid
        measure = self.stored_measure()
        if measure.size != grid.size:
            raise ConfigurationError(
                f"snapshot holds {measure.size} weights but the n={self.config.n} grid has {grid.size} points",
                stage="snapshot",
            )
        with self.stage("replica"):
            return replica_from_weights(grid, measure.weights, self.params.gamma)

    def input_replica(self) -> Replica:
        if self.config.snapshot_path is not None:
            logger.info(f"[{self.command}] Using stored field snapshot {self.config.snapshot_path}")
            return self.stored_replica()
        return self.replica(0)

    def track(self, path: Path) -> Path:
        self.record.outputs.append(str(path))
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        return self.track(write_csv(self.output_dir / name, header, rows, [self.record.csv_comment()]))

    def flag(self, source: str, flags: List[str]) -> None:
        if flags:
            logger.warning(f"[{self.command}] {source}: {'; '.join(flags)}")
            self.record.add_flags(source, flags)

    @abstractmethod
    def execute(self) -> None:
        """Run the stages, write outputs and fill self.record.summary."""

    def run(self) -> RunRecord:
        logger.info(f"[JOB] {self.command} started (run_id={self.record.run_id}, "
                    f"gamma={self.config.gamma}, n={self.config.n})")
        start_time = time.time()
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.execute()
        self.track(self.output_dir / "record.json")
        write_record(self.record, self.output_dir)
        logger.info(f"[JOB] {self.command} finished in {time.time() - start_time:.2f}s -> {self.output_dir}")
        if self.config.strict and self.record.flags:
            raise InconclusiveDiagnostic(
                f"{len(self.record.flags)} diagnostic flag(s), first: {self.record.flags[0]}", stage=self.command
            )
        return self.record
