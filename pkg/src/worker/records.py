import hashlib
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List

from pydantic import BaseModel, Field

from src import __version__


class RunRecord(BaseModel):
    run_id: str
    command: str
    artifact_version: str = __version__
    config: Dict[str, Any]
    config_hash: str
    seeds: Dict[str, List[int]] = Field(default_factory=dict)
    stage_seconds: Dict[str, float] = Field(default_factory=dict)
    summary: Dict[str, Any] = Field(default_factory=dict)
    flags: List[str] = Field(default_factory=list)
    outputs: List[str] = Field(default_factory=list)
    created_at: datetime = Field(default_factory=datetime.now)

    def csv_comment(self) -> str:
        return f"run_id={self.run_id} config_hash={self.config_hash} version={self.artifact_version}"

    def add_flags(self, source: str, flags: List[str]) -> None:
        self.flags.extend(f"{source}: {flag}" for flag in flags)


def make_run_id(command: str, digest: str) -> str:
    """Deterministic in (version, command, config) so reruns write identical bytes."""
    return hashlib.sha256(f"{__version__}:{command}:{digest}".encode()).hexdigest()[:12]


def write_record(record: RunRecord, directory: Path) -> Path:
    path = Path(directory) / "record.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(record.model_dump_json(indent=2))
    return path
