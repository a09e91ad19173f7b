import asyncio
import time
from typing import Any, Dict, Literal

from fastapi import APIRouter, BackgroundTasks, HTTPException
from pydantic import BaseModel, Field, ValidationError

from src.api.routers.tasks import TaskStatusResponse
from src.api.task_tracker import get_task_tracker
from src.bootstrap.errors import DomainError, LabError
from src.bootstrap.logger import get_logger
from src.heat.kpz import kpz_solve
from src.worker.config import ExperimentConfig, apply_overrides, config_hash
from src.worker.experiment_worker import run_experiment

router = APIRouter(tags=["experiments"])
logger = get_logger("api.experiments")

Command = Literal["spectrum", "weyl", "heattrace", "spacing", "que", "lbm", "kpz"]


class ExperimentRequest(BaseModel):
    command: Command
    config: Dict[str, Any] = Field(default_factory=dict)


class ExperimentResponse(BaseModel):
    status: str
    message: str
    task_id: str
    config_hash: str


class KpzRequest(BaseModel):
    x: float
    gamma: float


class KpzResponse(BaseModel):
    x: float
    gamma: float
    delta: float
    one_minus_delta: float
    boundary_coupling: float


async def run_experiment_task(command: str, config: ExperimentConfig, task_id: str):
    """Run one experiment off the event loop and record the outcome on the tracker"""
    tracker = get_task_tracker()
    await tracker.start_task(task_id)
    await tracker.update_progress(task_id, f"Running {command}")
    start_time = time.time()
    try:
        record = await asyncio.to_thread(run_experiment, command, config)
    except LabError as e:
        await tracker.complete_task(task_id, success=False, error_message=str(e), exit_code=e.exit_code)
        return
    except Exception as e:
        logger.error(f"Background task {task_id} crashed: {e}")
        await tracker.complete_task(task_id, success=False, error_message=f"Task execution failed: {str(e)}")
        return

    await tracker.update_progress(task_id, f"Finished in {time.time() - start_time:.2f}s")
    await tracker.complete_task(task_id, success=True, exit_code=0, result={
        "run_id": record.run_id,
        "summary": record.summary,
        "flags": record.flags,
        "outputs": record.outputs,
    })


@router.post("/experiments", response_model=ExperimentResponse)
async def submit_experiment(req: ExperimentRequest, background_tasks: BackgroundTasks):
    logger.info(f"Experiment request received: {req.command}")
    try:
        config = apply_overrides(ExperimentConfig(), req.config)
    except ValidationError as e:
        raise HTTPException(status_code=422, detail=f"Invalid experiment config: {e.errors()}")

    digest = config_hash(config)
    task_id = await get_task_tracker().add_task(req.command, metadata={"config_hash": digest, "gamma": config.gamma})
    background_tasks.add_task(run_experiment_task, req.command, config, task_id)
    return ExperimentResponse(status="queued", message=f"{req.command} experiment queued", task_id=task_id,
                              config_hash=digest)


@router.get("/experiments/{task_id}", response_model=TaskStatusResponse)
async def get_experiment(task_id: str):
    task = await get_task_tracker().get_task(task_id)
    if not task:
        raise HTTPException(status_code=404, detail=f"Experiment not found: {task_id}")
    return TaskStatusResponse.from_task(task)


@router.post("/kpz", response_model=KpzResponse)
def solve_kpz(req: KpzRequest):
    try:
        exponents = kpz_solve(req.x, req.gamma)
    except DomainError as e:
        raise HTTPException(status_code=422, detail=str(e))
    return KpzResponse(x=exponents.euclid_x, gamma=exponents.gamma, delta=exponents.delta,
                       one_minus_delta=1.0 - exponents.delta,
                       boundary_coupling=exponents.boundary_coupling)
