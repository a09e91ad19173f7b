from datetime import datetime
from typing import Any, Dict, List, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel

from src.api.task_tracker import TaskInfo, get_task_tracker
from src.bootstrap.logger import get_logger

router = APIRouter(prefix="/tasks", tags=["task-monitoring"])
logger = get_logger("api.tasks")


# Response Models
class TaskStatusResponse(BaseModel):
    task_id: str
    command: str
    status: str
    created_at: datetime
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    error_message: Optional[str] = None
    exit_code: Optional[int] = None
    progress: Optional[str] = None
    result: Dict[str, Any] = {}
    metadata: Dict[str, Any] = {}

    @classmethod
    def from_task(cls, task: TaskInfo) -> "TaskStatusResponse":
        return cls(
            task_id=task.task_id,
            command=task.command,
            status=task.status.value,
            created_at=task.created_at,
            started_at=task.started_at,
            completed_at=task.completed_at,
            error_message=task.error_message,
            exit_code=task.exit_code,
            progress=task.progress,
            result=task.result,
            metadata=task.metadata,
        )


class TaskStatsResponse(BaseModel):
    total_tasks: int
    running_tasks: int
    pending_tasks: int
    completed_tasks: int
    failed_tasks: int
    success_rate: float


class TaskListResponse(BaseModel):
    tasks: List[TaskStatusResponse]
    total_count: int


@router.get("/stats", response_model=TaskStatsResponse)
async def get_task_stats():
    """
    Overall experiment task statistics: totals per status and the success rate
    """
    logger.info("Task stats request received")
    try:
        stats = await get_task_tracker().get_task_stats()
        return TaskStatsResponse(**stats)
    except Exception as e:
        logger.error(f"Failed to get task stats: {e}")
        raise HTTPException(status_code=500, detail=f"Failed to get task stats: {str(e)}")


@router.get("/running", response_model=TaskListResponse)
async def get_running_tasks():
    tasks = await get_task_tracker().get_running_tasks()
    logger.info(f"Found {len(tasks)} running tasks")
    return TaskListResponse(tasks=[TaskStatusResponse.from_task(t) for t in tasks], total_count=len(tasks))


@router.get("", response_model=TaskListResponse)
async def get_all_tasks(include_completed: bool = True, limit: Optional[int] = 50):
    """
    All tracked experiment tasks, newest first

    Args:
    - include_completed: Whether to include completed and failed tasks
    - limit: Maximum number of tasks to return (default: 50)
    """
    logger.info(f"All tasks request received: include_completed={include_completed}, limit={limit}")
    tasks = await get_task_tracker().get_all_tasks(include_completed=include_completed, limit=limit)
    return TaskListResponse(tasks=[TaskStatusResponse.from_task(t) for t in tasks], total_count=len(tasks))


@router.get("/{task_id}", response_model=TaskStatusResponse)
async def get_task_status(task_id: str):
    logger.info(f"Task status request received for task: {task_id}")
    task = await get_task_tracker().get_task(task_id)
    if not task:
        logger.warning(f"Task not found: {task_id}")
        raise HTTPException(status_code=404, detail=f"Task not found: {task_id}")
    return TaskStatusResponse.from_task(task)


@router.delete("/cleanup")
async def cleanup_old_tasks(days: int = 7):
    """Remove completed and failed tasks older than `days`"""
    logger.info(f"Task cleanup request received: days={days}")
    try:
        cleaned_count = await get_task_tracker().cleanup_old_tasks(days=days)
        return {"cleaned_tasks": cleaned_count, "days": days}
    except Exception as e:
        logger.error(f"Failed to cleanup old tasks: {e}")
        raise HTTPException(status_code=500, detail=f"Failed to cleanup old tasks: {str(e)}")
