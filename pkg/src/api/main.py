from fastapi import FastAPI

from src import __version__
from src.api.routers.experiments import router as experiments_router
from src.api.routers.tasks import router as tasks_router

app = FastAPI(
    title="LQG Spectrum Lab API",
    description="Queue Liouville spectrum, heat-trace, chaos and Monte Carlo experiments and read their records",
    version=__version__,
)


@app.get("/health")
def health_check():
    """Health check endpoint"""
    return {"status": "healthy", "message": "LQG Spectrum Lab API is running", "version": __version__}


app.include_router(experiments_router)
app.include_router(tasks_router)
