import logging
import sys

LOG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s: %(message)s"

# Set up a single logger for the whole lab
logging.basicConfig(
    level=logging.INFO,
    format=LOG_FORMAT,
    stream=sys.stdout
)

LAB_LOGGERS = ["worker", "api.experiments", "api.tasks", "spectral.eigen", "lbm.clock"]

def get_logger(name=None):
    return logging.getLogger(name or "lqg")

def set_log_level(level):
    """Set the logging level for the root logger and the lab loggers"""
    if isinstance(level, str):
        level = getattr(logging, level.upper())
    logging.getLogger().setLevel(level)
    for logger_name in LAB_LOGGERS:
        logging.getLogger(logger_name).setLevel(level)

def enable_debug_logging():
    """Enable debug logging for per-stage and per-replica detail"""
    set_log_level(logging.DEBUG)
    get_logger("lqg").debug("Debug logging enabled")
