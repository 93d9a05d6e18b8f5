"""
Centralized logging configuration using loguru.
Console logging goes to stderr so stdout stays reserved for reports
and trajectory data.
"""
import sys
from loguru import logger
from core.app_config import LoggingConfig

def setup_logger(level: str = LoggingConfig.LOG_LEVEL):
    """
    Configure loguru for console logging.
    Removes any existing handler and adds a new one with custom format.
    """
    logger.remove()

    logger.add(
        sys.stderr,
        format="<level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>",
        level=level.upper(),
        colorize=True,
        backtrace=True,
        diagnose=False
    )

    return logger

# Initialize logger on module import
logger = setup_logger()
