import logging
import os

from dotenv import load_dotenv
from pydantic import BaseModel

load_dotenv()


class LabSettings(BaseModel):
    """
    Process-wide defaults, read from the environment (or a .env file in the working directory).
    """
    seed: int = 20240101
    mc_samples: int = 100_000
    workers: int = 1
    cell_timeout: float = 60.0
    log_level: str = "INFO"
    assignment_limit: int = 512
    reference_restarts: int = 10


def load_settings() -> LabSettings:
    return LabSettings(
        seed=int(os.getenv('QLAB_SEED', '20240101')),
        mc_samples=int(os.getenv('QLAB_MC_SAMPLES', '100000')),
        workers=int(os.getenv('QLAB_WORKERS', '1')),
        cell_timeout=float(os.getenv('QLAB_CELL_TIMEOUT', '60')),
        log_level=os.getenv('QLAB_LOG_LEVEL', 'INFO'),
        assignment_limit=int(os.getenv('QLAB_ASSIGNMENT_LIMIT', '512')),
        reference_restarts=int(os.getenv('QLAB_REFERENCE_RESTARTS', '10')),
    )


settings = load_settings()


def configure_logging(level: str | None = None):
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
