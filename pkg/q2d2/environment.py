import logging
import os
from pathlib import Path

import dotenv

dotenv.load_dotenv()

# ---------------- PATH CONSTANTS -------------------
#  Source folder path
constants_path = Path(__file__)
SRC_PATH = constants_path.parent
PROJECT_PATH = SRC_PATH.parent

#  Data related paths
DATA_PATH = Path(os.getenv("Q2D2_DATA_PATH", PROJECT_PATH / "data"))


def _int_from_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


# ---------------- RUNTIME CONSTANTS ----------------
DEFAULT_SEED = _int_from_env("Q2D2_SEED", 0)
LOG_LEVEL = logging.getLevelName(os.getenv("Q2D2_LOG_LEVEL", "WARNING").upper())
if not isinstance(LOG_LEVEL, int):
    LOG_LEVEL = logging.WARNING


def resolve_output_path(path: "str | Path") -> Path:
    """Relative artefact paths land under DATA_PATH; absolute ones are kept."""
    path = Path(path)
    if path.is_absolute() or path.parent != Path("."):
        return path
    return DATA_PATH / path
