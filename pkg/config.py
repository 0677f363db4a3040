## Loading settings from the environment
import os
from dotenv import load_dotenv
load_dotenv()


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


# Size limits for triangulated models; the CLI --budget flag overrides the simplex budget
compute_config = {
    "simplex_budget": int(os.getenv("MAC_SIMPLEX_BUDGET", "250000")),
    "enforce_family_budget": _flag("MAC_ENFORCE_FAMILY_BUDGET", "true"),
    "log_level": os.getenv("MAC_LOG_LEVEL", "INFO"),
    "database_url": os.getenv("DATABASE_URL", "sqlite:///./moment_angle_runs.db"),
    "record_runs": _flag("MAC_RECORD_RUNS", "false"),
}
