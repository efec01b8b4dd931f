import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Base Paths
BASE_DIR = Path(__file__).resolve().parent.parent
OUTPUT_DIR = Path(os.getenv("OUTPUT_DIR", BASE_DIR / "out"))
LOGS_DIR = Path(os.getenv("LOGS_DIR", BASE_DIR / "logs"))

# Create directories if they don't exist
LOGS_DIR.mkdir(parents=True, exist_ok=True)

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

# Tool / schema versions (echoed into every report)
TOOL_VERSION = os.getenv("TOOL_VERSION", "0.1.0")
CONFIG_SCHEMA_VERSION = 1
REPORT_SCHEMA_VERSION = 1

# Comet ML (optional experiment tracking)
COMET_API_KEY = os.getenv("COMET_API_KEY")
COMET_PROJECT_NAME = os.getenv("COMET_PROJECT_NAME", "shqpsk-sim")
COMET_WORKSPACE = os.getenv("COMET_WORKSPACE")

# Suite Settings
SUITE_MAX_JOBS = int(os.getenv("SUITE_MAX_JOBS", 4))

# Simulation grid defaults
DEFAULT_SYMBOL_RATE_BAUD = float(os.getenv("DEFAULT_SYMBOL_RATE_BAUD", 10e9))
DEFAULT_SAMPLES_PER_SYMBOL = int(os.getenv("DEFAULT_SAMPLES_PER_SYMBOL", 10))
DEFAULT_PRBS_ORDER = int(os.getenv("DEFAULT_PRBS_ORDER", 7))
GUARD_SAMPLES = int(os.getenv("GUARD_SAMPLES", 512))
