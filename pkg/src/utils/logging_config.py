import logging
import sys
from typing import Optional

from config.settings import LOGS_DIR, LOG_LEVEL

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Library modules log under their package path (src.receiver..., src.equalizer...)
LIBRARY_LOGGER = "src"


def setup_logging(name="shqpsk", level: Optional[str] = None, stream=None):
    """
    Setup logging for the CLI logger and the simulator library.

    Both loggers share one file handler (LOGS_DIR/shqpsk.log) and one console
    handler. Console output goes to stderr so printed tables stay clean on stdout.
    Repeated calls only update the level.
    """
    level_value = getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO)
    loggers = [logging.getLogger(name), logging.getLogger(LIBRARY_LOGGER)]

    for logger in loggers:
        logger.setLevel(level_value)

    if loggers[0].handlers:
        return loggers[0]

    formatter = logging.Formatter(LOG_FORMAT)

    file_handler = logging.FileHandler(LOGS_DIR / "shqpsk.log", encoding='utf-8')
    file_handler.setFormatter(formatter)

    console_handler = logging.StreamHandler(stream or sys.stderr)
    console_handler.setFormatter(formatter)

    for logger in loggers:
        if not logger.handlers:
            logger.addHandler(file_handler)
            logger.addHandler(console_handler)

    return loggers[0]
