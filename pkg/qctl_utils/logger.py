from __future__ import annotations

import logging

from omegaconf import DictConfig

# ====================================================================
# Logger
# --------------------------------------------------------------------

LOG_FORMAT = "%(asctime)s [%(name)s][%(levelname)s] %(message)s"
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')
BACKENDS = ('console', 'none')

logger = logging.getLogger("qctl")
logger.propagate = False
if not logger.handlers:
    _console_handler = logging.StreamHandler()
    _console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(_console_handler)
logger.setLevel(logging.INFO)


def set_log_level(level: str) -> None:
    level = str(level).upper()
    if level not in LOG_LEVELS:
        raise NotImplementedError(f'Available log levels are {list(LOG_LEVELS)}, got {level}')
    logger.setLevel(level)


def get_logger(cfg: DictConfig, verbose: bool = False) -> logging.Logger:
    """Configure the ``qctl`` logger from the ``logger:`` config section."""
    if cfg.backend not in BACKENDS:
        raise NotImplementedError(f'Available logger backends are {list(BACKENDS)}, got {cfg.backend}')
    set_log_level('DEBUG' if verbose else cfg.level)
    logger.disabled = cfg.backend == 'none'
    for handler in logger.handlers:
        handler.setFormatter(logging.Formatter(LOG_FORMAT.replace('%(name)s', f'%(name)s:{cfg.exp_name}')))
    return logger


def log_scalar(key: str, value, step: int | None = None) -> None:
    shown = f'{value:.3f}' if isinstance(value, float) else value
    logger.info(f'{key}: {shown}' if step is None else f'{key}: {shown} (step {step})')
