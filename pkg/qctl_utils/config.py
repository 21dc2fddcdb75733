from __future__ import annotations

from pathlib import Path

import yaml
from omegaconf import DictConfig

# ====================================================================
# Config utils
# --------------------------------------------------------------------

base_dir = Path(__file__).parent.parent
DEFAULT_CONFIG = f'{base_dir}/configs/checker_config.yaml'


def load_config(path: str | None = None) -> DictConfig:
    with open(path or DEFAULT_CONFIG) as f:
        return DictConfig(yaml.load(f, Loader=yaml.FullLoader))


def default_config() -> DictConfig:
    return load_config()
