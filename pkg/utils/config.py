"""Configuration loader for RTT scripts and the CLI.

Tolerances live in the numerical modules as constants; config.yaml only carries
defaults for the command line (table grid, simulation sizes, output format).
"""
import os
from pathlib import Path

import yaml
from dotenv import load_dotenv

load_dotenv()

PROJECT_ROOT = Path(__file__).resolve().parent.parent


def _config_path() -> Path:
    override = os.getenv("RTT_CONFIG", "").strip()
    if override:
        return Path(override)
    return PROJECT_ROOT / "config.yaml"


def load_config() -> dict:
    path = _config_path()
    if not path.exists():
        return {}
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def get_section(name: str) -> dict:
    return load_config().get(name, {}) or {}


def get_version() -> str:
    return str(get_section("project").get("version", "0.0.0"))
