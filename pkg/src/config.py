"""
Configuration
Loads config.yaml and validates each section with pydantic models.

Example usage:
    config = load_config("config.yaml")
    print(config.gjk.max_iterations)
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union
import logging
import os

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.errors import ConfigError

DEFAULT_CONFIG_PATH = "config.yaml"


class SupportStrategy(str, Enum):
    """How the per-body support vertex is found."""

    EXHAUSTIVE = "exhaustive"
    HILL_CLIMB = "hill_climb"


class _Section(BaseModel):
    model_config = ConfigDict(extra="ignore", frozen=True)


class GjkConfig(_Section):
    """
    Settings of one GJK distance query.

    Termination uses the duplicate-support test
    ||v||^2 - v.w <= termination_tolerance * max(1, ||v||^2).
    """

    max_iterations: int = Field(default=128, ge=1)
    termination_tolerance: float = Field(default=1e-10, gt=0.0)
    support_strategy: SupportStrategy = SupportStrategy.HILL_CLIMB


class WorldSettings(_Section):
    epsilon: float = Field(default=0.0, ge=0.0)
    exclude_adjacent: bool = True
    early_exit: bool = True
    parallel: bool = False
    strict: bool = False


class MeshSettings(_Section):
    # None means exact bitwise welding
    weld_tolerance: Optional[float] = Field(default=None, ge=0.0)
    allow_nonconvex: bool = False


class KinematicsSettings(_Section):
    package_root: Optional[str] = None
    clamp_limits: bool = False


class BenchSettings(_Section):
    poses: int = Field(default=2000, ge=1)
    seed: int = Field(default=0, ge=0)
    output_dir: str = "outputs"
    csv: Optional[str] = None
    stratify: bool = True


class LoggingSettings(_Section):
    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file: Optional[str] = None
    events_log: Optional[str] = None


class AppConfig(_Section):
    """All configuration sections of the engine."""

    name: str = "Convex Collision Engine"
    gjk: GjkConfig = GjkConfig()
    world: WorldSettings = WorldSettings()
    mesh: MeshSettings = MeshSettings()
    kinematics: KinematicsSettings = KinematicsSettings()
    bench: BenchSettings = BenchSettings()
    logging: LoggingSettings = LoggingSettings()


def config_from_dict(raw: Dict[str, Any]) -> AppConfig:
    """
    Build an AppConfig from an already parsed YAML mapping.

    Args:
        raw: Mapping with optional sections system/gjk/world/mesh/kinematics/bench/logging

    Returns:
        Validated configuration
    """
    if not isinstance(raw, dict):
        raise ConfigError("Configuration root must be a mapping")

    system = raw.get("system", {}) or {}
    sections = {
        key: raw.get(key, {}) or {}
        for key in ("gjk", "world", "mesh", "kinematics", "bench", "logging")
    }
    try:
        return AppConfig(name=system.get("name", AppConfig().name), **sections)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


def load_config(path: Optional[Union[str, Path]] = None) -> AppConfig:
    """
    Load and validate the configuration file.

    The path falls back to $COLLISION_CONFIG, then config.yaml. A missing file
    yields defaults; $COLLISION_PACKAGE_ROOT and $COLLISION_LOG_LEVEL override
    the corresponding settings.

    Args:
        path: Optional path to a YAML file

    Returns:
        Validated configuration
    """
    logger = logging.getLogger("config")
    config_path = Path(path or os.getenv("COLLISION_CONFIG") or DEFAULT_CONFIG_PATH)

    raw: Dict[str, Any] = {}
    if config_path.exists():
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Cannot parse {config_path}: {e}") from e
    else:
        logger.debug(f"Config file {config_path} not found, using defaults")

    config = config_from_dict(raw)

    package_root = os.getenv("COLLISION_PACKAGE_ROOT")
    if package_root:
        config = config.model_copy(
            update={
                "kinematics": config.kinematics.model_copy(
                    update={"package_root": package_root}
                )
            }
        )
    log_level = os.getenv("COLLISION_LOG_LEVEL")
    if log_level:
        config = config.model_copy(
            update={"logging": config.logging.model_copy(update={"level": log_level})}
        )
    return config
