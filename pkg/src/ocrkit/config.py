"""Toolkit configuration: one JSON file per workspace, flags override."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .analysis import DEFAULT_WORST_N, DEFAULT_WORST_THRESHOLD
from .engines import DEFAULT_RASTERIZER_TEMPLATE, EngineSpec, tesseract_spec
from .textnorm import POLICIES

CONFIG_FILENAME = "ocrkit.json"
WORKSPACE_ENV_VAR = "OCRKIT_WORKSPACE"

DEFAULT_AVG_POWER_W = 300.0
DEFAULT_CARBON_INTENSITY = 0.25


@dataclass(frozen=True)
class ToolkitConfig:
    """Resolved settings shared by every command."""

    workspace: Path = Path(".")
    policy: str = "preserve"
    engines: tuple[EngineSpec, ...] = field(default_factory=lambda: (tesseract_spec(),))
    default_engine: str = "tesseract"
    rasterizer_template: str = DEFAULT_RASTERIZER_TEMPLATE
    avg_power_w: float = DEFAULT_AVG_POWER_W
    carbon_intensity: float = DEFAULT_CARBON_INTENSITY
    worst_n: int = DEFAULT_WORST_N
    worst_threshold: int = DEFAULT_WORST_THRESHOLD

    def __post_init__(self) -> None:
        names = [spec.name for spec in self.engines]
        if len(names) != len(set(names)):
            raise ValueError("engine names must be unique")
        if self.default_engine not in names:
            raise ValueError(
                f"default engine {self.default_engine!r} is not configured "
                f"(engines: {', '.join(names) or 'none'})"
            )
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r} in config")
        if self.avg_power_w < 0 or self.carbon_intensity < 0:
            raise ValueError("power and carbon intensity must be >= 0")
        if self.worst_n < 1 or self.worst_threshold < 1:
            raise ValueError("worst_n and worst_threshold must be >= 1")

    def engine(self, name: str | None = None) -> EngineSpec:
        """Look up an engine by name (the default engine when None)."""
        wanted = name or self.default_engine
        for spec in self.engines:
            if spec.name == wanted:
                return spec
        known = ", ".join(spec.name for spec in self.engines)
        raise ValueError(f"unknown engine {wanted!r} (configured: {known})")


def _engine_from_dict(payload: dict) -> EngineSpec:
    return EngineSpec(
        name=payload["name"],
        command_template=payload["command_template"],
        model_name=payload["model_name"],
        extra_args=tuple(payload.get("extra_args", [])),
        expected_output_suffix=payload.get("expected_output_suffix", ".txt"),
    )


def load_config(path: Path | None = None, workspace: Path | None = None) -> ToolkitConfig:
    """Load the toolkit config.

    Sources, lowest to highest precedence: built-in defaults, the JSON file
    (explicit path, or ocrkit.json in the workspace), the OCRKIT_WORKSPACE
    environment variable, the ``workspace`` argument. The environment
    variable and argument override the workspace root only.
    """
    config = ToolkitConfig()
    file_path = Path(path) if path is not None else None
    if file_path is None:
        probe_root = workspace or Path(os.environ.get(WORKSPACE_ENV_VAR, "") or ".")
        candidate = Path(probe_root) / CONFIG_FILENAME
        if candidate.is_file():
            file_path = candidate
    if file_path is not None:
        if not file_path.is_file():
            raise FileNotFoundError(f"config file not found: {file_path}")
        payload = json.loads(file_path.read_text(encoding="utf-8"))
        fields: dict = {}
        if "workspace" in payload:
            root = Path(payload["workspace"])
            if not root.is_absolute():
                root = file_path.parent / root
            fields["workspace"] = root
        for key in (
            "policy",
            "default_engine",
            "rasterizer_template",
            "avg_power_w",
            "carbon_intensity",
            "worst_n",
            "worst_threshold",
        ):
            if key in payload:
                fields[key] = payload[key]
        if "engines" in payload:
            fields["engines"] = tuple(
                _engine_from_dict(item) for item in payload["engines"]
            )
        config = replace(config, **fields)
    env_root = os.environ.get(WORKSPACE_ENV_VAR)
    if env_root:
        config = replace(config, workspace=Path(env_root))
    if workspace is not None:
        config = replace(config, workspace=Path(workspace))
    if not config.workspace.is_dir():
        raise FileNotFoundError(f"workspace does not exist: {config.workspace}")
    return config
