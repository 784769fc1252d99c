"""
Configuration loading for the CLI.
Reads INI run files into a validated RunConfig and resolves output paths.
"""

import configparser
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from hyperphg.constants import DEFAULT_OUTPUT_DIR
from hyperphg.exceptions import ConfigError
from hyperphg.models import CommandName, RunConfig


class OutputSettings(BaseSettings):
    """Output directory, overridable through HYPERPHG_OUTPUT_DIR or a .env file."""

    model_config = SettingsConfigDict(env_prefix="HYPERPHG_", env_file=".env", extra="ignore")

    output_dir: str = DEFAULT_OUTPUT_DIR


def parse_ini(text: str, source: str = "<config>") -> Dict[str, Dict[str, Any]]:
    """
    Parse INI text into nested section dicts.

    Raises:
        ConfigError: On syntax errors, with the offending line number.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.ParsingError as exc:
        problems = [f"line {lineno}: {line.strip()}" for lineno, line in exc.errors]
        raise ConfigError(f"cannot parse {source}", problems) from exc
    except (
        configparser.MissingSectionHeaderError,
        configparser.DuplicateSectionError,
        configparser.DuplicateOptionError,
    ) as exc:
        lineno = getattr(exc, "lineno", None)
        raise ConfigError(f"cannot parse {source}", [f"line {lineno}: {exc.message}"]) from exc
    return {section: dict(parser.items(section)) for section in parser.sections()}


def _validation_problems(exc: ValidationError) -> List[str]:
    problems = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"])
        problems.append(f"{location}: {error['msg']}")
    return problems


def build_config(sections: Dict[str, Dict[str, Any]]) -> RunConfig:
    """
    Validate section dicts into a RunConfig.

    Raises:
        ConfigError: Naming every invalid field as section.field.
    """
    try:
        return RunConfig.model_validate(sections)
    except ValidationError as exc:
        raise ConfigError("invalid configuration", _validation_problems(exc)) from exc
    except ValueError as exc:
        raise ConfigError("invalid configuration", [str(exc)]) from exc


def load_config(path: Optional[str] = None, seed: Optional[int] = None) -> RunConfig:
    """Read a run file (defaults when path is None) and apply the --seed override."""
    sections: Dict[str, Dict[str, Any]] = {}
    if path is not None:
        file = Path(path)
        if not file.is_file():
            raise ConfigError(f"config file not found: {path}")
        sections = parse_ini(file.read_text(), source=str(file))
    if seed is not None:
        sections.setdefault("run", {})["seed"] = seed
    return build_config(sections)


def resolve_output(config: RunConfig, command: CommandName, out: Optional[str] = None) -> Path:
    """--out wins over [run] output, which wins over HYPERPHG_OUTPUT_DIR/<command>.json."""
    if out:
        return Path(out)
    if config.run.output:
        return Path(config.run.output)
    return Path(OutputSettings().output_dir) / f"{command.value}.json"
