"""Flat `key = value` run-configuration files."""

from pathlib import Path
from typing import Dict, Mapping, Optional

from pydantic import ValidationError

from src.errors import ConfigError
from src.models.run_config import RunConfig


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    """One `key = value` per line; `#` starts a comment; blank lines ignored."""
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{number}: missing key")
        if key in values:
            raise ConfigError(f"{source}:{number}: duplicate key '{key}'")
        values[key] = value
    return values


def load_config_file(path: Path) -> Dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_config_text(text, source=str(path))


def build_run_config(
    path: Optional[Path] = None,
    overrides: Optional[Mapping[str, object]] = None,
) -> RunConfig:
    """Defaults < config file < CLI overrides (None overrides are ignored)."""
    values: Dict[str, object] = dict(load_config_file(path)) if path else {}
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigError(f"invalid configuration: {problems}") from e
