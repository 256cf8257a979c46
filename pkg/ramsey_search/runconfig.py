# ramsey_search/runconfig.py
"""
Flat `key = value` run files for the search command.

    n = 5
    m = 2
    pattern.0 = K3
    pattern.1 = K3
    batch_size = 200
    hidden = 128,64
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from django.conf import settings

from .exceptions import ConfigError, PatternSpecError
from .patterns import parse_pattern_spec
from .trainer import TrainerConfig
from .validators import RunConfigValidator

logger = logging.getLogger(__name__)

# config key -> TrainerConfig field, where the names differ
_TRAINER_FIELDS = {'hidden': 'hidden_sizes'}
_RUN_KEYS = ('checkpoint_every', 'restarts')
MAX_PATTERN_FLAGS = 10


@dataclass(frozen=True)
class RunConfig:
    trainer: TrainerConfig
    checkpoint_every: int = 0
    restarts: int = 0


def override_keys() -> List[str]:
    """Keys exposed as `search` flags: every schema key plus pattern.0 .. pattern.9"""
    return RunConfigValidator().keys + [f"pattern.{i}" for i in range(MAX_PATTERN_FLAGS)]


def parse_config_text(text: str) -> Dict[str, str]:
    raw: Dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"line {number}", f"expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        if key in raw:
            raise ConfigError(key, "given more than once")
        raw[key] = value
    return raw


def _defaults() -> Dict[str, Any]:
    return dict(getattr(settings, 'RAMSEY_SETTINGS', {}).get('TRAINER_DEFAULTS', {}))


def build_run_config(raw: Mapping[str, str]) -> RunConfig:
    """Coerce, schema-check and cross-check raw values; errors name the key"""
    validator = RunConfigValidator()
    values = validator.coerce(dict(raw))
    validator.check(values)

    m = values['m']
    patterns = []
    for color in range(m):
        key = f"pattern.{color}"
        if key not in values:
            raise ConfigError(key, f"missing; {m} colors need pattern.0 .. pattern.{m - 1}")
        try:
            patterns.append(parse_pattern_spec(values[key]))
        except PatternSpecError as e:
            raise ConfigError(key, str(e))
    for key in values:
        if key.startswith('pattern.') and int(key.split('.', 1)[1]) >= m:
            raise ConfigError(key, f"only {m} colors are configured")

    merged = _defaults()
    merged.update(values)
    trainer_values = {'n': values['n'], 'm': m, 'patterns': tuple(patterns)}
    for key, value in merged.items():
        if key in ('n', 'm') or key.startswith('pattern.') or key in _RUN_KEYS:
            continue
        name = _TRAINER_FIELDS.get(key, key)
        trainer_values[name] = tuple(value) if name == 'hidden_sizes' else value
    trainer = TrainerConfig(**trainer_values)
    return RunConfig(
        trainer=trainer,
        checkpoint_every=merged.get('checkpoint_every', 0),
        restarts=merged.get('restarts', 0),
    )


def load_run_config(path: str, overrides: Optional[Mapping[str, Optional[str]]] = None) -> RunConfig:
    """Read a run file and apply command-line overrides before validation"""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError('config', f"cannot read {path!r}: {e}")
    raw = parse_config_text(text)
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = str(value)
    run_config = build_run_config(raw)
    logger.info("loaded run config %s: K_%d, %s", path, run_config.trainer.n,
                ','.join(p.spec for p in run_config.trainer.patterns))
    return run_config
