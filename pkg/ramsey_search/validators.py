# ramsey_search/validators.py
import re
from typing import Dict, Any, List, Optional, Tuple

from jsonschema import Draft7Validator, ValidationError

from .exceptions import CheckpointError, ConfigError
from .schemas import get_cached_schema

_REQUIRED_MESSAGE = re.compile(r"'([^']+)' is a required property")
_EXPECTED = {'integer': 'an integer', 'number': 'a number', 'array': 'comma separated integers'}


def _error_field(error: ValidationError) -> str:
    """Dotted path of the offending value, including the name of a missing key"""
    path = [str(part) for part in error.absolute_path]
    if error.validator == 'required':
        match = _REQUIRED_MESSAGE.search(error.message)
        if match:
            path.append(match.group(1))
    return '.'.join(path)


def _first_error(validator: Draft7Validator, data: Any) -> Optional[ValidationError]:
    errors = sorted(validator.iter_errors(data), key=lambda e: [str(p) for p in e.absolute_path])
    return errors[0] if errors else None


class RunConfigValidator:
    """
    Validates run configurations against the run config schema
    """

    def __init__(self):
        self.schema = get_cached_schema('run_config')
        self.validator = Draft7Validator(self.schema)
        self.key_patterns = [re.compile(p) for p in self.schema.get('patternProperties', {})]

    @property
    def keys(self) -> List[str]:
        return list(self.schema.get('properties', {}))

    def is_known_key(self, key: str) -> bool:
        return key in self.schema['properties'] or any(p.match(key) for p in self.key_patterns)

    def coerce(self, raw: Dict[str, str]) -> Dict[str, Any]:
        """
        Turn the raw text values of a config file into typed values

        Args:
            raw: key -> value text

        Returns:
            key -> int / float / list / str according to the schema
        """
        properties = self.schema['properties']
        values: Dict[str, Any] = {}
        for key, text in raw.items():
            if not self.is_known_key(key):
                raise ConfigError(key, "unknown key")
            kind = properties.get(key, {}).get('type', 'string')
            text = text.strip()
            try:
                if kind == 'integer':
                    values[key] = int(text)
                elif kind == 'number':
                    values[key] = float(text)
                elif kind == 'array':
                    values[key] = [int(part) for part in text.split(',') if part.strip()]
                else:
                    values[key] = text
            except ValueError:
                raise ConfigError(key, f"expected {_EXPECTED.get(kind, kind)}, got {text!r}")
        return values

    def validate_run_config(self, data: Dict[str, Any]) -> Tuple[bool, Optional[str]]:
        """
        Validate a typed run configuration

        Returns:
            Tuple of (is_valid, error_message)
        """
        error = _first_error(self.validator, data)
        if error is None:
            return True, None
        return False, f"Validation error at {_error_field(error)}: {error.message}"

    def check(self, data: Dict[str, Any]) -> None:
        """Raise ConfigError naming the first offending top-level key"""
        error = _first_error(self.validator, data)
        if error is not None:
            path = list(error.absolute_path)
            key = str(path[0]) if path else _error_field(error)
            raise ConfigError(key or 'config', error.message)


class CheckpointValidator:
    """
    Validates checkpoint documents before a search is rebuilt from them
    """

    def __init__(self):
        self.schema = get_cached_schema('checkpoint')
        self.validator = Draft7Validator(self.schema)

    def validate_checkpoint(self, data: Any) -> Tuple[bool, Optional[str]]:
        error = _first_error(self.validator, data)
        if error is None:
            return True, None
        return False, f"Validation error at {_error_field(error)}: {error.message}"

    def check(self, data: Any) -> None:
        """Raise CheckpointError naming the first bad field"""
        error = _first_error(self.validator, data)
        if error is not None:
            raise CheckpointError(_error_field(error) or 'checkpoint', error.message)
