# ramsey_search/schemas/__init__.py
import json
import os
from typing import Dict, Any

SCHEMA_FILES = {
    'run_config': 'run_config_schema.json',
    'checkpoint': 'checkpoint_schema.json',
}

def load_schema(name: str) -> Dict[str, Any]:
    """
    Load a schema from its JSON file
    """
    schema_path = os.path.join(os.path.dirname(__file__), SCHEMA_FILES[name])

    try:
        with open(schema_path, 'r', encoding='utf-8') as file:
            schema = json.load(file)
        return schema
    except FileNotFoundError:
        raise FileNotFoundError(f"Schema file not found at: {schema_path}")
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in schema file: {e}")

# Cache the schemas to avoid repeated file reads
_cached_schemas: Dict[str, Dict[str, Any]] = {}

def get_cached_schema(name: str) -> Dict[str, Any]:
    """
    Get cached schema or load it if not cached
    """
    if name not in _cached_schemas:
        _cached_schemas[name] = load_schema(name)
    return _cached_schemas[name]
