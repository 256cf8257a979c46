# ramsey_search/matrices/__init__.py
import os
from typing import Dict, Tuple

# name -> (matrix file, pattern spec for color 0, pattern spec for color 1)
FIXTURES: Dict[str, Tuple[str, str, str]] = {
    'W5W7': ('w5w7.txt', 'W5', 'W7'),
    'K25K35': ('k25k35.txt', 'K2,5', 'K3,5'),
    'B3B6': ('b3b6.txt', 'B3', 'B6'),
    'B4B5': ('b4b5.txt', 'B4', 'B5'),
}


def load_matrix_text(filename: str) -> str:
    """
    Load one of the embedded matrix files
    """
    matrix_path = os.path.join(os.path.dirname(__file__), filename)

    try:
        with open(matrix_path, 'r', encoding='utf-8') as file:
            return file.read()
    except FileNotFoundError:
        raise FileNotFoundError(f"Matrix file not found at: {matrix_path}")


# Cache the matrix text to avoid repeated file reads
_cached_matrices: Dict[str, str] = {}


def get_cached_matrix_text(name: str) -> str:
    """
    Get cached matrix text for a fixture name, loading it if not cached
    """
    if name not in _cached_matrices:
        _cached_matrices[name] = load_matrix_text(FIXTURES[name][0])
    return _cached_matrices[name]
