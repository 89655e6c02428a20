"""JSON encoding of complex matrices as nested [re, im] pairs."""

from typing import Any, List

import numpy as np

from .errors import SpecParseError


def encode_matrix(matrix: np.ndarray) -> List[List[List[float]]]:
    matrix = np.asarray(matrix, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def decode_matrix(data: Any, name: str = "matrix") -> np.ndarray:
    """Inverse of :func:`encode_matrix`; raises SpecParseError on malformed input."""
    try:
        array = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise SpecParseError(f"{name}: entries must be numeric [re, im] pairs ({e})") from e
    if array.ndim != 3 or array.shape[2] != 2 or array.shape[0] != array.shape[1]:
        raise SpecParseError(f"{name}: expected a square array of [re, im] pairs, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise SpecParseError(f"{name}: entries must be finite")
    return array[..., 0] + 1j * array[..., 1]


def decode_rect_matrix(data: Any, name: str = "matrix") -> np.ndarray:
    """Like :func:`decode_matrix` but allows rectangular shapes (Kraus operators)."""
    try:
        array = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise SpecParseError(f"{name}: entries must be numeric [re, im] pairs ({e})") from e
    if array.ndim != 3 or array.shape[2] != 2:
        raise SpecParseError(f"{name}: expected a 2-D array of [re, im] pairs, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise SpecParseError(f"{name}: entries must be finite")
    return array[..., 0] + 1j * array[..., 1]
