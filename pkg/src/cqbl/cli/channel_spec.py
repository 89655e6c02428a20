"""Channel-spec JSON documents.

A spec looks like::

    {
      "name": "qubit-pure",
      "alphabet": ["0", "1"],
      "d_B": 2,
      "d_C": 2,
      "states": [<(d_B·d_C)² [re, im] pairs>, ...],
      "degrading_map": [<d_C × d_B Kraus operator>, ...]   (optional)
    }

State and Kraus entries are nested arrays of ``[re, im]`` pairs.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from ..broadcast.catalog import CatalogEntry
from ..broadcast.channel import CqBroadcastChannel
from ..broadcast.degrading import declared_map_residual
from ..core.errors import CqblError, SpecParseError
from ..core.serialization import decode_matrix, decode_rect_matrix, encode_matrix
from ..quantum.operators import DensityMatrix, QuantumChannel

logger = logging.getLogger(__name__)

DECLARED_MAP_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """A parsed spec: the channel and its optional declared degrading map."""
    channel: CqBroadcastChannel
    degrading_map: Optional[QuantumChannel] = None
    name: str = ""
    description: str = ""

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {}
        if self.name:
            data["name"] = self.name
        if self.description:
            data["description"] = self.description
        data["alphabet"] = list(self.channel.alphabet)
        data["d_B"] = self.channel.d_b
        data["d_C"] = self.channel.d_c
        data["states"] = [encode_matrix(state.entries) for state in self.channel.states]
        if self.degrading_map is not None:
            data["degrading_map"] = [encode_matrix(k) for k in self.degrading_map.kraus]
        return data

    @classmethod
    def from_dict(cls, data: Any) -> "ChannelSpec":
        """Parse and validate a spec document.

        Raises:
            SpecParseError: on missing fields, malformed matrices, invalid
                states or a declared degrading map that does not fit
        """
        if not isinstance(data, dict):
            raise SpecParseError("A channel spec must be a JSON object")
        for key in ("alphabet", "d_B", "d_C", "states"):
            if key not in data:
                raise SpecParseError(f"Missing required field {key!r}")

        alphabet = data["alphabet"]
        if not isinstance(alphabet, list) or not alphabet:
            raise SpecParseError("'alphabet' must be a non-empty list of symbol names")
        d_b, d_c = _positive_int(data["d_B"], "d_B"), _positive_int(data["d_C"], "d_C")

        states = data["states"]
        if not isinstance(states, list):
            raise SpecParseError("'states' must be a list of matrices")
        matrices = [decode_matrix(s, f"states[{i}]") for i, s in enumerate(states)]

        try:
            channel = CqBroadcastChannel(
                tuple(str(a) for a in alphabet),
                tuple(DensityMatrix(m) for m in matrices),
                d_b,
                d_c,
            )
        except CqblError as e:
            raise SpecParseError(f"Invalid channel: {e}") from e

        degrading = None
        if data.get("degrading_map") is not None:
            kraus = data["degrading_map"]
            if not isinstance(kraus, list) or not kraus:
                raise SpecParseError("'degrading_map' must be a non-empty list of Kraus operators")
            try:
                degrading = QuantumChannel(
                    tuple(decode_rect_matrix(k, f"degrading_map[{i}]") for i, k in enumerate(kraus))
                )
            except SpecParseError:
                raise
            except CqblError as e:
                raise SpecParseError(f"Invalid degrading map: {e}") from e
            residual = declared_map_residual(channel, degrading)
            if residual > DECLARED_MAP_TOL:
                raise SpecParseError(
                    f"Declared degrading map does not fit the channel (residual {residual:.3e} > {DECLARED_MAP_TOL:g})"
                )

        return cls(
            channel=channel,
            degrading_map=degrading,
            name=str(data.get("name", "")),
            description=str(data.get("description", "")),
        )

    @classmethod
    def from_catalog(cls, entry: CatalogEntry) -> "ChannelSpec":
        return cls(entry.channel, entry.degrading_map, entry.name, entry.description)


def _positive_int(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value or value < 1:
        raise SpecParseError(f"{name!r} must be a positive integer, got {value!r}")
    return int(value)


def load_spec(path: Union[str, Path]) -> ChannelSpec:
    """Read and parse a spec file; every failure surfaces as SpecParseError."""
    path = Path(path)
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except OSError as e:
        raise SpecParseError(f"Cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SpecParseError(f"{path} is not valid JSON: {e}") from e
    spec = ChannelSpec.from_dict(data)
    logger.info(
        f"Loaded channel spec {spec.name or path.name}: |X|={spec.channel.size}, "
        f"d_B={spec.channel.d_b}, d_C={spec.channel.d_c}"
    )
    return spec


def save_spec(spec: ChannelSpec, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w") as f:
        json.dump(spec.to_dict(), f, indent=2)
    return path


def channel_difference(first: CqBroadcastChannel, second: CqBroadcastChannel) -> Tuple[bool, float]:
    """Whether two channels share alphabet and dims, and their largest entrywise difference."""
    same_shape = first.alphabet == second.alphabet and (first.d_b, first.d_c) == (second.d_b, second.d_c)
    if not same_shape:
        return False, float("inf")
    diff = max(float(np.max(np.abs(a.entries - b.entries))) for a, b in zip(first.states, second.states))
    return True, diff
