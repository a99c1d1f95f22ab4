"""Gaussian quadrature modulation for coherent-state key distribution.

Maps a standard-normal stream onto (q, p) quadrature pairs in shot-noise
units with configurable modulation variance V: both quadratures are
independent zero-mean normals of variance V.  Even-indexed source values
feed q and odd-indexed values feed p, so the two quadrature streams are
disjoint subsequences of the source and no value is reused.

Channel transmission, detection and reconciliation are out of scope; this
module only prepares the modulation values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModulationConfig",
    "QuadraturePair",
    "SourceExhaustedError",
    "pairs_to_csv",
    "pairs_to_json",
    "quadrature_stream",
]


class SourceExhaustedError(RuntimeError):
    """The Gaussian source yielded fewer values than the pairing needs."""


@dataclass(frozen=True)
class QuadraturePair:
    q: float
    p: float


@dataclass(frozen=True)
class ModulationConfig:
    """Modulation variance V > 0 and the number of pairs to prepare."""

    variance: float
    count: int

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError(f"variance must be positive, got {self.variance}")
        if self.count < 0:
            raise ValueError(f"count must be >= 0, got {self.count}")


def quadrature_stream(source, config):
    """Scale and pair a standard-normal stream into quadrature components.

    q_j = sqrt(V) * g_(2j), p_j = sqrt(V) * g_(2j+1).  `source` is any
    iterable of standard-normal values; it must supply at least 2 * count
    values or SourceExhaustedError is raised.  Returns an array of shape
    (count, 2) with columns (q, p).
    """
    g = np.fromiter(source, dtype=np.float64, count=-1) \
        if not isinstance(source, np.ndarray) else np.asarray(source, dtype=np.float64)
    needed = 2 * config.count
    if g.size < needed:
        raise SourceExhaustedError(
            f"need {needed} source values for {config.count} pairs, got {g.size}"
        )
    scale = math.sqrt(config.variance)
    out = np.empty((config.count, 2), dtype=np.float64)
    out[:, 0] = scale * g[0:needed:2]
    out[:, 1] = scale * g[1:needed:2]
    return out


def pairs_to_csv(pairs):
    lines = ["q,p"]
    for q, p in np.asarray(pairs):
        lines.append(f"{float(q)!r},{float(p)!r}")
    return "\n".join(lines) + "\n"


def pairs_to_json(pairs):
    return json.dumps([{"q": float(q), "p": float(p)}
                       for q, p in np.asarray(pairs)])
