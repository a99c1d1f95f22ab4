"""The three uniform-to-Gaussian transform algorithms.

Each algorithm consumes uniforms from the open interval (0, 1) and emits
standard-normal values:

* ``box-muller`` -- radius sqrt(-2 ln u1) and angle 2*pi*u2 give an exact
  pair per two uniforms.
* ``polar`` -- rejection sampling of the unit disk; the canonical mapping
  v = 2u - 1 makes the output bilateral directly, so no extra sign streams
  are needed.  Proposals landing outside the disk (or exactly on the
  origin) are rejected, which is a normal outcome rather than an error.
* ``clt`` -- the standardized sum of k uniforms, z = (S - k/2)/sqrt(k/12);
  the exact law is the Irwin-Hall distribution, so the output support is
  bounded by |z| <= sqrt(3k).

Scalar operations are the per-sample contract surface; `stream` is the
batch driver that owns its uniform sources and runs vectorized, in either
double-precision reference mode or the binary32 pipeline mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "ALGORITHMS",
    "CltConfig",
    "DomainError",
    "GaussianPair",
    "LengthMismatchError",
    "PolarDraw",
    "StreamResult",
    "box_muller",
    "central_limit",
    "polar",
    "polar_draw",
    "stream",
]

#: Algorithm identifiers shared with the CLI.
ALGORITHMS = ("box-muller", "polar", "clt")

_TWO_PI = 2.0 * math.pi


class DomainError(ValueError):
    """Uniform input outside the open interval (0, 1)."""


class LengthMismatchError(ValueError):
    """Uniform vector length does not match the configured k."""


@dataclass(frozen=True)
class GaussianPair:
    alpha: float
    beta: float


@dataclass(frozen=True)
class CltConfig:
    """Sum-of-uniforms setup: k summands with per-uniform mean and variance.

    The defaults (mu = 1/2, sigma2 = 1/12) are the moments of U(0, 1); with
    k = 12 the standardizing divisor sqrt(k * sigma2) is exactly 1.
    """

    k: int = 12
    mu: float = 0.5
    sigma2: float = 1.0 / 12.0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")

    @property
    def support_bound(self):
        """Largest possible |z|: (k/2) / sqrt(k/12) = sqrt(3k)."""
        return (self.k * self.mu) / math.sqrt(self.k * self.sigma2)


@dataclass(frozen=True)
class PolarDraw:
    """One polar proposal: disk coordinates, squared radius, accept flag."""

    v1: float
    v2: float
    s: float
    accepted: bool


def _value(u):
    """Accept either a UniformSample or a bare float."""
    return u.value if hasattr(u, "value") else float(u)


def _check_open_unit(name, x):
    if not 0.0 < x < 1.0:
        raise DomainError(f"{name} must lie strictly in (0, 1), got {x!r}")


def box_muller(u1, u2):
    """Exact transform: alpha = r sin(theta), beta = r cos(theta).

    r = sqrt(-2 ln u1), theta = 2 pi u2.  Both outputs are marginally
    standard normal for i.i.d. uniform inputs, and alpha^2 + beta^2 equals
    -2 ln u1 up to rounding.
    """
    x1, x2 = _value(u1), _value(u2)
    _check_open_unit("u1", x1)
    _check_open_unit("u2", x2)
    r = math.sqrt(-2.0 * math.log(x1))
    theta = _TWO_PI * x2
    return GaussianPair(alpha=r * math.sin(theta), beta=r * math.cos(theta))


def polar_draw(u1, u2):
    """Map two uniforms onto the square (-1,1)^2 and test the unit disk.

    s = 0 (both coordinates exactly zero) is rejected like s >= 1 because
    ln(0) is undefined; it is unreachable from the LFSR uniforms in double
    precision but reachable in the binary32 pipeline.
    """
    x1, x2 = _value(u1), _value(u2)
    _check_open_unit("u1", x1)
    _check_open_unit("u2", x2)
    v1 = 2.0 * x1 - 1.0
    v2 = 2.0 * x2 - 1.0
    s = v1 * v1 + v2 * v2
    return PolarDraw(v1=v1, v2=v2, s=s, accepted=0.0 < s < 1.0)


def polar(u1, u2):
    """One polar proposal; returns the Gaussian pair or None on rejection."""
    d = polar_draw(u1, u2)
    if not d.accepted:
        return None
    factor = math.sqrt(-2.0 * math.log(d.s) / d.s)
    return GaussianPair(alpha=d.v1 * factor, beta=d.v2 * factor)


def central_limit(us, config=CltConfig()):
    """Standardized sum of config.k uniforms: (S - k mu) / sqrt(k sigma2)."""
    values = [_value(u) for u in us]
    if len(values) != config.k:
        raise LengthMismatchError(
            f"expected {config.k} uniforms, got {len(values)}"
        )
    for v in values:
        _check_open_unit("u", v)
    total = math.fsum(values)
    return (total - config.k * config.mu) / math.sqrt(config.k * config.sigma2)


# -- batch driver -------------------------------------------------------------


@dataclass
class StreamResult:
    """Batch output plus consumption accounting.

    values is float64 in reference mode and float32 in pipeline mode.
    pairs_proposed / pairs_accepted are populated by the polar algorithm;
    core_counts is populated in pipeline mode (core invocation totals).
    """

    values: np.ndarray
    uniforms_consumed: int
    algorithm: str
    mode: str = "reference"
    pairs_proposed: int = 0
    pairs_accepted: int = 0
    core_counts: Optional[dict] = None


def _box_muller_block(u1, u2):
    r = np.sqrt(-2.0 * np.log(u1))
    theta = _TWO_PI * u2
    out = np.empty(2 * len(u1), dtype=np.float64)
    out[0::2] = r * np.sin(theta)
    out[1::2] = r * np.cos(theta)
    return out


def _polar_block(v1, v2):
    s = v1 * v1 + v2 * v2
    keep = (s > 0.0) & (s < 1.0)
    v1k, v2k, sk = v1[keep], v2[keep], s[keep]
    factor = np.sqrt(-2.0 * np.log(sk) / sk)
    out = np.empty(2 * len(sk), dtype=np.float64)
    out[0::2] = v1k * factor
    out[1::2] = v2k * factor
    return out, int(keep.sum())


def stream(algo, sources, count, *, mode="reference", clt=CltConfig()):
    """Draw exactly `count` Gaussian values from the given uniform sources.

    sources is a list of LfsrState instances owned by this call: two for
    box-muller and polar (feeding u1 and u2), k for clt (one per summand).
    Pair algorithms emit alpha then beta per draw; for odd counts the final
    beta is discarded but its uniforms are still consumed.  Polar advances
    its sources in proposal blocks, so uniforms_consumed can slightly
    exceed the minimum needed to reach `count` outputs.
    """
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
    if count < 0:
        raise ValueError("count must be >= 0")
    if mode == "pipeline":
        from . import fp_pipeline

        return fp_pipeline.pipeline_stream(algo, sources, count, clt=clt)
    if mode != "reference":
        raise ValueError(f"unknown mode {mode!r}")

    if count == 0:
        return StreamResult(values=np.empty(0), uniforms_consumed=0,
                            algorithm=algo, mode=mode)

    if algo == "box-muller":
        if len(sources) != 2:
            raise ValueError("box-muller needs exactly 2 uniform sources")
        pairs = (count + 1) // 2
        out = _box_muller_block(sources[0].uniforms(pairs),
                                sources[1].uniforms(pairs))
        return StreamResult(values=out[:count], uniforms_consumed=2 * pairs,
                            algorithm=algo, mode=mode)

    if algo == "polar":
        if len(sources) != 2:
            raise ValueError("polar needs exactly 2 uniform sources")
        chunks = []
        have = 0
        proposed = accepted = 0
        while have < count:
            need_pairs = (count - have + 1) // 2
            # under-propose slightly (acceptance rate is pi/4 ~ 0.785) so the
            # final top-up blocks stay small and consumption stays near 4/pi
            block = max(256, int(need_pairs / 0.80) + 1)
            v1 = 2.0 * sources[0].uniforms(block) - 1.0
            v2 = 2.0 * sources[1].uniforms(block) - 1.0
            vals, kept = _polar_block(v1, v2)
            proposed += block
            accepted += kept
            chunks.append(vals)
            have += vals.size
        out = np.concatenate(chunks)[:count]
        return StreamResult(values=out, uniforms_consumed=2 * proposed,
                            algorithm=algo, mode=mode,
                            pairs_proposed=proposed, pairs_accepted=accepted)

    # clt
    if len(sources) != clt.k:
        raise LengthMismatchError(
            f"clt with k={clt.k} needs {clt.k} uniform sources, got {len(sources)}"
        )
    total = np.zeros(count, dtype=np.float64)
    for src in sources:
        total += src.uniforms(count)
    z = (total - clt.k * clt.mu) / math.sqrt(clt.k * clt.sigma2)
    return StreamResult(values=z, uniforms_consumed=clt.k * count,
                        algorithm=algo, mode=mode)
