"""Deterministic counter-based sampling for property suites.

Every check draws from its own Philox stream keyed by ``(seed, name)``, so
adding or reordering checks never perturbs the sample stream another check
sees.  Identical ``SampleSpec`` values therefore reproduce identical
reports regardless of execution order.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class SampleSpec:
    """Budget and provenance of a sample stream.

    count            number of primary samples a check may draw
    seed             64-bit stream seed
    coordinate_range (lo, hi) box for raw coordinates
    dimensions       point dimensions the suite may exercise
    """

    count: int = 10_000
    seed: int = 20260810
    coordinate_range: tuple[float, float] = (-10.0, 10.0)
    dimensions: tuple[int, ...] = (2,)

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError("samples.count", "must be >= 1")
        lo, hi = self.coordinate_range
        if not lo < hi:
            raise ConfigError("samples.range", f"requires lo < hi, got [{lo}, {hi}]")
        if not self.dimensions:
            raise ConfigError("samples.dims", "must list at least one dimension")

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "seed": self.seed,
            "coordinate_range": list(self.coordinate_range),
            "dimensions": list(self.dimensions),
        }


def stream(seed: int, name: str) -> np.random.Generator:
    """Independent deterministic generator for check ``name`` under ``seed``."""
    digest = hashlib.sha256(f"{seed}:{name}".encode("utf-8")).digest()
    key = np.frombuffer(digest[:16], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_box(
    gen: np.random.Generator, count: int, dim: int, lo: float, hi: float
) -> np.ndarray:
    """Uniform points in the box [lo, hi]^dim, shape (count, dim)."""
    return gen.uniform(lo, hi, size=(count, dim))
