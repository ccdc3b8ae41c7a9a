"""Seeded random instance generation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import Configuration, allowed_set


@dataclass(frozen=True)
class GenSpec:
    width: int
    height: int
    allowed: frozenset
    weights: Mapping[int, int]
    seed: int

    def __post_init__(self):
        allowed = allowed_set(self.allowed)
        object.__setattr__(self, "allowed", allowed)
        weights = {int(k): int(v) for k, v in dict(self.weights).items()}
        if any(v < 0 for v in weights.values()):
            raise ValueError("weights must be non-negative")
        stray = [k for k, v in weights.items() if v and k not in allowed]
        if stray:
            raise ValueError(f"weights on values outside the allowed set: {stray}")
        if not any(weights.get(a, 0) for a in allowed):
            raise ValueError("at least one allowed value needs a positive weight")
        if self.width < 1 or self.height < 1:
            raise ValueError("dimensions must be positive")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, width, height, allowed, seed) -> GenSpec:
        allowed = allowed_set(allowed)
        return cls(width, height, allowed, {a: 1 for a in allowed}, seed)


def generate(spec: GenSpec) -> Configuration:
    rng = np.random.default_rng(spec.seed)
    values = sorted(spec.allowed)
    w = np.array([spec.weights.get(a, 0) for a in values], dtype=float)
    cells = rng.choice(values, size=(spec.height, spec.width), p=w / w.sum())
    return Configuration(cells)
