"""Integration budgets and results shared by the geometry and measure layers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Budget", "IntegrationResult", "shard_generators"]


@dataclass(frozen=True)
class Budget:
    """How to integrate: ``exact`` or ``monte_carlo`` with a sample count and seed."""

    method: str = "exact"
    samples: int = 0
    seed: int = 0
    shards: int = 1

    def __post_init__(self):
        if self.method not in ("exact", "monte_carlo"):
            raise ValueError(f"unknown budget method {self.method!r}")
        if self.method == "monte_carlo" and (self.samples < 1 or self.shards < 1):
            raise ValueError("Monte Carlo budgets need samples >= 1 and shards >= 1")

    @classmethod
    def exact(cls) -> "Budget":
        return cls("exact")

    @classmethod
    def monte_carlo(cls, samples: int, seed: int = 0, shards: int = 1) -> "Budget":
        return cls("monte_carlo", int(samples), int(seed), int(shards))

    @property
    def is_exact(self) -> bool:
        return self.method == "exact"

    def reseeded(self, seed: int) -> "Budget":
        return Budget(self.method, self.samples, seed, self.shards)


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    stderr: float = 0.0
    samples_used: int = 0
    degenerate: bool = False

    @property
    def exact(self) -> bool:
        return self.stderr == 0.0 and self.samples_used == 0

    def scaled(self, c: float) -> "IntegrationResult":
        return IntegrationResult(c * self.value, abs(c) * self.stderr, self.samples_used,
                                 self.degenerate)

    def __add__(self, other: "IntegrationResult") -> "IntegrationResult":
        return IntegrationResult(self.value + other.value,
                                 math.hypot(self.stderr, other.stderr),
                                 self.samples_used + other.samples_used)


def shard_generators(budget: Budget):
    """Yield ``(generator, n_samples)`` per shard; deterministic in ``(seed, shards)``."""
    children = np.random.SeedSequence(budget.seed).spawn(budget.shards)
    base, extra = divmod(budget.samples, budget.shards)
    for i, child in enumerate(children):
        yield np.random.default_rng(child), base + (1 if i < extra else 0)
