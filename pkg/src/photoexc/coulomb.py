"""Hydrogenic bound states of the residual one-electron ion."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["CoulombOrbital", "laguerre", "radial_value", "excitation_energy"]


def laguerre(degree: int, order: float, x):
    """Generalized Laguerre polynomial L_degree^(order)(x) by forward recurrence."""
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for m in range(degree):
        prev, cur = cur, ((2 * m + 1 + order - x) * cur - (m + order) * prev) / (m + 1)
    return cur


@dataclass(frozen=True)
class CoulombOrbital:
    n: int
    l: int
    Z: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.l < self.n:
            raise ValueError(f"need 0 <= l < n, got n={self.n}, l={self.l}")
        if self.Z <= 0:
            raise ValueError("Z must be positive")

    @property
    def nodes(self) -> int:
        return self.n - self.l - 1

    def __call__(self, r):
        return radial_value(self, r)


def radial_value(orb: CoulombOrbital, r):
    """Normalized radial function R_nl(r), positive near the origin."""
    n, l, Z = orb.n, orb.l, orb.Z
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be non-negative")
    x = 2.0 * Z * r / n
    log_norm = 0.5 * (
        3 * math.log(2.0 * Z / n)
        + math.lgamma(n - l)
        - math.log(2.0 * n)
        - math.lgamma(n + l + 1)
    )
    out = math.exp(log_norm) * np.exp(-0.5 * x) * x**l * laguerre(n - l - 1, 2 * l + 1, x)
    return float(out) if out.ndim == 0 else out


def excitation_energy(n: int, Z: float) -> float:
    """Excitation energy of level n above the 1s ground state of the ion (hartree)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 0.5 * Z**2 * (1.0 - 1.0 / n**2)
