"""Abelian extensions of quandles by Z_m-valued 2-cocycles."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .constructors import gq_uniform
from .magma import MagmaTable, classify, is_isomorphic, orbits

__all__ = [
    "Cocycle2",
    "CocycleError",
    "BudgetError",
    "is_2_cocycle",
    "orbit_indicator_cocycle",
    "extend",
    "Prop213Check",
    "verify_prop_213",
    "PROP213_BUDGET",
]

# largest extension order handed to the isomorphism search
PROP213_BUDGET = 24


class CocycleError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class Cocycle2:
    """A function X x X -> Z_m stored as an n x n table of residues."""

    m: int
    phi: tuple

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("modulus must be at least 2")
        phi = tuple(tuple(int(v) % self.m for v in row) for row in self.phi)
        n = len(phi)
        if n == 0 or any(len(row) != n for row in phi):
            raise ValueError("phi must be a nonempty square table")
        object.__setattr__(self, "phi", phi)

    @property
    def n(self) -> int:
        return len(self.phi)

    @classmethod
    def zero(cls, n: int, m: int) -> "Cocycle2":
        return cls(m, tuple((0,) * n for _ in range(n)))

    @classmethod
    def for_table(cls, t: MagmaTable, m: int, phi) -> "Cocycle2":
        """Build and verify against ``t``; raises CocycleError if invalid."""
        c = cls(m, phi)
        if not is_2_cocycle(t, c):
            raise CocycleError("phi violates the quandle 2-cocycle condition")
        return c

    def __call__(self, x: int, y: int) -> int:
        return self.phi[x][y]

    def __add__(self, other: "Cocycle2") -> "Cocycle2":
        if other.m != self.m or other.n != self.n:
            raise ValueError("cocycles live in different groups")
        return Cocycle2(self.m, tuple(tuple(a + b for a, b in zip(r, s))
                                      for r, s in zip(self.phi, other.phi)))

    def to_json(self) -> dict:
        return {"m": self.m, "phi": [list(r) for r in self.phi]}

    @classmethod
    def from_json(cls, data) -> "Cocycle2":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["m"]), data["phi"])


def is_2_cocycle(t: MagmaTable, c: Cocycle2) -> bool:
    """phi(x,y) + phi(x*y,z) == phi(x,z) + phi(x*z,y*z) and phi(x,x) == 0."""
    if c.n != t.n:
        raise ValueError(f"cocycle on {c.n} elements, table on {t.n}")
    P = np.array(c.phi, dtype=np.int64)
    if np.any(np.diag(P) % c.m):
        return False
    T = t.array
    z = np.arange(t.n)[None, None, :]
    lhs = P[:, :, None] + P[T[:, :, None], z]
    rhs = P[:, None, :] + P[T[:, None, :], T[None, :, :]]
    return bool(np.all((lhs - rhs) % c.m == 0))


def orbit_indicator_cocycle(t: MagmaTable, m: int) -> Cocycle2:
    """phi(a,b) = 0 when a, b share an orbit, 1 otherwise."""
    of = orbits(t).orbit_of
    return Cocycle2(m, tuple(tuple(0 if of[a] == of[b] else 1 for b in range(t.n))
                             for a in range(t.n)))


def extend(t: MagmaTable, c: Cocycle2) -> MagmaTable:
    """The quandle on Z_m x X with (a,x)(b,y) = (a + phi(x,y), x*y).

    The pair (a, x) is stored as element ``x*m + a``, so each fibre over a
    base element is a contiguous block.
    """
    if "quandle" not in classify(t):
        raise CocycleError("extensions are built over quandles")
    if not is_2_cocycle(t, c):
        raise CocycleError("phi violates the quandle 2-cocycle condition")
    m, n = c.m, t.n
    T = t.array
    P = np.array(c.phi, dtype=np.int64)
    x = np.repeat(np.arange(n), m)
    a = np.tile(np.arange(m), n)
    prod_base = T[x[:, None], x[None, :]]
    prod_fibre = (a[:, None] + P[x[:, None], x[None, :]]) % m
    return MagmaTable.from_array(prod_base * m + prod_fibre)


@dataclass(frozen=True)
class Prop213Check:
    sizes: tuple[int, ...]
    m: int
    holds: bool
    witness: tuple[int, ...] | None
    extension_orbit_sizes: tuple[int, ...]
    target_orbit_sizes: tuple[int, ...]

    def __iter__(self):
        yield self.holds
        yield self.witness

    def to_json(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "m": self.m,
            "holds": self.holds,
            "witness": None if self.witness is None else list(self.witness),
            "extension_orbit_sizes": list(self.extension_orbit_sizes),
            "target_orbit_sizes": list(self.target_orbit_sizes),
        }


def verify_prop_213(sizes, m: int, budget: int = PROP213_BUDGET) -> Prop213Check:
    """Compare the orbit-indicator extension of GQ(sizes) with GQ(m*sizes).

    The witness maps extension elements to elements of the target.
    """
    sizes = tuple(int(s) for s in sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive integers")
    if m < 2:
        raise ValueError("modulus must be at least 2")
    if m * sum(sizes) > budget:
        raise BudgetError(f"extension order {m * sum(sizes)} exceeds budget {budget}")
    base = gq_uniform(list(sizes))
    ext = extend(base, orbit_indicator_cocycle(base, m))
    target = gq_uniform([m * s for s in sizes])
    witness = is_isomorphic(ext, target)
    return Prop213Check(sizes, m, witness is not None, witness,
                        tuple(sorted(orbits(ext).sizes)), tuple(sorted(orbits(target).sizes)))
