"""Points of Z^d, neighbor enumeration, canonical edges, and deterministic
seed-hashed edge weights.

Vertices store only their nonzero coordinates: a path of length ~log d
touches at most log d coordinates, so memory stays proportional to the
path length even for d up to 10^6.

Edge weights are a pure function of (master_seed, canonical edge): a
splitmix64 fold over the canonical little-endian word sequence

    seed, dim, (index_1, coord_1), ..., (index_k, coord_k), direction

(sorted nonzero coordinates of the low endpoint) produces u in [0, 1),
and the weight is quantile(u).  Certificates citing a seed are therefore
replayable from the seed alone.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

from .distributions import DistributionSpec

SERIALIZATION_VERSION = 1

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def fold_words(seed: int, words) -> int:
    h = mix64((seed & _MASK) ^ _GOLDEN)
    for w in words:
        h = mix64(h ^ (w & _MASK))
    return h


@dataclass(frozen=True)
class Vertex:
    """A point of Z^d; coords maps 1-based index -> nonzero integer."""

    dim: int
    coords: Tuple[Tuple[int, int], ...]   # sorted, no zero entries

    @staticmethod
    def make(dim: int, coords: Optional[Dict[int, int]] = None) -> "Vertex":
        items = tuple(sorted((i, c) for i, c in (coords or {}).items() if c != 0))
        for i, _ in items:
            if not 1 <= i <= dim:
                raise ValueError(f"coordinate index {i} outside [1, {dim}]")
        return Vertex(dim, items)

    @staticmethod
    def origin(dim: int) -> "Vertex":
        return Vertex(dim, ())

    def coord(self, i: int) -> int:
        for j, c in self.coords:
            if j == i:
                return c
        return 0

    def shift(self, i: int, step: int) -> "Vertex":
        d = dict(self.coords)
        d[i] = d.get(i, 0) + step
        if d[i] == 0:
            del d[i]
        return Vertex(self.dim, tuple(sorted(d.items())))

    def coord_sum(self) -> int:
        return sum(c for _, c in self.coords)

    def to_bytes(self) -> bytes:
        parts = [struct.pack("<BIH", SERIALIZATION_VERSION, self.dim, len(self.coords))]
        for i, c in self.coords:
            parts.append(struct.pack("<Ii", i, c))
        return b"".join(parts)

    @staticmethod
    def from_bytes(data: bytes) -> "Vertex":
        ver, dim, k = struct.unpack_from("<BIH", data, 0)
        if ver != SERIALIZATION_VERSION:
            raise ValueError(f"unknown serialization version {ver}")
        off = struct.calcsize("<BIH")
        coords = []
        for _ in range(k):
            i, c = struct.unpack_from("<Ii", data, off)
            off += struct.calcsize("<Ii")
            coords.append((i, c))
        return Vertex(dim, tuple(coords))


@dataclass(frozen=True)
class EdgeKey:
    """Canonical undirected nearest-neighbor edge <lo, lo + e_direction>.

    Of the two endpoints, ``endpoint_lo`` has the smaller coordinate in
    ``direction``, so both orientations map to the same key.
    """

    endpoint_lo: Vertex
    direction: int

    @staticmethod
    def from_step(v: Vertex, direction: int, step: int) -> "EdgeKey":
        if step == 1:
            return EdgeKey(v, direction)
        if step == -1:
            return EdgeKey(v.shift(direction, -1), direction)
        raise ValueError("step must be +-1")

    def endpoints(self) -> Tuple[Vertex, Vertex]:
        return self.endpoint_lo, self.endpoint_lo.shift(self.direction, 1)

    def to_bytes(self) -> bytes:
        return self.endpoint_lo.to_bytes() + struct.pack("<I", self.direction)

    def words(self) -> Tuple[int, ...]:
        out = [self.endpoint_lo.dim]
        for i, c in self.endpoint_lo.coords:
            out.append(i)
            out.append(c)
        out.append(self.direction << 32)
        return tuple(out)


@dataclass(frozen=True)
class Restriction:
    """Which moves out of a vertex are permitted."""

    mode: str = "none"   # none | positive_directions_only | fixed_coordinate | coordinate_window
    index: int = 0
    lo: int = 0
    hi: int = 0

    def __post_init__(self):
        if self.mode == "coordinate_window" and self.lo > self.hi:
            raise ValueError("window lo > hi")

    def allows(self, v: Vertex, direction: int, step: int) -> bool:
        if self.mode == "none":
            return True
        if self.mode == "positive_directions_only":
            return step == 1
        if self.mode == "fixed_coordinate":
            return direction != self.index
        if self.mode == "coordinate_window":
            if direction != self.index:
                return True
            return self.lo <= v.coord(direction) + step <= self.hi
        raise ValueError(f"unknown restriction mode {self.mode}")


NO_RESTRICTION = Restriction()


def fixed_coordinate(index: int, value: int) -> Restriction:
    # searches start inside the plane; the restriction just forbids leaving it
    return Restriction(mode="fixed_coordinate", index=index, lo=value, hi=value)


def positive_directions_only() -> Restriction:
    return Restriction(mode="positive_directions_only")


def coordinate_window(index: int, lo: int, hi: int) -> Restriction:
    return Restriction(mode="coordinate_window", index=index, lo=lo, hi=hi)


def neighbors(v: Vertex, restriction: Restriction = NO_RESTRICTION) -> Iterator[Tuple[Vertex, EdgeKey]]:
    """Nearest neighbors of v permitted by the restriction, with canonical
    edge keys; 2d of them when unrestricted."""
    for i in range(1, v.dim + 1):
        for step in (1, -1):
            if restriction.allows(v, i, step):
                yield v.shift(i, step), EdgeKey.from_step(v, i, step)


def edge_uniform(key: EdgeKey, master_seed: int) -> float:
    """The u in [0, 1) behind the edge weight."""
    return fold_words(master_seed, key.words()) / 2.0 ** 64


def edge_weight(key: EdgeKey, master_seed: int, spec: DistributionSpec) -> float:
    """Deterministic weight of a canonical edge under (seed, law)."""
    return spec.quantile(edge_uniform(key, master_seed))


def derive_seed(master_seed: int, index: int) -> int:
    """Replica seed stream: extendable without re-running earlier replicas."""
    return fold_words(master_seed, (0x5EED, index))
