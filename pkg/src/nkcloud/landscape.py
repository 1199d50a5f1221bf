"""Random-neighborhood NK landscapes: construction, evaluation, enumeration.

An instance is fully determined by ``(n, k, seed)``.  Each locus i draws k
epistatic links uniformly without replacement from the other n-1 loci, and
owns a contribution table of 2**(k+1) independent uniforms on [0, 1).  The
fitness of a genotype is the mean of the n table lookups, so it always lies
in [0, 1).

Genotypes are addressed by integer index with locus 0 in the least
significant bit.  A locus's table is indexed with its own bit in position 0
and the bits of its linked loci, in link-list order, in positions 1..k.

Randomness comes from PCG64 streams split with SeedSequence: child stream 0
drives the link draws for every locus in locus order (each link list built
by partial Fisher-Yates over the other loci), and child stream 1 + i fills
locus i's table.  Reconstruction from the same (n, k, seed) is therefore
bit-for-bit reproducible, and instances can be persisted to JSON and
reloaded with full precision.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CapacityError, DataError, ParameterError

LANDSCAPE_FORMAT_VERSION = 1

# Exhaustive features (enumeration, clouds, partitions) refuse larger n.
ENUMERATION_MAX_N = 25

_CHUNK = 1 << 22
_MAX_SEED = (1 << 64) - 1


@dataclass(frozen=True)
class Genotype:
    """A binary string of length ``n`` addressed by its integer index."""

    n: int
    index: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ParameterError(f"genotype length must be a positive int, got {self.n!r}")
        if not isinstance(self.index, int) or not 0 <= self.index < (1 << self.n):
            raise ParameterError(f"genotype index {self.index!r} out of range for n={self.n}")

    @classmethod
    def from_bits(cls, bits) -> "Genotype":
        """Build from a 0/1 sequence, element i giving the bit of locus i."""
        arr = np.asarray(bits, dtype=np.int64)
        if arr.ndim != 1 or arr.size < 1:
            raise ParameterError("bits must be a non-empty 1-d sequence")
        if np.any((arr != 0) & (arr != 1)):
            raise ParameterError("bits must contain only 0 and 1")
        index = int(np.sum(arr << np.arange(arr.size, dtype=np.int64)))
        return cls(int(arr.size), index)

    @property
    def bits(self) -> np.ndarray:
        """Bit of each locus, element i for locus i."""
        return ((self.index >> np.arange(self.n)) & 1).astype(np.uint8)

    def flip(self, locus: int) -> "Genotype":
        if not 0 <= locus < self.n:
            raise ParameterError(f"locus {locus} out of range for n={self.n}")
        return Genotype(self.n, self.index ^ (1 << locus))


@dataclass(eq=False)
class NkLandscape:
    """An NK instance: per-locus link lists plus contribution tables.

    Immutable after construction; the arrays are marked read-only so a
    single instance can be shared freely across threads.
    """

    n: int
    k: int
    links: np.ndarray = field(repr=False)
    tables: np.ndarray = field(repr=False)
    seed: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ParameterError(f"n must be a positive int, got {self.n!r}")
        if not isinstance(self.k, int) or not 0 <= self.k <= self.n - 1:
            raise ParameterError(f"k must satisfy 0 <= k <= n-1, got k={self.k!r} for n={self.n}")
        links = np.ascontiguousarray(np.asarray(self.links, dtype=np.int64))
        tables = np.ascontiguousarray(np.asarray(self.tables, dtype=np.float64))
        if links.shape != (self.n, self.k):
            raise ParameterError(
                f"links shape {links.shape} does not match (n, k)=({self.n}, {self.k})")
        width = 1 << (self.k + 1)
        if tables.ndim != 2 or tables.shape[0] != self.n:
            raise ParameterError(f"tables shape {tables.shape} does not match n={self.n}")
        for i in range(self.n):
            row = links[i]
            if np.any((row < 0) | (row >= self.n)):
                raise ParameterError(f"locus {i} has a link outside [0, n)")
            if np.any(row == i):
                raise ParameterError(f"locus {i} links to itself")
            if np.unique(row).size != self.k:
                raise ParameterError(f"locus {i} has duplicate links")
            if tables.shape[1] != width:
                raise ParameterError(
                    f"locus {i} table has {tables.shape[1]} entries, expected {width}")
            if not np.all(np.isfinite(tables[i])):
                raise ParameterError(f"locus {i} table has non-finite entries")
            if tables[i].min() < 0.0 or tables[i].max() >= 1.0:
                raise ParameterError(f"locus {i} table has entries outside [0, 1)")
        links.setflags(write=False)
        tables.setflags(write=False)
        object.__setattr__(self, "links", links)
        object.__setattr__(self, "tables", tables)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NkLandscape):
            return NotImplemented
        return (self.n == other.n and self.k == other.k
                and np.array_equal(self.links, other.links)
                and np.array_equal(self.tables, other.tables))

    def contribution_index(self, g: Genotype, locus: int) -> int:
        """Table index for ``locus``: own bit in position 0, links in 1..k."""
        t = (g.index >> locus) & 1
        row = self.links[locus]
        for j in range(self.k):
            t |= ((g.index >> int(row[j])) & 1) << (j + 1)
        return t

    def fitness(self, g: Genotype) -> float:
        """Mean of the n locus contributions; always in [0, 1)."""
        if g.n != self.n:
            raise ParameterError(f"genotype length {g.n} does not match n={self.n}")
        total = 0.0
        for i in range(self.n):
            total += self.tables[i, self.contribution_index(g, i)]
        return total / self.n

    def enumerate_fitness(self, workers: int = 1) -> np.ndarray:
        """Fitness of every genotype, indexed by genotype integer.

        Accumulates contributions in the same locus order as :meth:`fitness`,
        so both paths agree bit for bit.  Callers take ``.max()`` for the
        instance's global optimum.  Refuses n above ``ENUMERATION_MAX_N``.
        """
        if self.n > ENUMERATION_MAX_N:
            raise CapacityError(
                f"exhaustive enumeration supports n <= {ENUMERATION_MAX_N}, got n={self.n}")
        if workers < 1:
            raise ParameterError(f"workers must be >= 1, got {workers}")
        size = 1 << self.n
        out = np.empty(size, dtype=np.float64)

        def fill(start: int, stop: int) -> None:
            u = np.arange(start, stop, dtype=np.int64)
            acc = np.zeros(stop - start, dtype=np.float64)
            for i in range(self.n):
                t = (u >> i) & 1
                for j in range(self.k):
                    t |= ((u >> int(self.links[i, j])) & 1) << (j + 1)
                acc += self.tables[i, t]
            out[start:stop] = acc / self.n

        spans = [(s, min(s + _CHUNK, size)) for s in range(0, size, _CHUNK)]
        if workers == 1 or len(spans) == 1:
            for s, e in spans:
                fill(s, e)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(lambda span: fill(*span), spans))
        return out


def generate_landscape(n: int, k: int, seed: int) -> NkLandscape:
    """Draw a fresh instance; identical (n, k, seed) gives identical arrays."""
    if not isinstance(n, int) or n < 2:
        raise ParameterError(f"n must be an int >= 2, got {n!r}")
    if not isinstance(k, int) or not 0 <= k <= n - 1:
        raise ParameterError(f"k must satisfy 0 <= k <= n-1, got {k!r}")
    if not isinstance(seed, int) or not 0 <= seed <= _MAX_SEED:
        raise ParameterError(f"seed must be an unsigned 64-bit int, got {seed!r}")
    streams = np.random.SeedSequence(seed).spawn(n + 1)
    link_rng = np.random.Generator(np.random.PCG64(streams[0]))
    links = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        pool = [j for j in range(n) if j != i]
        for j in range(k):
            pos = int(link_rng.integers(len(pool)))
            links[i, j] = pool.pop(pos)
    tables = np.empty((n, 1 << (k + 1)), dtype=np.float64)
    for i in range(n):
        rng = np.random.Generator(np.random.PCG64(streams[1 + i]))
        tables[i] = rng.random(1 << (k + 1))
    return NkLandscape(n, k, links, tables, seed)


def save_landscape(landscape: NkLandscape, destination) -> None:
    """Persist to JSON with full float precision; output bytes are stable."""
    payload = {
        "format_version": LANDSCAPE_FORMAT_VERSION,
        "n": landscape.n,
        "k": landscape.k,
        "seed": landscape.seed,
        "links": landscape.links.tolist(),
        "tables": landscape.tables.tolist(),
    }
    with open(destination, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, separators=(",", ":"))
        fh.write("\n")


def load_landscape(source) -> NkLandscape:
    """Load a persisted instance; malformed files name the offending part."""
    path = Path(source)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise DataError(f"{path}: top level must be an object")
    for key in ("format_version", "n", "k", "links", "tables"):
        if key not in payload:
            raise DataError(f"{path}: missing field {key!r}")
    if payload["format_version"] != LANDSCAPE_FORMAT_VERSION:
        raise DataError(f"{path}: unsupported format_version {payload['format_version']!r}")
    seed = payload.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise DataError(f"{path}: seed must be an integer or null")
    n, k = payload["n"], payload["k"]
    if not isinstance(n, int) or not isinstance(k, int):
        raise DataError(f"{path}: n and k must be integers")
    links, tables = payload["links"], payload["tables"]
    if not isinstance(links, list) or len(links) != n:
        raise DataError(f"{path}: links must list all {n} loci")
    if not isinstance(tables, list) or len(tables) != n:
        raise DataError(f"{path}: tables must list all {n} loci")
    width = 1 << (k + 1) if isinstance(k, int) and k >= 0 else 0
    for i in range(n):
        if not isinstance(links[i], list):
            raise DataError(f"{path}: locus {i} links must be a list")
        if len(links[i]) != k:
            raise DataError(f"{path}: locus {i} has {len(links[i])} links, expected {k}")
        if not isinstance(tables[i], list):
            raise DataError(f"{path}: locus {i} table must be a list")
        if len(tables[i]) != width:
            raise DataError(
                f"{path}: locus {i} table has {len(tables[i])} entries, expected {width}")
    try:
        return NkLandscape(n, k, np.asarray(links), np.asarray(tables), seed)
    except ParameterError as exc:
        raise DataError(f"{path}: {exc}") from exc
