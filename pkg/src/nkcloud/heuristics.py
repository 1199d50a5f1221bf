"""Local-search heuristics over NK landscapes.

Five step rules share one interface: blind random walk, myopic hill
climbing (always move to the fittest one-bit neighbor), simulated
annealing at fixed temperature, simulated annealing under a geometric
cooling schedule, and neutral hill climbing (greedy step if strictly
improving, otherwise a uniform redraw inside the current fitness bin).

Scalar steps operate on single genotypes and power :func:`run_heuristic`
trajectories; the ``*_population`` functions advance a whole index array
one generation with identical dynamics and are what the cloud builders
use.  Population engines draw whole-population vectors from a single
PCG64 stream in a fixed order, so results do not depend on how work is
threaded.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .binning import DEFAULT_BIN_WIDTH, bin_indices, n_bins
from .errors import ParameterError
from .landscape import Genotype, NkLandscape

TEMPERATURE_FLOOR = 0.01


class HeuristicKind(str, Enum):
    RANDOM_WALK = "random-walk"
    MHC = "mhc"
    SA_FIXED = "sa"
    SA_COOLING = "sa-cooling"
    NHC = "nhc"


@dataclass(frozen=True)
class CoolingSchedule:
    """Geometric temperature ladder with a hard floor.

    The temperature starts at ``t_start``, multiplies by ``t_factor`` once
    per epoch of ``epoch_length`` generations, and never drops below
    ``TEMPERATURE_FLOOR``.
    """

    t_start: float = 0.10
    t_factor: float = 0.95
    epoch_length: int = 50
    total_generations: int = 2450

    def __post_init__(self) -> None:
        if self.t_start <= 0.0:
            raise ParameterError(f"t_start must be > 0, got {self.t_start}")
        if not 0.0 < self.t_factor < 1.0:
            raise ParameterError(f"t_factor must be in (0, 1), got {self.t_factor}")
        if self.epoch_length < 1:
            raise ParameterError(f"epoch_length must be >= 1, got {self.epoch_length}")
        if self.total_generations < 1:
            raise ParameterError(
                f"total_generations must be >= 1, got {self.total_generations}")

    def temperature_at(self, generation: int) -> float:
        if not 0 <= generation < self.total_generations:
            raise ParameterError(
                f"generation {generation} outside [0, {self.total_generations})")
        epoch = generation // self.epoch_length
        return max(TEMPERATURE_FLOOR, self.t_start * self.t_factor ** epoch)

    def describe(self) -> dict:
        return {
            "t_start": self.t_start,
            "t_factor": self.t_factor,
            "epoch_length": self.epoch_length,
            "total_generations": self.total_generations,
        }


def temperature_at(cooling: CoolingSchedule, generation: int) -> float:
    """Temperature in effect for the step leaving ``generation``."""
    return cooling.temperature_at(generation)


@dataclass(frozen=True)
class HeuristicSpec:
    """Which step rule to run, plus its knobs and RNG seed."""

    kind: HeuristicKind
    temperature: float | None = None
    cooling: CoolingSchedule | None = None
    rng_seed: int = 0

    def __post_init__(self) -> None:
        kind = HeuristicKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is HeuristicKind.SA_FIXED:
            if self.temperature is None or self.temperature <= 0.0:
                raise ParameterError(
                    f"fixed-temperature annealing requires temperature > 0, got {self.temperature}")
        elif self.temperature is not None:
            raise ParameterError(f"temperature is only meaningful for kind={HeuristicKind.SA_FIXED.value}")
        if kind is HeuristicKind.SA_COOLING:
            if self.cooling is None:
                object.__setattr__(self, "cooling", CoolingSchedule())
        elif self.cooling is not None:
            raise ParameterError(f"cooling is only meaningful for kind={HeuristicKind.SA_COOLING.value}")
        if not isinstance(self.rng_seed, int) or self.rng_seed < 0:
            raise ParameterError(f"rng_seed must be a non-negative int, got {self.rng_seed!r}")

    def describe(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.temperature is not None:
            out["temperature"] = self.temperature
        if self.cooling is not None:
            out["cooling"] = self.cooling.describe()
        if self.kind is not HeuristicKind.MHC:
            out["rng_seed"] = self.rng_seed
        return out


def hamming_neighbors(g: Genotype) -> list[Genotype]:
    """All one-bit flips of ``g``, in ascending locus order."""
    return [Genotype(g.n, g.index ^ (1 << i)) for i in range(g.n)]


def random_walk_step(landscape: NkLandscape, g: Genotype, rng: np.random.Generator) -> Genotype:
    """Flip one locus chosen uniformly; fitness plays no role."""
    locus = int(rng.integers(landscape.n))
    return Genotype(g.n, g.index ^ (1 << locus))


def mhc_step(landscape: NkLandscape, g: Genotype) -> Genotype:
    """Move to the fittest one-bit neighbor, ties to the lowest locus.

    Deterministic, and never returns the input: at a strict local optimum
    the step still moves, to the least-bad neighbor.
    """
    best = None
    best_fit = -math.inf
    for i in range(landscape.n):
        nb = Genotype(g.n, g.index ^ (1 << i))
        f = landscape.fitness(nb)
        if f > best_fit:
            best, best_fit = nb, f
    return best


def sa_step(landscape: NkLandscape, g: Genotype, temperature: float,
            rng: np.random.Generator) -> Genotype:
    """Metropolis step: one uniform neighbor proposed per generation.

    Improvements are always taken; a fitness drop of ``d`` is taken with
    probability exp(d / temperature), so a zero drop is always taken too.
    """
    if temperature <= 0.0:
        raise ParameterError(f"temperature must be > 0, got {temperature}")
    locus = int(rng.integers(landscape.n))
    cand = Genotype(g.n, g.index ^ (1 << locus))
    delta = landscape.fitness(cand) - landscape.fitness(g)
    if delta > 0.0:
        return cand
    if rng.random() < math.exp(delta / temperature):
        return cand
    return g


class NeutralPartition:
    """Genotype indices grouped by fitness bin, for uniform same-bin draws.

    Built once from an enumerated fitness table; bin membership uses the
    same floor rule as the cloud summaries, so a genotype's neutral set is
    exactly the other occupants of its cloud bin (itself included).
    """

    def __init__(self, fitness_table: np.ndarray, bin_width: float = DEFAULT_BIN_WIDTH):
        fitness_table = np.asarray(fitness_table, dtype=np.float64)
        if fitness_table.ndim != 1 or fitness_table.size < 1:
            raise ParameterError("fitness table must be a non-empty 1-d array")
        n = int(fitness_table.size).bit_length() - 1
        if (1 << n) != fitness_table.size:
            raise ParameterError(f"fitness table size {fitness_table.size} is not a power of two")
        self.n = n
        self.bin_width = float(bin_width)
        self.bin_of = bin_indices(fitness_table, bin_width).astype(np.int32)
        counts = np.bincount(self.bin_of, minlength=n_bins(bin_width))
        self.counts = counts.astype(np.int64)
        self.offsets = np.concatenate(([0], np.cumsum(self.counts)))
        self.order = np.argsort(self.bin_of, kind="stable").astype(np.int64)

    def bin_members(self, bin_index: int) -> np.ndarray:
        return self.order[self.offsets[bin_index]:self.offsets[bin_index + 1]]

    def sample_same_bin(self, genotype_index: int, rng: np.random.Generator) -> int:
        """Uniform draw from the occupant's bin; the occupant itself is admissible."""
        b = int(self.bin_of[genotype_index])
        lo = int(self.offsets[b])
        return int(self.order[lo + int(rng.integers(self.counts[b]))])

    def sample_same_bin_population(self, indices: np.ndarray,
                                   rng: np.random.Generator) -> np.ndarray:
        b = self.bin_of[indices]
        r = rng.integers(0, self.counts[b])
        return self.order[self.offsets[b] + r]


def build_neutral_partition(fitness_table: np.ndarray,
                            bin_width: float = DEFAULT_BIN_WIDTH) -> NeutralPartition:
    return NeutralPartition(fitness_table, bin_width)


def nop_step(partition: NeutralPartition, g: Genotype, rng: np.random.Generator) -> Genotype:
    """Uniform redraw within the current fitness bin (may return ``g``)."""
    if g.n != partition.n:
        raise ParameterError(f"genotype length {g.n} does not match partition n={partition.n}")
    return Genotype(g.n, partition.sample_same_bin(g.index, rng))


def nhc_step(landscape: NkLandscape, partition: NeutralPartition, g: Genotype,
             rng: np.random.Generator) -> Genotype:
    """Greedy step if it strictly improves fitness, else a neutral redraw."""
    cand = mhc_step(landscape, g)
    if landscape.fitness(cand) > landscape.fitness(g):
        return cand
    return nop_step(partition, g, rng)


@dataclass(frozen=True)
class Trajectory:
    """States visited by one run, position t = state after t generations."""

    n: int
    genotypes: list[int]
    fitnesses: list[float]

    def __len__(self) -> int:
        return len(self.genotypes)


def run_heuristic(landscape: NkLandscape, spec: HeuristicSpec, g0: Genotype,
                  generations: int, partition: NeutralPartition | None = None) -> Trajectory:
    """Run one walker, recording every state including the start.

    The stream is seeded from (spec.rng_seed, g0.index), so each starting
    genotype replays independently of any other run.  Neutral hill
    climbing enumerates the landscape to build its partition unless one is
    passed in.
    """
    if generations < 0:
        raise ParameterError(f"generations must be >= 0, got {generations}")
    if g0.n != landscape.n:
        raise ParameterError(f"genotype length {g0.n} does not match n={landscape.n}")
    if spec.kind is HeuristicKind.SA_COOLING and generations > spec.cooling.total_generations:
        raise ParameterError(
            f"generations {generations} exceeds the cooling schedule's "
            f"{spec.cooling.total_generations}")
    if spec.kind is HeuristicKind.NHC and partition is None:
        partition = NeutralPartition(landscape.enumerate_fitness())
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([spec.rng_seed, g0.index])))
    cur = g0
    genotypes = [g0.index]
    fitnesses = [landscape.fitness(g0)]
    for t in range(generations):
        if spec.kind is HeuristicKind.RANDOM_WALK:
            cur = random_walk_step(landscape, cur, rng)
        elif spec.kind is HeuristicKind.MHC:
            cur = mhc_step(landscape, cur)
        elif spec.kind is HeuristicKind.SA_FIXED:
            cur = sa_step(landscape, cur, spec.temperature, rng)
        elif spec.kind is HeuristicKind.SA_COOLING:
            cur = sa_step(landscape, cur, spec.cooling.temperature_at(t), rng)
        else:
            cur = nhc_step(landscape, partition, cur, rng)
        genotypes.append(cur.index)
        fitnesses.append(landscape.fitness(cur))
    return Trajectory(landscape.n, genotypes, fitnesses)


def write_trajectory_csv(trajectory: Trajectory, spec: HeuristicSpec, destination) -> None:
    """One row per state; the temperature column holds the temperature used
    to reach that state (blank for row 0 and for non-annealing kinds)."""
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["generation", "genotype_index", "fitness", "temperature"])
        for t, (g, f) in enumerate(zip(trajectory.genotypes, trajectory.fitnesses)):
            if t == 0:
                temp = ""
            elif spec.kind is HeuristicKind.SA_FIXED:
                temp = repr(spec.temperature)
            elif spec.kind is HeuristicKind.SA_COOLING:
                temp = repr(spec.cooling.temperature_at(t - 1))
            else:
                temp = ""
            writer.writerow([t, g, repr(float(f)), temp])


def mhc_successor_table(fitness_table: np.ndarray, n: int) -> np.ndarray:
    """Greedy successor of every genotype; ties resolve to the lowest locus."""
    size = 1 << n
    if np.asarray(fitness_table).shape != (size,):
        raise ParameterError(f"fitness table shape does not match n={n}")
    succ = np.empty(size, dtype=np.int64)
    chunk = 1 << 22
    for start in range(0, size, chunk):
        u = np.arange(start, min(start + chunk, size), dtype=np.int64)
        best = u ^ 1
        best_fit = fitness_table[best]
        for i in range(1, n):
            cand = u ^ (1 << i)
            cf = fitness_table[cand]
            better = cf > best_fit
            best[better] = cand[better]
            best_fit[better] = cf[better]
        succ[start:start + u.size] = best
    return succ


def random_walk_population(indices: np.ndarray, n: int,
                           rng: np.random.Generator) -> np.ndarray:
    loci = rng.integers(0, n, size=indices.size)
    return indices ^ (np.int64(1) << loci)


def sa_population(indices: np.ndarray, fitness_table: np.ndarray, n: int,
                  temperature: float, rng: np.random.Generator) -> np.ndarray:
    """One annealing generation for every walker; two draws per walker."""
    if temperature <= 0.0:
        raise ParameterError(f"temperature must be > 0, got {temperature}")
    loci = rng.integers(0, n, size=indices.size)
    prop = indices ^ (np.int64(1) << loci)
    delta = fitness_table[prop] - fitness_table[indices]
    u = rng.random(indices.size)
    accept = u < np.exp(np.minimum(delta, 0.0) / temperature)
    return np.where(accept, prop, indices)


def nhc_population(indices: np.ndarray, fitness_table: np.ndarray,
                   successor: np.ndarray, partition: NeutralPartition,
                   rng: np.random.Generator) -> np.ndarray:
    """One neutral-hill-climbing generation; neutral draws are consumed for
    every walker so the stream layout is independent of who improves."""
    cand = successor[indices]
    neutral = partition.sample_same_bin_population(indices, rng)
    improving = fitness_table[cand] > fitness_table[indices]
    return np.where(improving, cand, neutral)
