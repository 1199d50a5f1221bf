"""Offspring fitness clouds and bottleneck-level estimation.

A fitness cloud pairs every genotype's fitness (abscissa) with the fitness
of a one-step offspring under some heuristic (ordinate); the limit variant
pairs it with the fitness reached after running the heuristic for a fixed
number of generations.  Both are summarized per parent-fitness bin:
ordinate min, max, mean, standard deviation, and occupancy.

The mean curve of a one-step cloud crosses the diagonal at the bottleneck
level beta: parents below it gain fitness on average, parents above it
lose.  The limit-cloud mean evaluated there (or its flat region, when the
mean hugs the diagonal instead of crossing) gives beta_star, the fitness
the heuristic actually attains from typical starts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .binning import DEFAULT_BIN_WIDTH, bin_center, bin_indices, n_bins
from .errors import DataError, ParameterError
from .heuristics import (
    HeuristicKind,
    HeuristicSpec,
    NeutralPartition,
    mhc_successor_table,
    nhc_population,
    random_walk_population,
    sa_population,
)
from .landscape import NkLandscape

LOW_CONFIDENCE_MIN_COUNT = 5

# Limit clouds run this many generations unless told otherwise (annealing
# under a cooling schedule runs the schedule's full length instead, and
# fixed-temperature annealing runs to equilibrium).
DEFAULT_LIMIT_GENERATIONS = 50

# Fixed-temperature equilibrium: stop once successive 50-generation windows
# of the population mean fitness agree to 1e-4, or at the hard cap.
SA_EQUILIBRIUM_WINDOW = 50
SA_EQUILIBRIUM_TOL = 1e-4
SA_EQUILIBRIUM_MAX_GENERATIONS = 5000

_SPAN = 1 << 22


@dataclass(frozen=True)
class CloudBin:
    center: float
    f_min: float
    f_max: float
    f_mean: float
    f_std: float
    count: int
    low_confidence: bool


@dataclass(frozen=True)
class CloudSummary:
    """Per-bin cloud statistics; ``kind`` is "FC" or "FCStar"."""

    kind: str
    bin_width: float
    heuristic: dict
    bins: tuple[CloudBin, ...]
    generations: int | None = None

    def usable_bins(self) -> list[CloudBin]:
        return [b for b in self.bins if not b.low_confidence]

    def total_count(self) -> int:
        return sum(b.count for b in self.bins)


class _BinAccumulator:
    """Two-pass per-bin moments: add() everything, then add_sq() everything.

    The second pass accumulates squared deviations from the finalized bin
    means, so degenerate bins report a standard deviation of exactly zero
    instead of cancellation noise.
    """

    def __init__(self, nb: int):
        self.nb = nb
        self.count = np.zeros(nb, dtype=np.int64)
        self.total = np.zeros(nb, dtype=np.float64)
        self.vmin = np.full(nb, np.inf)
        self.vmax = np.full(nb, -np.inf)
        self.sqdev = np.zeros(nb, dtype=np.float64)
        self.mean: np.ndarray | None = None

    def add(self, bins: np.ndarray, values: np.ndarray) -> None:
        self.count += np.bincount(bins, minlength=self.nb)
        self.total += np.bincount(bins, weights=values, minlength=self.nb)
        np.minimum.at(self.vmin, bins, values)
        np.maximum.at(self.vmax, bins, values)

    def finalize_means(self) -> None:
        safe = np.maximum(self.count, 1)
        self.mean = self.total / safe

    def add_sq(self, bins: np.ndarray, values: np.ndarray) -> None:
        dev = values - self.mean[bins]
        self.sqdev += np.bincount(bins, weights=dev * dev, minlength=self.nb)

    def summary(self, kind: str, heuristic: dict, bin_width: float,
                generations: int | None) -> CloudSummary:
        out = []
        for b in np.flatnonzero(self.count):
            c = int(self.count[b])
            std = float(np.sqrt(self.sqdev[b] / c))
            out.append(CloudBin(
                center=bin_center(int(b), bin_width),
                f_min=float(self.vmin[b]),
                f_max=float(self.vmax[b]),
                f_mean=float(self.mean[b]),
                f_std=std,
                count=c,
                low_confidence=c < LOW_CONFIDENCE_MIN_COUNT,
            ))
        return CloudSummary(kind=kind, bin_width=bin_width, heuristic=heuristic,
                            bins=tuple(out), generations=generations)


def _enumerated(landscape: NkLandscape, fitness_table, workers: int = 1) -> np.ndarray:
    if fitness_table is None:
        return landscape.enumerate_fitness(workers=workers)
    fit = np.asarray(fitness_table, dtype=np.float64)
    if fit.shape != (1 << landscape.n,):
        raise ParameterError(
            f"fitness table shape {fit.shape} does not match n={landscape.n}")
    return fit


def build_hamming_cloud(landscape: NkLandscape, bin_width: float = DEFAULT_BIN_WIDTH,
                        fitness_table=None, return_raw: bool = False,
                        workers: int = 1):
    """Exhaustive one-mutant cloud: every genotype against all n neighbors."""
    fit = _enumerated(landscape, fitness_table, workers)
    n, size = landscape.n, fit.size
    bins_all = bin_indices(fit, bin_width)
    acc = _BinAccumulator(n_bins(bin_width))
    spans = [(s, min(s + _SPAN, size)) for s in range(0, size, _SPAN)]

    def neighbor_fit(s: int, e: int, i: int) -> np.ndarray:
        return fit[np.arange(s, e, dtype=np.int64) ^ (1 << i)]

    for s, e in spans:
        for i in range(n):
            acc.add(bins_all[s:e], neighbor_fit(s, e, i))
    acc.finalize_means()
    raw_parent, raw_off = [], []
    for s, e in spans:
        for i in range(n):
            off = neighbor_fit(s, e, i)
            acc.add_sq(bins_all[s:e], off)
            if return_raw:
                raw_parent.append(fit[s:e])
                raw_off.append(off)
    summary = acc.summary("FC", {"kind": "hamming"}, bin_width, None)
    if return_raw:
        return summary, (np.concatenate(raw_parent), np.concatenate(raw_off))
    return summary


def _one_step(spec: HeuristicSpec, indices: np.ndarray, fit: np.ndarray, n: int,
              succ, partition, rng: np.random.Generator) -> np.ndarray:
    if spec.kind is HeuristicKind.RANDOM_WALK:
        return random_walk_population(indices, n, rng)
    if spec.kind is HeuristicKind.MHC:
        return succ[indices]
    if spec.kind is HeuristicKind.SA_FIXED:
        return sa_population(indices, fit, n, spec.temperature, rng)
    if spec.kind is HeuristicKind.SA_COOLING:
        return sa_population(indices, fit, n, spec.cooling.temperature_at(0), rng)
    return nhc_population(indices, fit, succ, partition, rng)


def _engine_state(spec: HeuristicSpec, fit: np.ndarray, n: int,
                  bin_width: float, partition=None):
    needs_succ = spec.kind in (HeuristicKind.MHC, HeuristicKind.NHC)
    succ = mhc_successor_table(fit, n) if needs_succ else None
    if spec.kind is HeuristicKind.NHC and partition is None:
        partition = NeutralPartition(fit, bin_width)
    return succ, partition


def build_fitness_cloud(landscape: NkLandscape, spec: HeuristicSpec,
                        samples_per_genotype: int = 1,
                        bin_width: float = DEFAULT_BIN_WIDTH,
                        fitness_table=None, return_raw: bool = False,
                        partition: NeutralPartition | None = None,
                        workers: int = 1):
    """One-step cloud for a heuristic, sampled from every genotype.

    With ``samples_per_genotype`` above one the ordinate is the average
    offspring fitness over the samples; raw export still lists each sample.
    """
    if samples_per_genotype < 1:
        raise ParameterError(
            f"samples_per_genotype must be >= 1, got {samples_per_genotype}")
    fit = _enumerated(landscape, fitness_table, workers)
    n = landscape.n
    bins_all = bin_indices(fit, bin_width)
    succ, partition = _engine_state(spec, fit, n, bin_width, partition)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.rng_seed)))
    base = np.arange(fit.size, dtype=np.int64)
    total = np.zeros(fit.size, dtype=np.float64)
    raw_off = []
    for _ in range(samples_per_genotype):
        off = fit[_one_step(spec, base, fit, n, succ, partition, rng)]
        total += off
        if return_raw:
            raw_off.append(off)
    values = total / samples_per_genotype
    acc = _BinAccumulator(n_bins(bin_width))
    acc.add(bins_all, values)
    acc.finalize_means()
    acc.add_sq(bins_all, values)
    summary = acc.summary("FC", spec.describe(), bin_width, None)
    if return_raw:
        return summary, (np.tile(fit, samples_per_genotype), np.concatenate(raw_off))
    return summary


def _population_states(spec: HeuristicSpec, fit: np.ndarray, n: int,
                       targets: list[int], bin_width: float,
                       partition=None) -> dict[int, np.ndarray]:
    """Advance the whole genotype space, capturing the index array at each
    target generation."""
    if spec.kind is HeuristicKind.SA_COOLING and targets[-1] > spec.cooling.total_generations:
        raise ParameterError(
            f"snapshot generation {targets[-1]} exceeds the cooling schedule's "
            f"{spec.cooling.total_generations}")
    succ, partition = _engine_state(spec, fit, n, bin_width, partition)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.rng_seed)))
    cur = np.arange(fit.size, dtype=np.int64)
    wanted = set(targets)
    states: dict[int, np.ndarray] = {}
    if 0 in wanted:
        states[0] = cur
    for t in range(targets[-1]):
        if spec.kind is HeuristicKind.RANDOM_WALK:
            cur = random_walk_population(cur, n, rng)
        elif spec.kind is HeuristicKind.MHC:
            cur = succ[cur]
        elif spec.kind is HeuristicKind.SA_FIXED:
            cur = sa_population(cur, fit, n, spec.temperature, rng)
        elif spec.kind is HeuristicKind.SA_COOLING:
            cur = sa_population(cur, fit, n, spec.cooling.temperature_at(t), rng)
        else:
            cur = nhc_population(cur, fit, succ, partition, rng)
        if t + 1 in wanted:
            states[t + 1] = cur
    return states


def _sa_equilibrium(spec: HeuristicSpec, fit: np.ndarray, n: int):
    """Run fixed-temperature annealing until the population mean settles."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.rng_seed)))
    cur = np.arange(fit.size, dtype=np.int64)
    prev = None
    window_sum = 0.0
    gen = 0
    while gen < SA_EQUILIBRIUM_MAX_GENERATIONS:
        cur = sa_population(cur, fit, n, spec.temperature, rng)
        gen += 1
        window_sum += float(fit[cur].mean())
        if gen % SA_EQUILIBRIUM_WINDOW == 0:
            mean = window_sum / SA_EQUILIBRIUM_WINDOW
            window_sum = 0.0
            if prev is not None and abs(mean - prev) < SA_EQUILIBRIUM_TOL:
                break
            prev = mean
    return cur, gen


def _summarize_state(fit: np.ndarray, bins_all: np.ndarray, state: np.ndarray,
                     bin_width: float, heuristic: dict, generations: int):
    values = fit[state]
    acc = _BinAccumulator(n_bins(bin_width))
    acc.add(bins_all, values)
    acc.finalize_means()
    acc.add_sq(bins_all, values)
    return acc.summary("FCStar", heuristic, bin_width, generations), values


def build_limit_cloud_snapshots(landscape: NkLandscape, spec: HeuristicSpec,
                                snapshot_generations, bin_width: float = DEFAULT_BIN_WIDTH,
                                fitness_table=None,
                                partition: NeutralPartition | None = None,
                                workers: int = 1) -> dict[int, CloudSummary]:
    """Limit clouds at several generation counts from one shared run."""
    targets = sorted({int(g) for g in snapshot_generations})
    if not targets:
        raise ParameterError("at least one snapshot generation is required")
    if targets[0] < 0:
        raise ParameterError(f"snapshot generations must be >= 0, got {targets[0]}")
    fit = _enumerated(landscape, fitness_table, workers)
    bins_all = bin_indices(fit, bin_width)
    states = _population_states(spec, fit, landscape.n, targets, bin_width, partition)
    out = {}
    for g in targets:
        out[g], _ = _summarize_state(fit, bins_all, states[g], bin_width,
                                     spec.describe(), g)
    return out


def build_limit_cloud(landscape: NkLandscape, spec: HeuristicSpec,
                      generations: int | None = None,
                      bin_width: float = DEFAULT_BIN_WIDTH,
                      fitness_table=None, return_raw: bool = False,
                      partition: NeutralPartition | None = None,
                      workers: int = 1):
    """Limit cloud from every genotype.

    ``generations=None`` resolves to the schedule length for cooling
    annealing, to equilibrium (settled population mean, hard cap 5000) for
    fixed-temperature annealing, and to 50 otherwise.  The generation count
    actually run is recorded on the summary.
    """
    fit = _enumerated(landscape, fitness_table, workers)
    bins_all = bin_indices(fit, bin_width)
    if generations is None and spec.kind is HeuristicKind.SA_FIXED:
        state, ran = _sa_equilibrium(spec, fit, landscape.n)
    else:
        if generations is None:
            if spec.kind is HeuristicKind.SA_COOLING:
                generations = spec.cooling.total_generations
            else:
                generations = DEFAULT_LIMIT_GENERATIONS
        if generations < 0:
            raise ParameterError(f"generations must be >= 0, got {generations}")
        states = _population_states(spec, fit, landscape.n, [generations],
                                    bin_width, partition)
        state, ran = states[generations], generations
    summary, values = _summarize_state(fit, bins_all, state, bin_width,
                                       spec.describe(), ran)
    if return_raw:
        return summary, (fit.copy(), values)
    return summary


@dataclass(frozen=True)
class BetaEstimate:
    """Bottleneck levels: where the mean curve meets the diagonal.

    ``beta`` is a float for a clean crossing, a (lo, hi) tuple when the
    mean hugs the diagonal over a stretch of bins, or None.  ``method``
    names how beta was found when it exists, else how beta_star was
    ("plateau"), else "absent".  A point beta implies beta_star was read
    off the limit mean at beta's bin; otherwise beta_star comes from
    plateau detection.
    """

    beta: float | tuple[float, float] | None
    beta_star: float | None
    method: str
    accuracy: float


def estimate_beta(fc: CloudSummary, accuracy: float = 0.002) -> BetaEstimate:
    """Locate the diagonal crossing of a one-step cloud's mean curve.

    The first sign change of d = f_mean - center counts as a crossing only
    if the curve stays decisively on the far side beyond it (count-weighted
    average of d past the change exceeds the accuracy in magnitude);
    otherwise the maximal stretch of bins with |d| <= accuracy is reported
    as an interval, falling back to the undecisive change and then to
    absent.  Low-occupancy bins are ignored throughout.
    """
    if fc.kind != "FC":
        raise ParameterError(f"beta is estimated on one-step clouds, got kind={fc.kind!r}")
    if accuracy <= 0.0:
        raise ParameterError(f"accuracy must be > 0, got {accuracy}")
    usable = fc.usable_bins()
    if len(usable) < 2:
        raise DataError("fewer than two usable bins; cannot locate the diagonal crossing")
    centers = np.array([b.center for b in usable])
    counts = np.array([b.count for b in usable], dtype=np.float64)
    d = np.array([b.f_mean for b in usable]) - centers

    weak = None
    for i in range(d.size - 1):
        if d[i] > 0.0 and d[i + 1] <= 0.0:
            down = True
        elif d[i] < 0.0 and d[i + 1] >= 0.0:
            down = False
        else:
            continue
        x = centers[i] + d[i] * (centers[i + 1] - centers[i]) / (d[i] - d[i + 1])
        # a genuine crossing departs the diagonal on the far side; the
        # count-weighted average of d beyond the crossing screens out
        # noise-level sign flips inside diagonal-hugging stretches
        if i + 1 < d.size:
            departure = float(np.average(d[i + 1:], weights=counts[i + 1:]))
            if (down and departure < -accuracy) or (not down and departure > accuracy):
                return BetaEstimate(float(x), None, "point_crossing", accuracy)
        weak = float(x)
        break

    best = None  # (span, bins, lo, hi)
    i = 0
    while i < d.size:
        if abs(d[i]) <= accuracy:
            j = i
            while j + 1 < d.size and abs(d[j + 1]) <= accuracy:
                j += 1
            cand = (centers[j] - centers[i], j - i + 1, centers[i], centers[j])
            if best is None or cand[:2] > best[:2]:
                best = cand
            i = j + 1
        else:
            i += 1
    if best is not None and best[1] >= 2:
        return BetaEstimate((float(best[2]), float(best[3])), None,
                            "diagonal_interval", accuracy)
    if weak is not None:
        return BetaEstimate(weak, None, "point_crossing", accuracy)
    return BetaEstimate(None, None, "absent", accuracy)


def estimate_beta_star(fcstar: CloudSummary, beta: BetaEstimate,
                       accuracy: float | None = None) -> BetaEstimate:
    """Attach beta_star from a limit cloud to a beta estimate.

    A point beta reads the limit mean at beta's bin (nearest usable bin if
    that one is sparse).  An interval or absent beta falls back to plateau
    detection: bins tracking the diagonal (|f*_mean - center| <= accuracy)
    are removed, and the remaining run with the widest parent-fitness span
    whose means stay within accuracy of each other is averaged.
    """
    if fcstar.kind != "FCStar":
        raise ParameterError(
            f"beta_star is estimated on limit clouds, got kind={fcstar.kind!r}")
    acc = beta.accuracy if accuracy is None else accuracy
    if acc <= 0.0:
        raise ParameterError(f"accuracy must be > 0, got {acc}")
    usable = fcstar.usable_bins()
    if not usable:
        raise DataError("limit cloud has no usable bins")
    if isinstance(beta.beta, float):
        target = beta.beta
        pick = min(usable, key=lambda b: abs(b.center - target))
        return BetaEstimate(beta.beta, float(pick.f_mean), beta.method, acc)
    flat = [b for b in usable if abs(b.f_mean - b.center) > acc]
    if not flat:
        raise DataError("every usable bin tracks the diagonal; no plateau to report")
    best = None  # (span, bins, start, stop)
    for i in range(len(flat)):
        lo = hi = flat[i].f_mean
        for j in range(i, len(flat)):
            lo = min(lo, flat[j].f_mean)
            hi = max(hi, flat[j].f_mean)
            if hi - lo > acc:
                break
            cand = (flat[j].center - flat[i].center, j - i + 1, i, j)
            if best is None or cand[:2] > best[:2]:
                best = cand
    span, nb, i, j = best
    value = float(np.mean([b.f_mean for b in flat[i:j + 1]]))
    method = beta.method if beta.beta is not None else "plateau"
    return BetaEstimate(beta.beta, value, method, acc)


def write_cloud_csv(summary: CloudSummary, destination, predicted=None) -> None:
    """Write per-bin statistics; floats keep full round-trip precision.

    ``predicted`` optionally appends a predicted_mean column (one value per
    bin, None for blanks).
    """
    if predicted is not None and len(predicted) != len(summary.bins):
        raise ParameterError("predicted values must align with the summary bins")
    header = ["bin_center", "f_min", "f_max", "f_mean", "f_std", "count", "low_confidence"]
    if predicted is not None:
        header.append("predicted_mean")
    lines = [",".join(header)]
    for idx, b in enumerate(summary.bins):
        row = [repr(b.center), repr(b.f_min), repr(b.f_max), repr(b.f_mean),
               repr(b.f_std), str(b.count), "1" if b.low_confidence else "0"]
        if predicted is not None:
            p = predicted[idx]
            row.append("" if p is None else repr(float(p)))
        lines.append(",".join(row))
    with open(destination, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_raw_points_csv(parents: np.ndarray, offspring: np.ndarray, destination) -> None:
    """Raw scatter export: one row per (parent, offspring) fitness pair."""
    if parents.shape != offspring.shape:
        raise ParameterError("parent and offspring arrays must have the same shape")
    data = np.column_stack([parents, offspring])
    with open(destination, "w", encoding="utf-8") as fh:
        fh.write("parent_fitness,offspring_fitness\n")
        np.savetxt(fh, data, fmt="%.17g", delimiter=",")


def beta_value_json(beta):
    if isinstance(beta, tuple):
        return [beta[0], beta[1]]
    return beta


def beta_report_dict(estimate: BetaEstimate, heuristic: dict,
                     landscape_seed: int | None, generations: int | None) -> dict:
    return {
        "beta": beta_value_json(estimate.beta),
        "beta_star": estimate.beta_star,
        "method": estimate.method,
        "accuracy": estimate.accuracy,
        "heuristic": heuristic,
        "landscape_seed": landscape_seed,
        "generations": generations,
    }


def write_beta_report(estimate: BetaEstimate, destination, *, heuristic: dict,
                      landscape_seed: int | None, generations: int | None) -> None:
    payload = beta_report_dict(estimate, heuristic, landscape_seed, generations)
    with open(destination, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
