import csv
import math

import numpy as np
import pytest
from scipy import stats

from nkcloud import (
    CoolingSchedule,
    Genotype,
    HeuristicKind,
    HeuristicSpec,
    NkLandscape,
    ParameterError,
    build_neutral_partition,
    generate_landscape,
    run_heuristic,
    temperature_at,
    write_trajectory_csv,
)
from nkcloud.heuristics import (
    hamming_neighbors,
    mhc_step,
    mhc_successor_table,
    nhc_population,
    nhc_step,
    nop_step,
    random_walk_population,
    random_walk_step,
    sa_population,
    sa_step,
)


def single_locus(low, high):
    """One-locus landscape whose two genotypes have fitness low and high."""
    return NkLandscape(1, 0, np.empty((1, 0), dtype=int),
                       np.array([[low, high]]))


class TestCoolingSchedule:
    def test_epoch_values(self):
        sched = CoolingSchedule()
        assert temperature_at(sched, 0) == 0.10
        assert temperature_at(sched, 49) == 0.10
        assert temperature_at(sched, 50) == pytest.approx(0.095, rel=1e-12)
        assert temperature_at(sched, 100) == pytest.approx(0.09025, rel=1e-12)

    def test_floor_is_exact(self):
        sched = CoolingSchedule()
        # 0.95 ** 45 drops below 0.1, so the floor binds from epoch 45 on.
        assert temperature_at(sched, 45 * 50) == 0.01
        assert temperature_at(sched, 2449) == 0.01

    def test_monotone_non_increasing(self):
        sched = CoolingSchedule()
        temps = [temperature_at(sched, g) for g in range(sched.total_generations)]
        assert all(a >= b for a, b in zip(temps, temps[1:]))
        assert min(temps) >= 0.01

    def test_generation_out_of_range(self):
        sched = CoolingSchedule()
        with pytest.raises(ParameterError):
            temperature_at(sched, -1)
        with pytest.raises(ParameterError):
            temperature_at(sched, sched.total_generations)

    def test_validation(self):
        with pytest.raises(ParameterError):
            CoolingSchedule(t_start=0.0)
        with pytest.raises(ParameterError):
            CoolingSchedule(t_factor=1.5)
        with pytest.raises(ParameterError):
            CoolingSchedule(epoch_length=0)
        with pytest.raises(ParameterError):
            CoolingSchedule(total_generations=0)


class TestHeuristicSpec:
    def test_fixed_temperature_required(self):
        with pytest.raises(ParameterError):
            HeuristicSpec(HeuristicKind.SA_FIXED)
        with pytest.raises(ParameterError):
            HeuristicSpec(HeuristicKind.SA_FIXED, temperature=0.0)

    def test_temperature_rejected_elsewhere(self):
        for kind in (HeuristicKind.RANDOM_WALK, HeuristicKind.MHC,
                     HeuristicKind.SA_COOLING, HeuristicKind.NHC):
            with pytest.raises(ParameterError):
                HeuristicSpec(kind, temperature=0.1)

    def test_cooling_default(self):
        spec = HeuristicSpec(HeuristicKind.SA_COOLING)
        assert spec.cooling == CoolingSchedule()

    def test_cooling_only_for_annealing_schedule(self):
        with pytest.raises(ParameterError):
            HeuristicSpec(HeuristicKind.MHC, cooling=CoolingSchedule())

    def test_describe_is_plain_data(self):
        spec = HeuristicSpec(HeuristicKind.SA_FIXED, temperature=0.05,
                             rng_seed=9)
        desc = spec.describe()
        assert desc["kind"] == "sa"
        assert desc["temperature"] == 0.05
        assert desc["rng_seed"] == 9

    def test_describe_omits_seed_for_deterministic_kind(self):
        desc = HeuristicSpec(HeuristicKind.MHC).describe()
        assert "rng_seed" not in desc


class TestNeighborhood:
    def test_neighbors_in_locus_order(self):
        got = [g.index for g in hamming_neighbors(Genotype(3, 0))]
        assert got == [1, 2, 4]

    def test_neighbors_at_distance_one(self):
        g = Genotype(6, 41)
        for nb in hamming_neighbors(g):
            assert bin(nb.index ^ g.index).count("1") == 1

    def test_random_walk_uniform_over_loci(self, rand8):
        rng = np.random.default_rng(0)
        g = Genotype(8, 129)
        counts = np.zeros(8, dtype=int)
        for _ in range(16000):
            nb = random_walk_step(rand8, g, rng)
            counts[int(nb.index ^ g.index).bit_length() - 1] += 1
        assert stats.chisquare(counts).pvalue > 1e-3


class TestMhc:
    def test_hand_successors(self, hand_landscape):
        # Fitness by index is (0.15, 0.55, 0.6, 0.6); the fittest neighbor
        # map is then 0 -> 2, 1 -> 3, 2 -> 3, 3 -> 2.
        got = [mhc_step(hand_landscape, Genotype(2, i)).index
               for i in range(4)]
        assert got == [2, 3, 3, 2]

    def test_tie_broken_toward_lowest_locus(self, constant_landscape):
        for index in (0, 17, 63):
            g = Genotype(6, index)
            assert mhc_step(constant_landscape, g).index == index ^ 1

    def test_never_returns_input(self, rand8):
        for index in range(1 << 8):
            g = Genotype(8, index)
            assert mhc_step(rand8, g) != g

    def test_successor_table_matches_scalar(self, rand10):
        table = rand10.enumerate_fitness()
        succ = mhc_successor_table(table, rand10.n)
        expected = [mhc_step(rand10, Genotype(rand10.n, i)).index
                    for i in range(table.size)]
        assert succ.tolist() == expected


class TestSa:
    def test_improvement_always_taken(self):
        land = single_locus(0.2, 0.8)
        rng = np.random.default_rng(1)
        for _ in range(200):
            assert sa_step(land, Genotype(1, 0), 0.05, rng).index == 1

    def test_equal_fitness_always_taken(self):
        land = single_locus(0.5, 0.5)
        rng = np.random.default_rng(2)
        for _ in range(200):
            assert sa_step(land, Genotype(1, 0), 0.05, rng).index == 1

    def test_deleterious_acceptance_rate(self):
        # Drop of 0.1 at temperature 0.1 is accepted with probability 1/e.
        land = single_locus(0.9, 0.8)
        rng = np.random.default_rng(3)
        trials = 100_000
        accepted = sum(sa_step(land, Genotype(1, 0), 0.1, rng).index == 1
                       for _ in range(trials))
        assert accepted / trials == pytest.approx(math.exp(-1), abs=0.005)

    def test_frozen_temperature_rejects_all_losses(self):
        land = single_locus(0.9, 0.8)
        rng = np.random.default_rng(4)
        for _ in range(2000):
            assert sa_step(land, Genotype(1, 0), 1e-9, rng).index == 0

    def test_population_engine_move_structure(self, rand8):
        table = rand8.enumerate_fitness()
        rng = np.random.default_rng(5)
        cur = np.arange(table.size, dtype=np.int64)
        nxt = sa_population(cur, table, rand8.n, 0.1, rng)
        flips = (cur ^ nxt)[nxt != cur]
        assert np.all((flips & (flips - 1)) == 0)
        # A walker only stays put by refusing a strictly worse neighbor,
        # so every unchanged walker must have one.
        stayed = cur[nxt == cur]
        for i in stayed:
            assert any(table[i ^ (1 << l)] < table[i] for l in range(rand8.n))


class TestNeutralMoves:
    def test_partition_agrees_with_bin_assignment(self, rand10):
        from nkcloud.binning import bin_fitness
        table = rand10.enumerate_fitness()
        part = build_neutral_partition(table)
        for i in (0, 57, 1023):
            members = part.bin_members(part.bin_of[i])
            assert i in members
            assert all(bin_fitness(table[m]) == bin_fitness(table[i])
                       for m in members)
        assert sum(part.counts) == table.size

    def test_constant_landscape_single_bin(self, constant_landscape):
        table = constant_landscape.enumerate_fitness()
        part = build_neutral_partition(table)
        assert (part.counts > 0).sum() == 1
        assert part.bin_members(part.bin_of[0]).size == 64

    def test_nop_uniform_within_bin(self, constant_landscape):
        part = build_neutral_partition(constant_landscape.enumerate_fitness())
        rng = np.random.default_rng(6)
        g = Genotype(6, 11)
        counts = np.zeros(64, dtype=int)
        for _ in range(32000):
            counts[nop_step(part, g, rng).index] += 1
        assert stats.chisquare(counts).pvalue > 1e-3

    def test_nop_singleton_returns_self(self, distinct_landscape):
        part = build_neutral_partition(distinct_landscape.enumerate_fitness())
        rng = np.random.default_rng(7)
        for index in range(4):
            g = Genotype(2, index)
            assert nop_step(part, g, rng) == g

    def test_nhc_takes_strict_improvement(self, hand_landscape):
        part = build_neutral_partition(hand_landscape.enumerate_fitness())
        rng = np.random.default_rng(8)
        assert nhc_step(hand_landscape, part, Genotype(2, 0), rng).index == 2

    def test_nhc_drifts_on_plateau(self, constant_landscape):
        # Every genotype has fitness 0.5 exactly, so no strict improvement
        # exists and the move is a neutral redraw over the whole bin.
        part = build_neutral_partition(constant_landscape.enumerate_fitness())
        rng = np.random.default_rng(9)
        seen = {nhc_step(constant_landscape, part, Genotype(6, 11), rng).index
                for _ in range(300)}
        assert seen <= set(range(64))
        assert len(seen) > 40


class TestRunHeuristic:
    def test_zero_generations(self, rand8):
        traj = run_heuristic(rand8, HeuristicSpec(HeuristicKind.MHC),
                             Genotype(8, 5), 0)
        assert len(traj) == 1
        assert traj.genotypes[0] == 5

    def test_records_start_and_every_step(self, rand8):
        spec = HeuristicSpec(HeuristicKind.RANDOM_WALK, rng_seed=1)
        traj = run_heuristic(rand8, spec, Genotype(8, 5), 20)
        assert len(traj) == 21
        for idx, f in zip(traj.genotypes, traj.fitnesses):
            assert rand8.fitness(Genotype(8, idx)) == f
        for a, b in zip(traj.genotypes, traj.genotypes[1:]):
            assert bin(a ^ b).count("1") == 1

    def test_reproducible(self, rand8):
        spec = HeuristicSpec(HeuristicKind.SA_FIXED, temperature=0.05,
                             rng_seed=42)
        t1 = run_heuristic(rand8, spec, Genotype(8, 200), 50)
        t2 = run_heuristic(rand8, spec, Genotype(8, 200), 50)
        assert t1.genotypes == t2.genotypes

    def test_start_point_decorrelates_streams(self, rand8):
        spec = HeuristicSpec(HeuristicKind.RANDOM_WALK, rng_seed=42)
        t1 = run_heuristic(rand8, spec, Genotype(8, 0), 30)
        t2 = run_heuristic(rand8, spec, Genotype(8, 1), 30)
        flips1 = [a ^ b for a, b in zip(t1.genotypes, t1.genotypes[1:])]
        flips2 = [a ^ b for a, b in zip(t2.genotypes, t2.genotypes[1:])]
        assert flips1 != flips2

    def test_mhc_reaches_two_cycle(self, hand_landscape):
        traj = run_heuristic(hand_landscape, HeuristicSpec(HeuristicKind.MHC),
                             Genotype(2, 0), 5)
        assert traj.genotypes == [0, 2, 3, 2, 3, 2]

    def test_nhc_never_loses_fitness_bin(self, rand8):
        from nkcloud.binning import bin_fitness
        spec = HeuristicSpec(HeuristicKind.NHC, rng_seed=3)
        traj = run_heuristic(rand8, spec, Genotype(8, 77), 60)
        bins = [bin_fitness(f) for f in traj.fitnesses]
        assert all(b2 >= b1 for b1, b2 in zip(bins, bins[1:]))

    def test_cooling_walk_rejects_overrun(self, rand8):
        spec = HeuristicSpec(HeuristicKind.SA_COOLING)
        sched = CoolingSchedule()
        with pytest.raises(ParameterError):
            run_heuristic(rand8, spec, Genotype(8, 0), sched.total_generations + 1)


class TestTrajectoryCsv:
    def _read(self, path):
        with open(path, newline="") as fh:
            return list(csv.DictReader(fh))

    def test_fixed_temperature_column(self, tmp_path, rand8):
        spec = HeuristicSpec(HeuristicKind.SA_FIXED, temperature=0.05,
                             rng_seed=0)
        traj = run_heuristic(rand8, spec, Genotype(8, 9), 4)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, spec, path)
        rows = self._read(path)
        assert [int(r["generation"]) for r in rows] == [0, 1, 2, 3, 4]
        assert rows[0]["temperature"] == ""
        assert all(float(r["temperature"]) == 0.05 for r in rows[1:])
        for r in rows:
            g = Genotype(8, int(r["genotype_index"]))
            assert float(r["fitness"]) == rand8.fitness(g)

    def test_cooling_temperature_column(self, tmp_path, rand8):
        spec = HeuristicSpec(HeuristicKind.SA_COOLING, rng_seed=0)
        traj = run_heuristic(rand8, spec, Genotype(8, 9), 60)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, spec, path)
        rows = self._read(path)
        sched = spec.cooling
        for r in rows[1:]:
            gen = int(r["generation"])
            assert float(r["temperature"]) == temperature_at(sched, gen - 1)

    def test_deterministic_kind_leaves_column_blank(self, tmp_path, rand8):
        spec = HeuristicSpec(HeuristicKind.MHC)
        traj = run_heuristic(rand8, spec, Genotype(8, 9), 3)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, spec, path)
        assert all(r["temperature"] == "" for r in self._read(path))


class TestPopulationEngines:
    def test_random_walk_flips_one_bit(self, rand10):
        rng = np.random.default_rng(10)
        cur = np.arange(1 << 10, dtype=np.int64)
        nxt = random_walk_population(cur, rand10.n, rng)
        flips = cur ^ nxt
        assert np.all(flips > 0)
        assert np.all((flips & (flips - 1)) == 0)

    def test_engines_deterministic_given_seed(self, rand10):
        table = rand10.enumerate_fitness()
        cur = np.arange(table.size, dtype=np.int64)
        a = sa_population(cur, table, rand10.n, 0.05,
                          np.random.default_rng(11))
        b = sa_population(cur, table, rand10.n, 0.05,
                          np.random.default_rng(11))
        assert np.array_equal(a, b)

    def test_nhc_population_rules(self, rand10):
        table = rand10.enumerate_fitness()
        succ = mhc_successor_table(table, rand10.n)
        part = build_neutral_partition(table)
        cur = np.arange(table.size, dtype=np.int64)
        nxt = nhc_population(cur, table, succ, part,
                             np.random.default_rng(12))
        improving = table[succ[cur]] > table[cur]
        assert np.array_equal(nxt[improving], succ[cur][improving])
        drifted = ~improving
        assert np.array_equal(part.bin_of[nxt[drifted]],
                              part.bin_of[cur[drifted]])

    def test_same_bin_population_sampler(self, rand10):
        table = rand10.enumerate_fitness()
        part = build_neutral_partition(table)
        rng = np.random.default_rng(13)
        cur = np.arange(table.size, dtype=np.int64)
        out = part.sample_same_bin_population(cur, rng)
        assert np.array_equal(part.bin_of[out], part.bin_of[cur])
