"""Command-line front end: landscape files in, CSV summaries and reports out.

Every command writes a ``*_config.json`` sidecar with its fully resolved
parameters before any computation starts, and identical invocations
produce byte-identical outputs.  Exit codes: 0 success, 2 bad parameters,
3 capacity refusal, 4 unusable data, 5 file I/O.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analytic
from .binning import DEFAULT_BIN_WIDTH
from .cloud import (
    BetaEstimate,
    beta_report_dict,
    beta_value_json,
    build_fitness_cloud,
    build_hamming_cloud,
    build_limit_cloud,
    build_limit_cloud_snapshots,
    estimate_beta,
    estimate_beta_star,
    write_beta_report,
    write_cloud_csv,
    write_raw_points_csv,
)
from .errors import CapacityError, DataError, ParameterError
from .heuristics import CoolingSchedule, HeuristicKind, HeuristicSpec, NeutralPartition
from .landscape import (
    ENUMERATION_MAX_N,
    generate_landscape,
    load_landscape,
    save_landscape,
)

DEFAULT_ACCURACY = 0.002
TABLE1_SNAPSHOTS = (50, 1000, 1900, 2450)
TABLE1_TEMPERATURES = (0.10, 0.05, 0.01)

_KIND_CHOICES = [k.value for k in HeuristicKind]


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out-dir", default=".", help="directory for outputs")
    parser.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH,
                        help="parent-fitness bin width")
    parser.add_argument("--accuracy", type=float, default=DEFAULT_ACCURACY,
                        help="diagonal-closeness tolerance for the estimators")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for enumeration; outputs do not depend on it")
    parser.add_argument("--rng-seed", type=int, default=0,
                        help="seed for the heuristic's random stream")


def _heuristic_spec(args, kind: str) -> HeuristicSpec:
    kind = HeuristicKind(kind)
    temperature = getattr(args, "temp", None)
    if kind is HeuristicKind.SA_FIXED and temperature is None:
        raise ParameterError("--temp is required with the fixed-temperature annealer")
    if kind is not HeuristicKind.SA_FIXED and temperature is not None:
        raise ParameterError("--temp only applies to the fixed-temperature annealer")
    cooling = None
    if kind is HeuristicKind.SA_COOLING:
        cooling = CoolingSchedule(
            t_start=getattr(args, "t_start", 0.10),
            t_factor=getattr(args, "t_factor", 0.95),
            epoch_length=getattr(args, "epoch_length", 50),
            total_generations=getattr(args, "total_generations", 2450),
        )
    return HeuristicSpec(kind=kind, temperature=temperature, cooling=cooling,
                         rng_seed=args.rng_seed)


def _stem(args, heuristic: str) -> str:
    if getattr(args, "prefix", None):
        return args.prefix
    if heuristic == "sa":
        return f"sa_T{args.temp:g}"
    return heuristic.replace("-", "_")


def _out_dir(args) -> Path:
    path = Path(args.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_gen(args) -> int:
    out = Path(args.out)
    config = {
        "command": "gen",
        "n": args.n,
        "k": args.k,
        "seed": args.seed,
        "out": str(out),
        "enumerate": bool(args.enumerate),
        "threads": args.threads,
    }
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    _write_json(out.with_name(out.stem + "_config.json"), config)
    if args.enumerate and args.n > ENUMERATION_MAX_N:
        raise CapacityError(
            f"exhaustive enumeration supports n <= {ENUMERATION_MAX_N}, got n={args.n}")
    landscape = generate_landscape(args.n, args.k, args.seed)
    save_landscape(landscape, out)
    print(f"landscape n={args.n} k={args.k} seed={args.seed} -> {out}")
    if args.enumerate:
        table = landscape.enumerate_fitness(workers=args.threads)
        print(f"max_fitness={float(table.max())!r}")
    return 0


def _predicted_column(summary, heuristic: str, n: int, k: int, temp):
    out = []
    for b in summary.bins:
        f = b.center
        if heuristic in ("hamming", "random-walk"):
            out.append(analytic.hamming_mean(f, n, k))
        elif heuristic == "mhc":
            out.append(analytic.mhc_mean(f, n, k))
        elif heuristic in ("sa", "sa-cooling"):
            out.append(analytic.sa_expected_offspring(f, n, k, temp))
        else:
            out.append(analytic.nhc_expected_offspring(f, n, k))
    return out


def cmd_cloud(args) -> int:
    if bool(args.hamming) == (args.heuristic is not None):
        raise ParameterError("choose exactly one of --hamming or --heuristic")
    if args.samples < 1:
        raise ParameterError(f"--samples must be >= 1, got {args.samples}")
    if args.hamming and args.samples != 1:
        raise ParameterError("--samples does not apply to the exhaustive one-mutant cloud")
    heuristic = "hamming" if args.hamming else args.heuristic
    spec = None if args.hamming else _heuristic_spec(args, heuristic)
    descriptor = {"kind": "hamming"} if args.hamming else spec.describe()
    out_dir = _out_dir(args)
    stem = _stem(args, heuristic)
    outputs = {
        "cloud": str(out_dir / f"{stem}_cloud.csv"),
        "beta_report": str(out_dir / f"{stem}_beta.json"),
    }
    if args.raw_points:
        outputs["raw_points"] = str(out_dir / f"{stem}_raw.csv")
    config = {
        "command": "cloud",
        "landscape": str(args.landscape),
        "heuristic": descriptor,
        "samples_per_genotype": args.samples,
        "bin_width": args.bin_width,
        "accuracy": args.accuracy,
        "analytic_overlay": bool(args.analytic),
        "raw_points": bool(args.raw_points),
        "threads": args.threads,
        "outputs": outputs,
    }
    _write_json(out_dir / f"{stem}_config.json", config)
    landscape = load_landscape(args.landscape)
    fit = landscape.enumerate_fitness(workers=args.threads)
    if args.hamming:
        result = build_hamming_cloud(landscape, bin_width=args.bin_width,
                                     fitness_table=fit, return_raw=args.raw_points)
    else:
        result = build_fitness_cloud(landscape, spec, samples_per_genotype=args.samples,
                                     bin_width=args.bin_width, fitness_table=fit,
                                     return_raw=args.raw_points)
    if args.raw_points:
        summary, (raw_parent, raw_off) = result
        write_raw_points_csv(raw_parent, raw_off, outputs["raw_points"])
    else:
        summary = result
    predicted = None
    if args.analytic:
        temp = args.temp if heuristic == "sa" else (0.10 if heuristic == "sa-cooling" else None)
        predicted = _predicted_column(summary, heuristic, landscape.n, landscape.k, temp)
    write_cloud_csv(summary, outputs["cloud"], predicted=predicted)
    est = estimate_beta(summary, accuracy=args.accuracy)
    write_beta_report(est, outputs["beta_report"], heuristic=descriptor,
                      landscape_seed=landscape.seed, generations=None)
    print(f"cloud {stem}: bins={len(summary.bins)} points={summary.total_count()}")
    print(f"beta={beta_value_json(est.beta)} method={est.method}")
    return 0


def cmd_limit_cloud(args) -> int:
    heuristic = args.heuristic
    spec = _heuristic_spec(args, heuristic)
    out_dir = _out_dir(args)
    stem = _stem(args, heuristic)
    snapshots = None
    if args.snapshots:
        try:
            snapshots = sorted({int(s) for s in args.snapshots.split(",")})
        except ValueError as exc:
            raise ParameterError(f"--snapshots must be comma-separated integers: {exc}")
    config = {
        "command": "limit-cloud",
        "landscape": str(args.landscape),
        "heuristic": spec.describe(),
        "generations": args.generations,
        "snapshots": snapshots,
        "bin_width": args.bin_width,
        "accuracy": args.accuracy,
        "threads": args.threads,
    }
    _write_json(out_dir / f"{stem}_config.json", config)
    landscape = load_landscape(args.landscape)
    fit = landscape.enumerate_fitness(workers=args.threads)
    partition = None
    if HeuristicKind(heuristic) is HeuristicKind.NHC:
        partition = NeutralPartition(fit, args.bin_width)
    fc = build_fitness_cloud(landscape, spec, bin_width=args.bin_width,
                             fitness_table=fit, partition=partition)
    write_cloud_csv(fc, out_dir / f"{stem}_cloud.csv")
    beta = estimate_beta(fc, accuracy=args.accuracy)
    if snapshots is not None:
        clouds = build_limit_cloud_snapshots(landscape, spec, snapshots,
                                             bin_width=args.bin_width,
                                             fitness_table=fit, partition=partition)
        items = [(g, clouds[g], f"{stem}_limit{g}") for g in snapshots]
    else:
        summary = build_limit_cloud(landscape, spec, generations=args.generations,
                                    bin_width=args.bin_width, fitness_table=fit,
                                    partition=partition)
        items = [(summary.generations, summary, f"{stem}_limit")]
    for gens, summary, base in items:
        write_cloud_csv(summary, out_dir / f"{base}_cloud.csv")
        try:
            est = estimate_beta_star(summary, beta, accuracy=args.accuracy)
        except DataError as exc:
            # A cloud that never left the diagonal has no drift level to
            # report; keep the run's other outputs and record the gap.
            est = BetaEstimate(beta.beta, None, beta.method, args.accuracy)
            print(f"{base}: beta_star unavailable ({exc})")
        write_beta_report(est, out_dir / f"{base}_beta.json", heuristic=spec.describe(),
                          landscape_seed=landscape.seed, generations=gens)
        print(f"{base}: generations={gens} beta={beta_value_json(est.beta)} "
              f"beta_star={est.beta_star} method={est.method}")
    return 0


def cmd_analytic(args) -> int:
    heuristic = args.heuristic
    if heuristic == "sa" and args.temp is None:
        raise ParameterError("--temp is required with the annealing prediction")
    if args.points < 2:
        raise ParameterError(f"--points must be >= 2, got {args.points}")
    out_dir = _out_dir(args)
    out = Path(args.out) if args.out else out_dir / f"analytic_{heuristic.replace('-', '_')}.csv"
    config = {
        "command": "analytic",
        "heuristic": heuristic,
        "n": args.n,
        "k": args.k,
        "temperature": args.temp,
        "points": args.points,
        "literal_sa": bool(args.literal_sa),
        "out": str(out),
    }
    _write_json(out.with_name(out.stem + "_config.json"), config)
    grid = np.linspace(0.0, 1.0, args.points)
    lines = ["f,predicted_mean,heuristic,n,k,temperature"]
    for f in grid:
        f = float(f)
        if heuristic == "hamming":
            value = analytic.hamming_mean(f, args.n, args.k)
        elif heuristic == "mhc":
            value = analytic.mhc_mean(f, args.n, args.k)
        elif heuristic == "sa":
            value = analytic.sa_expected_offspring(f, args.n, args.k, args.temp,
                                                   literal_form=args.literal_sa)
        else:
            value = analytic.nhc_expected_offspring(f, args.n, args.k)
        temp = repr(args.temp) if heuristic == "sa" else ""
        lines.append(f"{f!r},{value!r},{heuristic},{args.n},{args.k},{temp}")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"analytic {heuristic}: {args.points} points -> {out}")
    return 0


def _ensemble_beta(values):
    present = [v for v in values if v is not None]
    if not present:
        return None
    if any(isinstance(v, tuple) for v in present):
        los = [v[0] if isinstance(v, tuple) else v for v in present]
        his = [v[1] if isinstance(v, tuple) else v for v in present]
        return [float(np.mean(los)), float(np.mean(his))]
    return float(np.mean(present))


def _ensemble_star(values):
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


def _row(label: str, descriptor: dict, generations, estimates: list[tuple[int, BetaEstimate, int | None]]) -> dict:
    per_seed = [
        {
            "seed": seed,
            "beta": beta_value_json(est.beta),
            "beta_star": est.beta_star,
            "method": est.method,
            "generations": gens,
        }
        for seed, est, gens in estimates
    ]
    return {
        "label": label,
        "heuristic": descriptor,
        "generations": generations,
        "beta": _ensemble_beta([est.beta for _, est, _ in estimates]),
        "beta_star": _ensemble_star([est.beta_star for _, est, _ in estimates]),
        "per_seed": per_seed,
    }


def _fmt_beta(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return f"[{value[0]:.3f}, {value[1]:.3f}]"
    return f"{value:.3f}"


def build_table1_report(n: int, k: int, seeds: list[int], bin_width: float,
                        accuracy: float, rows: list[dict],
                        max_fitness: list[float]) -> dict:
    return {
        "n": n,
        "k": k,
        "bin_width": bin_width,
        "accuracy": accuracy,
        "seeds": seeds,
        "max_fitness": {
            "per_seed": max_fitness,
            "mean": float(np.mean(max_fitness)) if max_fitness else None,
        },
        "rows": rows,
    }


def cmd_reproduce_table1(args) -> int:
    try:
        seeds = [int(s) for s in args.seeds.split(",")]
    except ValueError as exc:
        raise ParameterError(f"--seeds must be comma-separated integers: {exc}")
    if not seeds:
        raise ParameterError("at least one seed is required")
    out_dir = _out_dir(args)
    config = {
        "command": "reproduce-table1",
        "n": args.n,
        "k": args.k,
        "seeds": seeds,
        "bin_width": args.bin_width,
        "accuracy": args.accuracy,
        "snapshots": list(TABLE1_SNAPSHOTS),
        "temperatures": list(TABLE1_TEMPERATURES),
        "threads": args.threads,
        "out": str(out_dir / "table1_report.json"),
    }
    _write_json(out_dir / "table1_config.json", config)

    collected: dict[str, list[tuple[int, BetaEstimate, int | None]]] = {}
    max_fitness = []
    for seed in seeds:
        landscape = generate_landscape(args.n, args.k, seed)
        fit = landscape.enumerate_fitness(workers=args.threads)
        max_fitness.append(float(fit.max()))
        partition = NeutralPartition(fit, args.bin_width)

        def fc_beta(spec):
            fc = build_fitness_cloud(landscape, spec, bin_width=args.bin_width,
                                     fitness_table=fit, partition=partition)
            return estimate_beta(fc, accuracy=args.accuracy)

        mhc = HeuristicSpec(kind=HeuristicKind.MHC, rng_seed=seed)
        beta = fc_beta(mhc)
        limit = build_limit_cloud(landscape, mhc, bin_width=args.bin_width,
                                  fitness_table=fit)
        collected.setdefault("mhc", []).append(
            (seed, estimate_beta_star(limit, beta, accuracy=args.accuracy),
             limit.generations))

        for temp in TABLE1_TEMPERATURES:
            spec = HeuristicSpec(kind=HeuristicKind.SA_FIXED, temperature=temp,
                                 rng_seed=seed)
            beta = fc_beta(spec)
            limit = build_limit_cloud(landscape, spec, bin_width=args.bin_width,
                                      fitness_table=fit)
            collected.setdefault(f"sa_{temp:g}", []).append(
                (seed, estimate_beta_star(limit, beta, accuracy=args.accuracy),
                 limit.generations))

        cooling = HeuristicSpec(kind=HeuristicKind.SA_COOLING, rng_seed=seed)
        snaps = build_limit_cloud_snapshots(landscape, cooling, TABLE1_SNAPSHOTS,
                                            bin_width=args.bin_width, fitness_table=fit)
        absent = BetaEstimate(None, None, "absent", args.accuracy)
        for g in TABLE1_SNAPSHOTS:
            collected.setdefault(f"cooling_{g}", []).append(
                (seed, estimate_beta_star(snaps[g], absent, accuracy=args.accuracy), g))

        nhc = HeuristicSpec(kind=HeuristicKind.NHC, rng_seed=seed)
        beta = fc_beta(nhc)
        limit = build_limit_cloud(landscape, nhc, bin_width=args.bin_width,
                                  fitness_table=fit, partition=partition)
        collected.setdefault("nhc", []).append(
            (seed, estimate_beta_star(limit, beta, accuracy=args.accuracy),
             limit.generations))

    rows = [_row("mHC", {"kind": "mhc"}, 50, collected["mhc"])]
    for temp in TABLE1_TEMPERATURES:
        rows.append(_row(f"SA (T={temp:.2f})", {"kind": "sa", "temperature": temp},
                         None, collected[f"sa_{temp:g}"]))
    for g in TABLE1_SNAPSHOTS:
        rows.append(_row(f"SA (generation {g})",
                         {"kind": "sa-cooling", "cooling": CoolingSchedule().describe()},
                         g, collected[f"cooling_{g}"]))
    rows.append(_row("nHC", {"kind": "nhc"}, 50, collected["nhc"]))

    report = build_table1_report(args.n, args.k, seeds, args.bin_width,
                                 args.accuracy, rows, max_fitness)
    _write_json(out_dir / "table1_report.json", report)

    width = max(len(r["label"]) for r in rows)
    print(f"{'heuristic'.ljust(width)}  beta            beta_star")
    for r in rows:
        print(f"{r['label'].ljust(width)}  {_fmt_beta(r['beta']).ljust(14)}  "
              f"{_fmt_beta(r['beta_star'])}")
    print(f"max fitness (mean over seeds): {report['max_fitness']['mean']:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nkcloud",
        description="NK landscape fitness clouds and bottleneck levels")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a landscape file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="destination JSON file")
    p.add_argument("--enumerate", action="store_true",
                   help="also enumerate and print the maximum fitness")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("cloud", help="one-step fitness cloud and beta report")
    p.add_argument("--landscape", required=True)
    p.add_argument("--hamming", action="store_true",
                   help="exhaustive one-mutant cloud over all n neighbors")
    p.add_argument("--heuristic", choices=_KIND_CHOICES)
    p.add_argument("--temp", type=float, help="temperature for the fixed annealer")
    p.add_argument("--samples", type=int, default=1,
                   help="offspring samples per genotype (ordinate is their mean)")
    p.add_argument("--raw-points", action="store_true",
                   help="also export every sampled (parent, offspring) pair")
    p.add_argument("--analytic", action="store_true",
                   help="append the predicted mean curve as an extra column")
    p.add_argument("--prefix", help="override the output filename stem")
    _add_common(p)
    p.set_defaults(func=cmd_cloud)

    p = sub.add_parser("limit-cloud", help="limit cloud(s) and beta/beta_star reports")
    p.add_argument("--landscape", required=True)
    p.add_argument("--heuristic", choices=_KIND_CHOICES, required=True)
    p.add_argument("--temp", type=float)
    p.add_argument("--generations", type=int,
                   help="generations to run (default: heuristic-specific)")
    p.add_argument("--snapshots", help="comma-separated generation counts")
    p.add_argument("--t-start", dest="t_start", type=float, default=0.10)
    p.add_argument("--t-factor", dest="t_factor", type=float, default=0.95)
    p.add_argument("--epoch-length", dest="epoch_length", type=int, default=50)
    p.add_argument("--total-generations", dest="total_generations", type=int, default=2450)
    p.add_argument("--prefix", help="override the output filename stem")
    _add_common(p)
    p.set_defaults(func=cmd_limit_cloud)

    p = sub.add_parser("analytic", help="predicted mean-offspring curves")
    p.add_argument("--heuristic", choices=["hamming", "mhc", "sa", "nhc"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--temp", type=float)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--literal-sa", action="store_true",
                   help="use the unnormalized annealing shorthand")
    p.add_argument("--out", help="destination CSV (default under --out-dir)")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("reproduce-table1",
                       help="consolidated beta/beta_star table for the standard battery")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--k", type=int, default=15)
    p.add_argument("--seeds", default="1,2,3,4,5",
                   help="comma-separated landscape seeds")
    _add_common(p)
    p.set_defaults(func=cmd_reproduce_table1)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
