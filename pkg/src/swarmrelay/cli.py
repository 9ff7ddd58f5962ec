"""Command-line front end: seeded experiments, comparisons, sweeps and exports.

Every CSV is written with a header row and a ``<name>.meta.json`` sidecar
holding the seed(s), effective configuration, config and scenario hashes and
the package version, so each output file traces back to one command.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import statistics
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import LrsConfig, MrsConfig, evaluate_lrs, evaluate_mrs
from .beamforming import ArraySpec, direction_between, beam_pattern_rows, quadrature_from_degrees
from .energy import default_overhead_params, mean_transmissions, scheduling_overhead
from .moea import hypervolume, objective_bounds
from .optimizer import OptimizerConfig, run
from .problem import Solution
from .scenario import (
    EAVES_MODES,
    Scenario,
    default_scenario,
    eaves_positions,
    load_scenario,
    scenario_to_dict,
    with_eaves_mode,
    with_eavesdroppers,
)

ALGORITHMS = ("imogoa", "mogoa")


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _hash(data) -> str:
    return hashlib.sha256(_canonical_json(data).encode()).hexdigest()[:16]


def write_csv(path: Path, header: list[str], rows, meta: dict) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    with open(path.with_suffix(path.suffix + ".meta.json"), "w") as fh:
        json.dump({"version": __version__, **meta}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_scenario_arg(path: str | None) -> Scenario:
    return default_scenario() if path is None else load_scenario(path)


def _optimizer_config(args, algo: str) -> OptimizerConfig:
    overrides = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            overrides = json.load(fh)
    overrides.setdefault("pop_size", args.pop)
    overrides.setdefault("iter_max", args.iters)
    if algo == "mogoa":
        cfg = OptimizerConfig.vanilla(**{k: v for k, v in overrides.items()
                                         if k not in ("h3c_init", "nonlinear_c", "levy",
                                                      "archive_mutation", "dcde")})
    else:
        cfg = OptimizerConfig.improved(**overrides)
    return cfg


def _effective_config(cfg: OptimizerConfig, algo: str, quad_deg: float) -> dict:
    record = dataclasses.asdict(cfg)
    record["algorithm"] = algo
    record["quad_deg"] = quad_deg
    return record


def _archive_rows(archive):
    rows = []
    for m in archive.members:
        rows.append([m.f1, m.f2, m.f3, int(m.feasible), m.violation]
                    + m.solution.to_flat().tolist())
    return rows


def _archive_header(archive) -> list[str]:
    n = len(archive.members[0].solution.to_flat()) if archive.members else 0
    return ["f1", "f2", "f3", "feasible", "violation"] + [f"sol_{i}" for i in range(n)]


def _best_f1_member(archive):
    return max(archive.members, key=lambda m: m.f1)


def _trajectory_rows(scenario: Scenario, member) -> list:
    sol = member.solution
    rows = []
    for k in range(scenario.n_uavs):
        rows.append([k + 1, 0, 0, *scenario.uav_init[k].tolist()])
        for step, dev in enumerate(sol.order, start=1):
            rows.append([k + 1, step, int(dev), *sol.pos[k, dev - 1, :].tolist()])
    return rows


def _beampattern_rows(scenario: Scenario, member, quad) -> list:
    sol = member.solution
    dev = int(sol.order[0])  # first served device
    ch = scenario.channel
    rows = []
    paa_spec = ArraySpec(scenario.paa.element_offsets(), sol.paa_w[:, dev - 1], ch.wavelength)
    upos = sol.pos[sol.recv[dev - 1] - 1, dev - 1]
    target = direction_between(scenario.paa_center, upos)
    for theta, phi, gain in beam_pattern_rows(paa_spec, target, quad):
        rows.append(["station", theta, phi, gain])
    pos = sol.pos[:, dev - 1, :]
    center = pos.mean(axis=0)
    swarm_spec = ArraySpec(pos - center, sol.uvaa_w[:, dev - 1], ch.wavelength)
    target = direction_between(center, scenario.devices[dev - 1])
    for theta, phi, gain in beam_pattern_rows(swarm_spec, target, quad):
        rows.append(["swarm", theta, phi, gain])
    return rows


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _run_one(scenario, cfg, quad, workers):
    archive, trace = run(cfg, scenario, quad, workers=workers)
    return archive, trace


def cmd_run(args) -> int:
    scenario = _load_scenario_arg(args.scenario)
    if args.mode:
        scenario = with_eaves_mode(scenario, args.mode)
    quad = quadrature_from_degrees(args.quad_deg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [int(s) for s in args.seeds.split(",")]
    if not seeds:
        print("error: at least one seed is required", file=sys.stderr)
        return 2

    base_cfg = _optimizer_config(args, args.algo)
    scenario_hash = _hash(scenario_to_dict(scenario))
    summary_rows = []
    for seed in seeds:
        cfg = dataclasses.replace(base_cfg, seed=seed)
        effective = _effective_config(cfg, args.algo, args.quad_deg)
        meta = {
            "command": "run",
            "seed": seed,
            "algorithm": args.algo,
            "config_hash": _hash(effective),
            "scenario_hash": scenario_hash,
            "effective_config": effective,
        }
        archive, trace = _run_one(scenario, cfg, quad, args.workers)
        write_csv(out / f"archive_seed{seed}.csv", _archive_header(archive),
                  _archive_rows(archive), meta)
        write_csv(out / f"trace_seed{seed}.csv",
                  ["iteration", "hv", "archive_size", "best_f1", "best_f2", "best_f3"],
                  [[i, h, s, b1, b2, b3] for i, h, s, b1, b2, b3 in
                   zip(trace.iterations, trace.hv, trace.archive_sizes,
                       trace.best_f1, trace.best_f2, trace.best_f3)],
                  meta)
        best = _best_f1_member(archive)
        write_csv(out / f"trajectory_seed{seed}.csv",
                  ["uav", "step", "device", "x", "y", "z"],
                  _trajectory_rows(scenario, best), meta)
        write_csv(out / f"beampattern_seed{seed}.csv",
                  ["array", "theta_deg", "phi_deg", "gain_db"],
                  _beampattern_rows(scenario, best, quad), meta)
        summary_rows.append([seed, trace.hv[-1], trace.best_f1[-1],
                             trace.best_f2[-1], trace.best_f3[-1]])
        print(f"seed {seed}: archive {len(archive.members)}, "
              f"hv {trace.hv[-1]:.4f}, best f1 {trace.best_f1[-1]:.4g}")
    hv_values = [r[1] for r in summary_rows]
    meta = {
        "command": "run",
        "seeds": seeds,
        "algorithm": args.algo,
        "scenario_hash": scenario_hash,
        "median_hv": statistics.median(hv_values),
        "effective_config": _effective_config(base_cfg, args.algo, args.quad_deg),
    }
    write_csv(out / "summary.csv",
              ["seed", "final_hv", "best_f1", "best_f2", "best_f3"],
              summary_rows, meta)
    print(f"median hv over {len(seeds)} seeds: {statistics.median(hv_values):.4f}")
    return 0


def compare_runs(scenario, quad, seeds, cfg_imo, cfg_mog, workers=1, hv_samples=20000):
    """Run both algorithms per seed and score them under shared normalization."""
    results = {}
    for algo, base in (("imogoa", cfg_imo), ("mogoa", cfg_mog)):
        for seed in seeds:
            cfg = dataclasses.replace(base, seed=seed)
            archive, trace = run(cfg, scenario, quad, workers=workers)
            results[(algo, seed)] = (archive, trace)
    bounds = objective_bounds(
        *[a.objectives_array() for a, _ in results.values() if len(a.members)]
    )
    # HV sampler seeded by run seed only, so identical archives score identically
    final_hv = {
        key: hypervolume(archive.objectives_array(), bounds, hv_samples,
                         np.random.default_rng((key[1], 31)))
        for key, (archive, _) in results.items()
    }
    return results, bounds, final_hv


def cmd_compare(args) -> int:
    scenario = _load_scenario_arg(args.scenario)
    if args.mode:
        scenario = with_eaves_mode(scenario, args.mode)
    quad = quadrature_from_degrees(args.quad_deg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [int(s) for s in args.seeds.split(",")]
    if len(seeds) < 3:
        print("error: compare needs at least 3 seeds", file=sys.stderr)
        return 2
    cfg_imo = _optimizer_config(args, "imogoa")
    cfg_mog = _optimizer_config(args, "mogoa")
    results, bounds, final_hv = compare_runs(
        scenario, quad, seeds, cfg_imo, cfg_mog, args.workers, args.hv_samples
    )
    scenario_hash = _hash(scenario_to_dict(scenario))
    meta = {
        "command": "compare",
        "seeds": seeds,
        "scenario_hash": scenario_hash,
        "hv_bounds_low": bounds[0].tolist(),
        "hv_bounds_high": bounds[1].tolist(),
        "effective_config": {
            "imogoa": _effective_config(cfg_imo, "imogoa", args.quad_deg),
            "mogoa": _effective_config(cfg_mog, "mogoa", args.quad_deg),
        },
    }
    rows = []
    for (algo, seed), (archive, trace) in results.items():
        rows.append([algo, seed, final_hv[(algo, seed)], trace.best_f1[-1],
                     trace.best_f2[-1], trace.best_f3[-1]])
    write_csv(out / "comparison.csv",
              ["algorithm", "seed", "final_hv", "best_f1", "best_f2", "best_f3"],
              rows, meta)
    curve_rows = []
    for (algo, seed), (_, trace) in results.items():
        for i, snap in enumerate(trace.snapshots):
            hv = hypervolume(snap, bounds, args.hv_samples,
                             np.random.default_rng((seed, i, 57)))
            curve_rows.append([algo, seed, trace.iterations[i], hv])
    write_csv(out / "hv_curves.csv", ["algorithm", "seed", "iteration", "hv"],
              curve_rows, meta)
    medians = {
        algo: statistics.median([final_hv[(algo, s)] for s in seeds])
        for algo in ALGORITHMS
    }
    verdict = "imogoa" if medians["imogoa"] > medians["mogoa"] else "mogoa"
    write_csv(out / "verdict.csv", ["algorithm", "median_hv", "winner"],
              [[a, medians[a], int(a == verdict)] for a in ALGORITHMS], meta)
    print(f"median hv: imogoa {medians['imogoa']:.4f}  mogoa {medians['mogoa']:.4f}"
          f"  -> {verdict}")
    return 0


def cmd_eaves_sweep(args) -> int:
    scenario = _load_scenario_arg(args.scenario)
    quad = quadrature_from_degrees(args.quad_deg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    counts = [int(c) for c in args.counts.split(",")]
    if any(c < 1 for c in counts):
        print("error: eavesdropper counts must be >= 1", file=sys.stderr)
        return 2
    modes = list(EAVES_MODES) if args.mode in (None, "both") else [args.mode]
    base_cfg = _optimizer_config(args, args.algo)
    rows = []
    for count in counts:
        layout = eaves_positions(args.eaves_seed, count)
        for mode in modes:
            sc = with_eaves_mode(with_eavesdroppers(scenario, layout), mode)
            cfg = dataclasses.replace(base_cfg, seed=args.run_seed)
            archive, trace = run(cfg, sc, quad, workers=args.workers)
            rows.append([count, mode, trace.best_f1[-1], trace.best_f2[-1],
                         trace.best_f3[-1], trace.hv[-1]])
            print(f"count {count} mode {mode}: best f1 {trace.best_f1[-1]:.4g} "
                  f"f2 {trace.best_f2[-1]:.4g} f3 {trace.best_f3[-1]:.4g}")
    meta = {
        "command": "eaves-sweep",
        "counts": counts,
        "modes": modes,
        "eaves_seed": args.eaves_seed,
        "run_seed": args.run_seed,
        "scenario_hash": _hash(scenario_to_dict(scenario)),
        "effective_config": _effective_config(base_cfg, args.algo, args.quad_deg),
    }
    write_csv(out / "eaves_sweep.csv",
              ["n_eaves", "mode", "best_f1", "best_f2", "best_f3", "final_hv"],
              rows, meta)
    return 0


def cmd_baselines(args) -> int:
    scenario = _load_scenario_arg(args.scenario)
    quad = quadrature_from_degrees(args.quad_deg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scenario_hash = _hash(scenario_to_dict(scenario))

    hops = [int(h) for h in args.hops.split(",")]
    mrs_rows = []
    for n in hops:
        res = evaluate_mrs(MrsConfig(n_hops=n), scenario)
        mrs_rows.append([n, res["f1"], res["f2"], res["f3"],
                         np.log10(res["f1"]), np.log10(res["f2"]), np.log10(res["f3"])])
        print(f"mrs {n:2d} hops: f1 {res['f1']:.4g}  f2 {res['f2']:.4g}  f3 {res['f3']:.4g}")
    write_csv(out / "mrs.csv",
              ["n_hops", "f1", "f2", "f3", "log10_f1", "log10_f2", "log10_f3"],
              mrs_rows,
              {"command": "baselines", "scenario_hash": scenario_hash, "hops": hops})

    spacings = [float(s) for s in args.spacings.split(",")]
    lrs_rows = []
    for spacing in spacings:
        rng = np.random.default_rng((args.seed, int(spacing * 1000)))
        res = evaluate_lrs(LrsConfig(element_spacing=spacing), scenario, quad, rng,
                           draws=args.draws)
        lrs_rows.append([spacing, res["f1_mean"], res["f2_mean"]])
        print(f"lrs {spacing:.1f} m: f1 {res['f1_mean']:.4g}  f2 {res['f2_mean']:.4g}")
    write_csv(out / "lrs.csv", ["spacing_m", "f1_mean", "f2_mean"], lrs_rows,
              {"command": "baselines", "scenario_hash": scenario_hash,
               "spacings": spacings, "draws": args.draws, "seed": args.seed})
    return 0


def cmd_overhead(args) -> int:
    params = default_overhead_params(
        k=args.k, n_array_elements=args.array_elements, t=args.devices,
        n_retx=args.n_retx, loss_prob=args.loss_prob,
        rate_bps=args.rate, tx_power=args.tx_power,
    )
    n_bar = mean_transmissions(params.loss_prob, params.n_retx)
    energy = scheduling_overhead(params)
    print("scheduling overhead report")
    print(f"  UAVs: {params.n_uavs}   retransmission cap: {params.n_retx}"
          f"   loss probability: {params.loss_prob}")
    print(f"  message bits: start {params.bits_start}, fusion {params.bits_fusion}, "
          f"solution {params.bits_solution}, ack1 {params.bits_ack1}, ack3 {params.bits_ack3}")
    print(f"  link: {params.rate_bps:.3g} bps at {params.tx_power} W")
    print(f"  mean transmissions per critical message: {n_bar:.4f}")
    print(f"  total scheduling energy: {energy:.6f} J")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "overhead.csv",
                  ["k", "n_retx", "loss_prob", "rate_bps", "tx_power",
                   "mean_transmissions", "energy_j"],
                  [[params.n_uavs, params.n_retx, params.loss_prob, params.rate_bps,
                    params.tx_power, n_bar, energy]],
                  {"command": "overhead"})
    return 0


def cmd_beampattern(args) -> int:
    scenario = _load_scenario_arg(args.scenario)
    quad = quadrature_from_degrees(args.quad_deg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ch = scenario.channel
    if args.archive:
        with open(args.archive) as fh:
            header = fh.readline().strip().split(",")
            line = None
            for i, row in enumerate(fh):
                if i == args.row:
                    line = row.strip().split(",")
                    break
        if line is None:
            print(f"error: row {args.row} not found in {args.archive}", file=sys.stderr)
            return 2
        flat = np.array([float(v) for v in line[header.index("sol_0"):]])
        sol = Solution.from_flat(flat, scenario.paa.n_elements,
                                 scenario.n_uavs, scenario.n_devices)
        member = type("M", (), {"solution": sol})()
        rows = _beampattern_rows(scenario, member, quad)
    else:
        # Uniform weights on the initial layout, aimed at the first device.
        rows = []
        paa_spec = ArraySpec(scenario.paa.element_offsets(),
                             np.ones(scenario.paa.n_elements), ch.wavelength)
        target = direction_between(scenario.paa_center, scenario.uav_init[0])
        rows += [["station", t, p, g] for t, p, g in beam_pattern_rows(paa_spec, target, quad)]
        center = scenario.uav_init.mean(axis=0)
        swarm_spec = ArraySpec(scenario.uav_init - center,
                               np.ones(scenario.n_uavs), ch.wavelength)
        target = direction_between(center, scenario.devices[0])
        rows += [["swarm", t, p, g] for t, p, g in beam_pattern_rows(swarm_spec, target, quad)]
    write_csv(out / "beampattern.csv", ["array", "theta_deg", "phi_deg", "gain_db"],
              rows, {"command": "beampattern",
                     "scenario_hash": _hash(scenario_to_dict(scenario)),
                     "archive": args.archive, "row": args.row})
    print(f"wrote {len(rows)} pattern samples")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(p, with_algo=True):
    p.add_argument("--scenario", help="scenario JSON path (default: bundled)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--quad-deg", type=float, default=5.0,
                   help="spherical quadrature resolution in degrees")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--config", help="optimizer config overrides (JSON)")
    p.add_argument("--pop", type=int, default=20, help="population size")
    p.add_argument("--iters", type=int, default=100, help="iteration count")
    p.add_argument("--mode", choices=EAVES_MODES, help="eavesdropper collusion mode")
    if with_algo:
        p.add_argument("--algo", choices=ALGORITHMS, default="imogoa")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmrelay",
        description="UAV-swarm collaborative secure relay experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="seeded optimization runs with full exports")
    _add_common(p)
    p.add_argument("--seeds", default="0", help="comma-separated seeds")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="improved vs vanilla optimizer comparison")
    _add_common(p, with_algo=False)
    p.add_argument("--seeds", default="0,1,2", help="comma-separated seeds (>= 3)")
    p.add_argument("--hv-samples", type=int, default=20000)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("eaves-sweep", help="objectives vs eavesdropper count per mode")
    _add_common(p)
    p.add_argument("--counts", default="1,2,3")
    p.add_argument("--eaves-seed", type=int, default=11)
    p.add_argument("--run-seed", type=int, default=0)
    p.set_defaults(func=cmd_eaves_sweep, mode=None)

    p = sub.add_parser("baselines", help="multi-hop and static-line baseline tables")
    p.add_argument("--scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--quad-deg", type=float, default=5.0)
    p.add_argument("--hops", default="2,4,8,16")
    p.add_argument("--spacings", default="1,2,3,4,5")
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_baselines)

    p = sub.add_parser("overhead", help="scheduling-overhead energy report")
    p.add_argument("--k", type=int, default=16)
    p.add_argument("--array-elements", type=int, default=36)
    p.add_argument("--devices", type=int, default=8)
    p.add_argument("--n-retx", type=int, default=3)
    p.add_argument("--loss-prob", type=float, default=0.05)
    p.add_argument("--rate", type=float, default=1e6)
    p.add_argument("--tx-power", type=float, default=0.1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_overhead)

    p = sub.add_parser("beampattern", help="gain-pattern CSV for plotting")
    p.add_argument("--scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--quad-deg", type=float, default=2.0)
    p.add_argument("--archive", help="re-plot a stored archive member")
    p.add_argument("--row", type=int, default=0)
    p.set_defaults(func=cmd_beampattern)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
