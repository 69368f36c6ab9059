"""Benchmark harness: generate grid scenarios, run the schedulers, emit records.

CSV columns, in order:

    trial, seed, n, R, R_W, algo, t_g, theta, network_tput, max_tput_baseline,
    slots, runtime_ms, kappa, theta_relaxed, delta, edges, status

``algo`` is one of ``opt``, ``ec``, ``max-tput``. Columns that do not apply
to an algorithm are left empty. ``status`` is ``ok`` or the name of the
error that stopped the solver on that trial.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .channel import RNG_ALGORITHM, ChannelParams, GridScenario, generate_grid, load_config
from .ec import EcConfig, solve_ec
from .errors import MmschedError
from .model import Network, max_tput_baseline
from .mtfs import solve

SCHEMA_VERSION = 1
COLUMNS = (
    "trial", "seed", "n", "R", "R_W", "algo", "t_g", "theta", "network_tput",
    "max_tput_baseline", "slots", "runtime_ms", "kappa", "theta_relaxed",
    "delta", "edges", "status",
)
ALGOS = ("opt", "ec", "max-tput")


def trial_seed(base: int, trial: int) -> int:
    """Independent 64-bit seed for one trial."""
    return int(np.random.SeedSequence([base, trial]).generate_state(1, np.uint64)[0])


def _max_tput_row(net: Network) -> dict:
    """Serve the strongest eNB links all frame long; everything else idles."""
    start = time.perf_counter()
    value = max_tput_baseline(net)
    caps = []
    for k in net.out_links[0]:
        e = net.links[k]
        caps += [(e.capacity, e.dst)] * net.nodes[e.dst].rf_chains
    caps.sort(key=lambda p: (-p[0], p[1]))
    got = dict.fromkeys(net.destinations, 0.0)
    for c, v in caps[: net.nodes[0].rf_chains]:
        if v in got:
            got[v] += c
    return {
        "theta": min(got.values()),
        "network_tput": value,
        "slots": 1,
        "runtime_ms": (time.perf_counter() - start) * 1e3,
    }


def run_trial(task: tuple) -> list[dict]:
    trial, scn, params, algos, granularities, timing = task
    net = generate_grid(scn, params)
    base = {
        "trial": trial, "seed": scn.seed, "n": scn.n, "R": scn.enb_rf, "R_W": scn.mmbs_rf,
        "max_tput_baseline": max_tput_baseline(net),
    }
    rows = []

    def record(algo: str, t_g: Optional[float], fn) -> None:
        row = dict.fromkeys(COLUMNS, None)
        row.update(base, algo=algo, t_g=t_g, status="ok")
        try:
            row.update(fn())
        except MmschedError as exc:
            row["status"] = type(exc).__name__
        if not timing:
            row["runtime_ms"] = 0.0
        rows.append(row)

    def opt() -> dict:
        start = time.perf_counter()
        res = solve(net)
        return {
            "theta": res.theta,
            "network_tput": res.network_throughput,
            "slots": res.schedule.busy_slots,
            "runtime_ms": (time.perf_counter() - start) * 1e3,
        }

    def ec(t_g: float):
        def go() -> dict:
            start = time.perf_counter()
            res = solve_ec(net, EcConfig(granularity=t_g))
            return {
                "theta": res.theta,
                "network_tput": res.network_throughput,
                "slots": res.schedule.busy_slots,
                "runtime_ms": (time.perf_counter() - start) * 1e3,
                "kappa": res.kappa,
                "theta_relaxed": res.theta_relaxed,
                "delta": res.max_degree,
                "edges": res.n_edges,
            }
        return go

    for algo in algos:
        if algo == "opt":
            record("opt", None, opt)
        elif algo == "ec":
            for t_g in granularities:
                record("ec", t_g, ec(t_g))
        else:
            record("max-tput", None, lambda: _max_tput_row(net))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(records: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow([_fmt(r[c]) for c in COLUMNS])
    return buf.getvalue()


def to_json(records: Sequence[dict], meta: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, **meta, "records": list(records)}
    return json.dumps(doc, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmsched", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run seeded trials on random grids")
    # None means "not given": the params file or the built-in default applies
    run.add_argument("--grid-n", type=int, help="grid side n (n*n mmBSs)")
    run.add_argument("--dg", type=float, help="grid spacing in meters (default 100)")
    run.add_argument("--enb-rf", type=int, help="eNB RF chains R (default 10)")
    run.add_argument("--mmbs-rf", type=int, help="RF chains per mmBS (default 1)")
    run.add_argument("--ues-per-mmbs", type=int, help="UEs around each mmBS (default 0)")
    run.add_argument("--algo", choices=ALGOS + ("all",), default="all")
    run.add_argument("--granularity", type=float, action="append", help="EC granularity, repeatable (default 0.001)")
    run.add_argument("--trials", type=int, default=30)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", choices=("csv", "json"), default="csv")
    run.add_argument("--params", help="scenario/channel config file (JSON or key = value)")
    run.add_argument("--output", "-o", help="write here instead of stdout")
    run.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    run.add_argument("--no-timing", action="store_true", help="report runtime_ms as 0 for byte-stable output")
    return parser


def _scenario(args) -> tuple[GridScenario, ChannelParams]:
    scn_kw, params = load_config(args.params) if args.params else ({}, ChannelParams())
    flags = {
        "n": args.grid_n, "d_g": args.dg, "enb_rf": args.enb_rf,
        "mmbs_rf": args.mmbs_rf, "ues_per_mmbs": args.ues_per_mmbs,
    }
    scn_kw.update({k: v for k, v in flags.items() if v is not None})
    if "n" not in scn_kw:
        raise ValueError("the grid size is required (--grid-n or n in --params)")
    return GridScenario(**scn_kw), params


def run(args) -> int:
    try:
        scn, params = _scenario(args)
        granularities = args.granularity or [0.001]
        for t_g in granularities:
            EcConfig(granularity=t_g)
        if args.trials < 1 or args.jobs < 1:
            raise ValueError("--trials and --jobs must be positive")
    except (ValueError, OSError, TypeError) as exc:
        print(f"mmsched: error: {exc}", file=sys.stderr)
        return 2
    algos = ALGOS if args.algo == "all" else (args.algo,)
    tasks = [
        (i, replace(scn, seed=trial_seed(args.seed, i)), params, algos, granularities, not args.no_timing)
        for i in range(args.trials)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            batches = list(pool.map(run_trial, tasks))
    else:
        batches = [run_trial(t) for t in tasks]
    records = [r for batch in batches for r in batch]
    if args.out == "csv":
        text = to_csv(records)
    else:
        meta = {"rng": RNG_ALGORITHM, "base_seed": args.seed, "scenario": asdict(scn), "channel": asdict(params)}
        meta["scenario"].pop("seed")
        text = to_json(records, meta)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
