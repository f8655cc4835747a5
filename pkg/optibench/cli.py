"""Command-line entry point: ``optibench <command> [options]``."""

import argparse
import json
import logging
import sys

from optibench.exceptions import BenchError, ConfigError
from optibench.services.benchmark import BenchmarkService
from optibench.services.oracle import OracleService
from optibench.services.results import ResultsService
from optibench.utils import LOGGER_NAME, get_logger

logger = get_logger(__name__)


def _emit(payload) -> None:
    print(json.dumps(payload, indent=2, default=str))


def cmd_run(args: argparse.Namespace) -> int:
    cfg = BenchmarkService.load_config(args.config)
    if args.workers is not None:
        cfg = cfg.model_copy(update={"workers": args.workers})
    run_id, records, out = BenchmarkService.run(cfg, args.out)
    _emit(
        {
            "run_id": run_id,
            "n_records": len(records),
            "n_valid": sum(record.validity for record in records),
            "n_errors": sum(record.error is not None for record in records),
            "out_dir": str(out),
        }
    )
    return 0


def cmd_summarize(args: argparse.Namespace) -> int:
    summary = ResultsService.summarize_dir(args.in_dir)
    print(summary.to_csv(index=False), end="")
    return 0


def cmd_validate_config(args: argparse.Namespace) -> int:
    cfg = BenchmarkService.load_config(args.config)
    plan = BenchmarkService.build_plan(cfg)
    _emit({"valid": True, "n_cells": len(plan)})
    return 0


def cmd_oracle_qubits(args: argparse.Namespace) -> int:
    dims = {
        "n_seams": args.n_seams,
        "n_configs": args.n_configs,
        "n_tools": args.n_tools,
        "n_nodes": args.n_nodes,
        "n_f": args.n_f,
        "n_h": args.n_h,
        "n_s": args.n_s,
    }
    result = OracleService.qubit_count(
        args.application, **{k: v for k, v in dims.items() if v is not None}
    )
    _emit(result.model_dump())
    return 0


def cmd_oracle_tours(args: argparse.Namespace) -> int:
    results = [
        OracleService.tour_equivalence(args.application, args.size, seed)
        for seed in range(args.seeds)
    ]
    mismatches = [r for r in results if not r["match"]]
    _emit({"checked": len(results), "mismatches": mismatches})
    return 1 if mismatches else 0


def cmd_oracle_maxsat(args: argparse.Namespace) -> int:
    results = [
        OracleService.maxsat_dominance(args.n_f, seed) for seed in range(args.seeds)
    ]
    mismatches = [r for r in results if not r["match"]]
    _emit(
        {
            "checked": len(results),
            "satisfiable": sum(r["satisfiable"] for r in results),
            "mismatches": mismatches,
        }
    )
    return 1 if mismatches else 0


def cmd_oracle_gadget(args: argparse.Namespace) -> int:
    result = OracleService.gadget_check()
    _emit(result)
    return 0 if result["match"] else 1


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("optibench.main:app", host=args.host, port=args.port)
    return 0


def build_argparser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="optibench",
        description="Application-level benchmarks of optimization solvers.",
    )
    p.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    pr = sub.add_parser("run", help="Run every cell of a benchmark configuration.")
    pr.add_argument("--config", required=True, help="YAML configuration file.")
    pr.add_argument("--workers", type=int, default=None, help="Parallel cells.")
    pr.add_argument("--out", default=None, help="Output directory.")
    pr.set_defaults(func=cmd_run)

    ps = sub.add_parser("summarize", help="Re-summarize a persisted run.")
    ps.add_argument("--in", dest="in_dir", required=True, help="Run directory.")
    ps.set_defaults(func=cmd_summarize)

    pv = sub.add_parser("validate-config", help="Check a configuration file.")
    pv.add_argument("--config", required=True)
    pv.set_defaults(func=cmd_validate_config)

    po = sub.add_parser("oracle", help="Brute-force consistency checks.")
    osub = po.add_subparsers(dest="oracle_cmd", required=True)

    pq = osub.add_parser("qubits", help="QUBO variable count of an encoding.")
    pq.add_argument("--application", required=True, choices=["pvc", "tsp", "maxsat"])
    for flag in ("--n-seams", "--n-configs", "--n-tools", "--n-nodes"):
        pq.add_argument(flag, type=int, default=None)
    for flag in ("--n-f", "--n-h", "--n-s"):
        pq.add_argument(flag, type=int, default=None)
    pq.set_defaults(func=cmd_oracle_qubits)

    pt = osub.add_parser("tours", help="QUBO optimum vs exhaustive tours.")
    pt.add_argument("--application", required=True, choices=["pvc", "tsp"])
    pt.add_argument("--size", type=int, required=True)
    pt.add_argument("--seeds", type=int, default=20)
    pt.set_defaults(func=cmd_oracle_tours)

    pm = osub.add_parser("maxsat", help="QUBO argmax vs exact MAX-SAT optimum.")
    pm.add_argument("--n-f", type=int, default=6)
    pm.add_argument("--seeds", type=int, default=10)
    pm.set_defaults(func=cmd_oracle_maxsat)

    pg = osub.add_parser("gadget", help="Exhaustive check of the clause gadget.")
    pg.set_defaults(func=cmd_oracle_gadget)

    pw = sub.add_parser("serve", help="Serve the HTTP API.")
    pw.add_argument("--host", default="127.0.0.1")
    pw.add_argument("--port", type=int, default=8000)
    pw.set_defaults(func=cmd_serve)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_argparser().parse_args(argv)
    if args.verbose:
        level = logging.DEBUG if args.verbose > 1 else logging.INFO
        logging.getLogger(LOGGER_NAME).setLevel(level)
    try:
        return args.func(args)
    except ConfigError as e:
        for error in e.errors:
            print(f"{error['field']}: {error['message']}", file=sys.stderr)
        if not e.errors:
            print(e.detail, file=sys.stderr)
        return 2
    except BenchError as e:
        logger.error("%s: %s", type(e).__name__, e.detail)
        print(f"{type(e).__name__}: {e.detail}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
