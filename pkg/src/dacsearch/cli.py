"""Command-line interface.

Subcommands:

* ``gen pi|artificial|transport`` -- write generated tasks to disk
* ``run --config FILE`` -- execute an experiment (TOML or JSON config)
* ``report --in DIR [--format csv|json|table]`` -- re-emit a report
* ``analyze usage|switching --trace FILE`` -- trace analyses
* ``serve --task FILE --listen HOST:PORT`` -- search driven by a remote
  controller
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .bridge import serve_search
from .experiment import ExperimentConfig, build_report, format_report_table, load_records, records_csv, run_experiment
from .generators import gen_artificial, gen_pi_n, gen_pi_prime_n, gen_transport
from .heuristics import make_portfolio
from .metrics import switch_frequency, usage_quarters
from .search import Budget
from .tasks import load_task, save_task


def _cmd_gen(args) -> int:
    if args.family == "pi":
        task = gen_pi_prime_n(args.n) if args.prime else gen_pi_n(args.n)
        save_task(task, args.output)
        print(f"wrote {args.output}: {task.num_states} states, {len(task.arcs)} arcs")
    elif args.family == "artificial":
        instance = gen_artificial(args.depth, args.branching, args.seed)
        save_task(instance.task, args.output)
        witness = "".join(map(str, instance.witness))
        print(f"wrote {args.output}: {instance.task.num_states} states")
        print(f"witness policy: scripted:{witness} ({instance.optimal_expansions} expansions)")
    else:
        instance = gen_transport(args.locations, args.packages, args.seed)
        save_task(instance.task, args.output)
        names = [instance.task.operators[i].name for i in instance.witness_plan]
        print(f"wrote {args.output}: {len(instance.task.operators)} operators")
        print(f"witness plan ({len(names)} steps): {' '.join(names) if names else '<empty>'}")
    return 0


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    report = run_experiment(config)
    print(format_report_table(report), end="")
    print(f"results in {config.out_dir}")
    return 0


def _cmd_report(args) -> int:
    records = load_records(args.in_dir)
    if not records:
        print(f"no run records under {args.in_dir}", file=sys.stderr)
        return 1
    report = build_report(records)
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    elif args.format == "csv":
        print(records_csv(records), end="")
    else:
        print(format_report_table(report), end="")
    return 0


def _read_trace(path: str) -> list[int]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [int(row["chosen_h"]) for row in rows]


def _cmd_analyze(args) -> int:
    selections = _read_trace(args.trace)
    if args.what == "usage":
        n = max(selections, default=0) + 1
        quarters = usage_quarters(selections, n)
        print(json.dumps({"quarters": quarters}, indent=2))
    else:
        print(json.dumps(switch_frequency(selections), indent=2))
    return 0


def _cmd_serve(args) -> int:
    task = load_task(args.task)
    portfolio = make_portfolio(task, args.portfolio.split(",") if args.portfolio else None)
    host, _, port = args.listen.rpartition(":")
    budget = Budget(max_expansions=args.max_expansions, max_seconds=args.max_seconds)
    result = serve_search(
        task,
        portfolio,
        host or "127.0.0.1",
        int(port),
        budget=budget,
        timeout=args.timeout,
        on_listen=lambda h, p: print(f"listening on {h}:{p}", flush=True),
    )
    print(result.summary_json())
    return 0 if result.outcome == "plan-found" else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dacsearch")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate tasks")
    gen_sub = gen.add_subparsers(dest="family", required=True)
    pi = gen_sub.add_parser("pi", help="two-heuristic trap family")
    pi.add_argument("--n", type=int, required=True)
    pi.add_argument("--prime", action="store_true", help="variant with a detour state")
    pi.add_argument("-o", "--output", required=True)
    art = gen_sub.add_parser("artificial", help="layered two-heuristic learning domain")
    art.add_argument("--depth", type=int, required=True)
    art.add_argument("--branching", type=int, default=3)
    art.add_argument("--seed", type=int, default=0)
    art.add_argument("-o", "--output", required=True)
    tr = gen_sub.add_parser("transport", help="vehicle-and-packages finite-domain family")
    tr.add_argument("--locations", type=int, required=True)
    tr.add_argument("--packages", type=int, required=True)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("-o", "--output", required=True)
    gen.set_defaults(func=_cmd_gen)

    run_p = sub.add_parser("run", help="run an experiment from a config file")
    run_p.add_argument("--config", required=True)
    run_p.set_defaults(func=_cmd_run)

    rep = sub.add_parser("report", help="aggregate run records")
    rep.add_argument("--in", dest="in_dir", required=True)
    rep.add_argument("--format", choices=["csv", "json", "table"], default="table")
    rep.set_defaults(func=_cmd_report)

    ana = sub.add_parser("analyze", help="trace analyses")
    ana.add_argument("what", choices=["usage", "switching"])
    ana.add_argument("--trace", required=True, help="trace CSV as exported by the search")
    ana.set_defaults(func=_cmd_analyze)

    srv = sub.add_parser("serve", help="run a search controlled over TCP")
    srv.add_argument("--task", required=True)
    srv.add_argument("--portfolio", help="comma-separated heuristic names")
    srv.add_argument("--listen", default="127.0.0.1:5555")
    srv.add_argument("--max-expansions", type=int)
    srv.add_argument("--max-seconds", type=float)
    srv.add_argument("--timeout", type=float, default=30.0)
    srv.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
