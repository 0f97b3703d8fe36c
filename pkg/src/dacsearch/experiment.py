"""Experiment runner: instances x policies x seeds under budgets.

Each run writes its own result file under ``out_dir/runs/``, so a
re-invocation skips completed runs (cheap resumption) and a finished
experiment aggregates to an identical report.  Reports collect the four
rating scales per policy, plus oracle ("best algorithm selection")
aggregates per policy family.
"""

from __future__ import annotations

import concurrent.futures
import csv
import io
import json
import os
import re
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .heuristics import make_portfolio
from .metrics import (
    best_as,
    coverage,
    domain_score,
    guidance_score,
    quality_score,
    speed_score,
    switch_frequency,
    usage_quarters,
)
from .policies import parse_policy_spec
from .search import PLAN_FOUND, Budget, run_gbfs
from .tasks import load_task


class ExperimentError(Exception):
    pass


@dataclass
class ExperimentConfig:
    instances: list[str]
    policies: list[str]
    seeds: list[int] = field(default_factory=lambda: [0])
    portfolio: Optional[list[str]] = None
    max_expansions: Optional[int] = None
    max_seconds: Optional[float] = None
    workers: int = 1
    out_dir: str = "results"
    domain: str = "all"

    def __post_init__(self):
        if self.max_expansions is not None and self.max_expansions <= 0:
            raise ExperimentError("max_expansions must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ExperimentError("max_seconds must be positive")
        if not self.seeds:
            raise ExperimentError("need at least one seed")

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        with open(path, "rb") as fh:
            raw = fh.read()
        if path.endswith(".json"):
            data = json.loads(raw.decode("utf-8"))
        else:
            try:
                import tomllib  # Python >= 3.11
            except ModuleNotFoundError:
                import tomli as tomllib
            data = tomllib.loads(raw.decode("utf-8"))
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ExperimentError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class RunRecord:
    instance: str
    policy: str
    seed: int
    outcome: str
    expansions: int
    generated: int
    wall_time: float
    cost: Optional[int] = None
    usage_quarters: Optional[list[list[float]]] = None
    switch_masses: Optional[dict[str, float]] = None

    @property
    def solved(self) -> bool:
        return self.outcome == PLAN_FOUND


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "-", text)


def _run_filename(instance: str, policy: str, seed: int) -> str:
    stem = os.path.splitext(os.path.basename(instance))[0]
    return f"{_slug(stem)}__{_slug(policy)}__{seed}.json"


def execute_run(
    instance_path: str,
    policy_spec: str,
    seed: int,
    portfolio_names: Optional[Sequence[str]],
    max_expansions: Optional[int],
    max_seconds: Optional[float],
) -> dict:
    """Execute one search run and return its record as a plain dict."""
    task = load_task(instance_path)
    portfolio = make_portfolio(task, portfolio_names)
    policy = parse_policy_spec(policy_spec, len(portfolio), seed_offset=seed)
    result = run_gbfs(task, portfolio, policy, Budget(max_expansions, max_seconds))
    selections = [step.chosen for step in result.trace]
    record = RunRecord(
        instance=instance_path,
        policy=policy_spec,
        seed=seed,
        outcome=result.outcome,
        expansions=result.expansions,
        generated=result.generated,
        wall_time=result.wall_time,
        cost=result.cost,
        usage_quarters=usage_quarters(selections, len(portfolio)) if len(selections) >= 4 else None,
        switch_masses=switch_frequency(selections),
    )
    return asdict(record)


def _execute_star(args) -> tuple[str, dict]:
    key, call_args = args
    return key, execute_run(*call_args)


def run_experiment(config: ExperimentConfig) -> dict:
    """Run the full cross product and return the aggregated report.

    Missing tasks or malformed policy specs fail fast before any run
    starts.  Completed run files are reused verbatim.
    """
    for path in config.instances:
        if not os.path.exists(path):
            raise ExperimentError(f"missing task file: {path}")
    for spec in config.policies:
        parse_policy_spec(spec, _probe_portfolio_size(config), seed_offset=0)
    runs_dir = os.path.join(config.out_dir, "runs")
    os.makedirs(runs_dir, exist_ok=True)

    todo = []
    for instance in config.instances:
        for policy in config.policies:
            for seed in config.seeds:
                path = os.path.join(runs_dir, _run_filename(instance, policy, seed))
                if not os.path.exists(path):
                    args = (
                        instance,
                        policy,
                        seed,
                        config.portfolio,
                        config.max_expansions,
                        config.max_seconds,
                    )
                    todo.append((path, args))

    if config.workers > 1 and todo:
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.workers) as pool:
            for path, record in pool.map(_execute_star, todo):
                _write_json(path, record)
    else:
        for path, args in todo:
            _write_json(path, execute_run(*args))

    records = load_records(config.out_dir)
    report = build_report(records, domain=config.domain)
    _write_json(os.path.join(config.out_dir, "report.json"), report)
    with open(os.path.join(config.out_dir, "records.csv"), "w", encoding="utf-8") as fh:
        fh.write(records_csv(records))
    with open(os.path.join(config.out_dir, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(format_report_table(report))
    return report


def _probe_portfolio_size(config: ExperimentConfig) -> int:
    if config.portfolio:
        return len(config.portfolio)
    if not config.instances:
        return 1
    task = load_task(config.instances[0])
    return len(make_portfolio(task, config.portfolio))


def _write_json(path: str, payload) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


def load_records(out_dir: str) -> list[RunRecord]:
    runs_dir = os.path.join(out_dir, "runs")
    records = []
    if not os.path.isdir(runs_dir):
        return records
    for name in sorted(os.listdir(runs_dir)):
        if not name.endswith(".json"):
            continue
        with open(os.path.join(runs_dir, name), "r", encoding="utf-8") as fh:
            records.append(RunRecord(**json.load(fh)))
    return records


def records_csv(records: Sequence[RunRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["instance", "policy", "seed", "outcome", "expansions", "generated", "wall_time", "cost"]
    )
    for r in records:
        writer.writerow(
            [r.instance, r.policy, r.seed, r.outcome, r.expansions, r.generated, r.wall_time, r.cost]
        )
    return buf.getvalue()


def _family(policy_spec: str) -> str:
    return policy_spec.split(":", 1)[0]


def build_report(records: Sequence[RunRecord], domain: str = "all") -> dict:
    """Aggregate run records into the four rating scales plus oracles.

    The quality baseline per instance is the best cost any run found.
    Guidance uses expansions (machine independent); speed uses wall
    time and therefore varies with the execution environment.
    """
    by_policy: dict[str, list[RunRecord]] = {}
    best_cost: dict[str, Optional[int]] = {}
    for r in records:
        by_policy.setdefault(r.policy, []).append(r)
        if r.solved and r.cost is not None:
            prev = best_cost.get(r.instance)
            if prev is None or r.cost < prev:
                best_cost[r.instance] = r.cost

    policies = {}
    coverage_tables: dict[str, dict[str, float]] = {}
    for policy, runs in sorted(by_policy.items()):
        per_instance: dict[str, list[RunRecord]] = {}
        for r in runs:
            per_instance.setdefault(r.instance, []).append(r)
        cov = coverage({inst: [r.solved for r in rs] for inst, rs in per_instance.items()})
        coverage_tables[policy] = cov
        guid, spd, qual = {}, {}, {}
        expansions = {}
        for inst, rs in per_instance.items():
            guid[inst] = sum(guidance_score(r.expansions, r.solved) for r in rs) / len(rs)
            spd[inst] = sum(speed_score(r.wall_time, r.solved) for r in rs) / len(rs)
            quals = []
            for r in rs:
                base = best_cost.get(inst)
                quals.append(
                    quality_score(r.cost, base, True) if r.solved and base is not None else 0.0
                )
            qual[inst] = sum(quals) / len(rs)
            expansions[inst] = sum(r.expansions for r in rs) / len(rs)
        policies[policy] = {
            "coverage": domain_score(cov),
            "guidance": domain_score(guid),
            "speed": domain_score(spd),
            "quality": domain_score(qual),
            "per_instance_coverage": cov,
            "mean_expansions": expansions,
            "runs": len(runs),
        }

    oracles = {}
    by_family: dict[str, dict[str, dict[str, float]]] = {}
    for policy, cov in coverage_tables.items():
        by_family.setdefault(_family(policy), {})[policy] = cov
    for family, members in sorted(by_family.items()):
        oracle = best_as(members)
        oracles[family] = {
            "coverage": domain_score(oracle),
            "members": sorted(members),
            "per_instance_coverage": oracle,
        }

    return {"domain": domain, "policies": policies, "best_as": oracles}


def format_report_table(report: dict) -> str:
    lines = [f"domain: {report['domain']}"]
    header = f"{'policy':<28} {'coverage':>9} {'guidance':>9} {'speed':>9} {'quality':>9} {'runs':>5}"
    lines.append(header)
    lines.append("-" * len(header))
    for policy, scores in report["policies"].items():
        lines.append(
            f"{policy:<28} {scores['coverage']:>9.3f} {scores['guidance']:>9.3f} "
            f"{scores['speed']:>9.3f} {scores['quality']:>9.3f} {scores['runs']:>5d}"
        )
    lines.append("")
    lines.append("best algorithm selection (oracle coverage per family):")
    for family, data in report["best_as"].items():
        lines.append(f"  {family:<26} {data['coverage']:>9.3f}  over {len(data['members'])} members")
    return "\n".join(lines) + "\n"
