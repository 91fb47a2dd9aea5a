"""Simulation harness: replicated runs, aggregation, tables.

Seed policy: one master seed fans out through numpy SeedSequence trees, so
every replica's market and every (replica, mechanism) run gets its own
independent, platform-stable stream. Reruns of the same config are therefore
byte-identical, including every serialized artifact.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .blocking import BLOCK_CATEGORIES, audit
from .generate import GenConfig, generate_market
from .market import validate_market
from .mechanisms import MECHANISM_ORDER, MECHANISMS

_MARKET_TAG = 0
_MECH_TAG = 1


def _child_seed(master: int, *path: int) -> int:
    ss = np.random.SeedSequence([int(master), *[int(p) for p in path]])
    return int(ss.generate_state(1, np.uint64)[0])


def market_seed(master: int, replica: int) -> int:
    return _child_seed(master, _MARKET_TAG, replica)


def mechanism_seed(master: int, replica: int, mechanism: str) -> int:
    return _child_seed(
        master, _MECH_TAG, replica, MECHANISM_ORDER.index(mechanism)
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a market sampler, a replica count, mechanisms to run."""

    market: GenConfig
    replicas: int = 100
    mechanisms: tuple[str, ...] = MECHANISM_ORDER
    master_seed: int = 0
    name: str = "experiment"

    def __post_init__(self):
        # zero replicas is allowed: generate then writes a manifest only
        if self.replicas < 0:
            raise ValueError("replica count cannot be negative")
        for mech in self.mechanisms:
            if mech not in MECHANISMS:
                raise ValueError(f"unknown mechanism {mech!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "master_seed": self.master_seed,
            "replicas": self.replicas,
            "mechanisms": list(self.mechanisms),
            "market": self.market.to_dict(),
        }

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        return ExperimentConfig(
            market=GenConfig.from_dict(d["market"]),
            replicas=d.get("replicas", 100),
            mechanisms=tuple(d.get("mechanisms", MECHANISM_ORDER)),
            master_seed=d.get("master_seed", 0),
            name=d.get("name", "experiment"),
        )

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class RunResult:
    """Audit counts for one (replica, mechanism) run."""

    replica: int
    mechanism: str
    alignment: str
    market_seed: int
    mech_seed: int
    counts: dict[str, int]
    total: int

    def to_dict(self) -> dict:
        return {
            "replica": self.replica,
            "mechanism": self.mechanism,
            "alignment": self.alignment,
            "market_seed": self.market_seed,
            "mech_seed": self.mech_seed,
            "counts": dict(self.counts),
            "total": self.total,
        }

    @staticmethod
    def from_dict(d: dict) -> "RunResult":
        return RunResult(
            replica=d["replica"],
            mechanism=d["mechanism"],
            alignment=d["alignment"],
            market_seed=d["market_seed"],
            mech_seed=d["mech_seed"],
            counts=dict(d["counts"]),
            total=d["total"],
        )


def run_one(market, mechanism: str, seed: int) -> tuple[dict[str, int], int]:
    """Run one mechanism on one market; return its audit counts and total."""
    trace = MECHANISMS[mechanism](market, seed=seed)
    report = audit(market, trace.matching)
    return dict(report.counts), report.total


def _run_replica(config: ExperimentConfig, replica: int) -> list[RunResult]:
    mseed = market_seed(config.master_seed, replica)
    market = generate_market(config.market, seed=mseed)
    errors = [msg for sev, msg in validate_market(market) if sev == "error"]
    if errors:
        raise RuntimeError(f"generated market failed validation: {errors[:3]}")
    out = []
    for mech in config.mechanisms:
        kseed = mechanism_seed(config.master_seed, replica, mech)
        counts, total = run_one(market, mech, kseed)
        out.append(
            RunResult(
                replica=replica,
                mechanism=mech,
                alignment=config.market.alignment,
                market_seed=mseed,
                mech_seed=kseed,
                counts=counts,
                total=total,
            )
        )
    return out


def _run_replica_star(args) -> list[RunResult]:
    config_dict, replica = args
    return _run_replica(ExperimentConfig.from_dict(config_dict), replica)


def run_experiment(
    config: ExperimentConfig, jobs: int = 1, progress=None
) -> list[RunResult]:
    """All replicas x mechanisms, deterministically ordered.

    jobs > 1 fans replicas over processes; results are identical to a serial
    run because every run's seed is derived, not drawn from shared state.
    """
    results: list[RunResult] = []
    if jobs > 1:
        tasks = [(config.to_dict(), i) for i in range(config.replicas)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for i, rows in enumerate(pool.map(_run_replica_star, tasks)):
                results.extend(rows)
                if progress:
                    progress(i + 1, config.replicas)
    else:
        for i in range(config.replicas):
            results.extend(_run_replica(config, i))
            if progress:
                progress(i + 1, config.replicas)
    order = {mech: k for k, mech in enumerate(MECHANISM_ORDER)}
    results.sort(key=lambda r: (r.replica, order[r.mechanism]))
    return results


# -- aggregation -------------------------------------------------------------


@dataclass(frozen=True)
class AggregateRow:
    """Mean and sample std (ddof=1; 0.0 for a single replica) per category."""

    alignment: str
    mechanism: str
    n: int
    means: dict[str, float]
    stds: dict[str, float]


def aggregate(results: list[RunResult]) -> list[AggregateRow]:
    groups: dict[tuple[str, str], list[RunResult]] = {}
    for r in results:
        groups.setdefault((r.alignment, r.mechanism), []).append(r)
    order = {mech: k for k, mech in enumerate(MECHANISM_ORDER)}
    rows = []
    for (alignment, mech) in sorted(groups, key=lambda k: (k[0], order[k[1]])):
        rs = groups[(alignment, mech)]
        means: dict[str, float] = {}
        stds: dict[str, float] = {}
        for cat in BLOCK_CATEGORIES:
            xs = np.array([r.counts[cat] for r in rs], dtype=float)
            means[cat] = float(xs.mean())
            stds[cat] = float(xs.std(ddof=1)) if len(xs) > 1 else 0.0
        totals = np.array([r.total for r in rs], dtype=float)
        means["total"] = float(totals.mean())
        stds["total"] = float(totals.std(ddof=1)) if len(totals) > 1 else 0.0
        rows.append(
            AggregateRow(
                alignment=alignment,
                mechanism=mech,
                n=len(rs),
                means=means,
                stds=stds,
            )
        )
    return rows


def format_cell(mean: float, std: float) -> str:
    """mean to 2 decimals, std to 3, float repr style ("0.0±0.0")."""
    return f"{round(float(mean), 2)}±{round(float(std), 3)}"


def table_csv(rows: list[AggregateRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        [
            "alignment",
            "mechanism",
            "resource",
            "seat",
            "direct_envy",
            "indirect_envy",
            "total_mean",
            "total_std",
        ]
    )
    for row in rows:
        w.writerow(
            [
                row.alignment,
                row.mechanism,
                format_cell(row.means["resource"], row.stds["resource"]),
                format_cell(row.means["seat"], row.stds["seat"]),
                format_cell(row.means["direct_envy"], row.stds["direct_envy"]),
                format_cell(
                    row.means["indirect_envy"], row.stds["indirect_envy"]
                ),
                repr(round(row.means["total"], 6)),
                repr(round(row.stds["total"], 6)),
            ]
        )
    return buf.getvalue()


def table_text(rows: list[AggregateRow]) -> str:
    headers = [
        "alignment",
        "mechanism",
        "resource",
        "seat",
        "direct_envy",
        "indirect_envy",
        "total",
    ]
    body = []
    for row in rows:
        body.append(
            [
                row.alignment,
                row.mechanism,
                format_cell(row.means["resource"], row.stds["resource"]),
                format_cell(row.means["seat"], row.stds["seat"]),
                format_cell(row.means["direct_envy"], row.stds["direct_envy"]),
                format_cell(
                    row.means["indirect_envy"], row.stds["indirect_envy"]
                ),
                format_cell(row.means["total"], row.stds["total"]),
            ]
        )
    widths = [
        max(len(headers[i]), *(len(line[i]) for line in body)) if body else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * widths[i] for i in range(len(headers))),
    ]
    for line in body:
        lines.append("  ".join(line[i].ljust(widths[i]) for i in range(len(headers))))
    return "\n".join(lines) + "\n"


def results_to_json(config: ExperimentConfig, results: list[RunResult]) -> str:
    doc = {
        "digest": config.digest(),
        "config": config.to_dict(),
        "results": [r.to_dict() for r in results],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def results_from_json(text: str) -> tuple[ExperimentConfig, list[RunResult]]:
    doc = json.loads(text)
    config = ExperimentConfig.from_dict(doc["config"])
    return config, [RunResult.from_dict(d) for d in doc["results"]]
