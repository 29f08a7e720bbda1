"""Seeded Monte Carlo experiments on G(n, p).

Trial ``i`` draws everything from substreams of ``derive_seed(master_seed, i)``,
so records do not depend on how trials are scheduled. Exact facts (the
record inequalities) are hard assertions; the asymptotic statements are only
measured and summarized.
"""

from __future__ import annotations

import json
import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

import numpy as np

from .constructions import bootstrap_clique
from .graph import Graph, gnp_sample, min_degree
from .rigidity import (DEFAULT_SEED, ClosureReport, Embedding, contracted_closure,
                       edge_criterion_dmax, generic_rank_formula, is_d_rigid, probe_seed,
                       search_max_rigid_dim)
from .rng import RngStream, derive_seed
from .thresholds import a_of_c, c_of, p_of, predicted_dmax


class Check(str, Enum):
    DELTA_RIGIDITY = "DeltaRigidity"
    EDGE_CRITERION = "EdgeCriterion"
    CLOSURE_DENSITY = "ClosureDensity"
    MIN_DEGREE_CONCENTRATION = "MinDegreeConcentration"
    BOOTSTRAP_SUCCESS = "BootstrapSuccess"


DEFAULT_CHECKS = frozenset({Check.DELTA_RIGIDITY, Check.EDGE_CRITERION, Check.BOOTSTRAP_SUCCESS})


class InvariantViolation(AssertionError):
    """An exact inequality failed inside a trial (bug or randomized-rank failure)."""


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    p: float
    trials: int = 1
    master_seed: int = DEFAULT_SEED
    # "binary" or an explicit tuple of dimensions to probe
    d_grid: str | tuple[int, ...] = "binary"
    checks: frozenset[Check] = DEFAULT_CHECKS
    repeats: int = 1
    bootstrap_d: int | None = None
    density_d: int | None = None
    density_a_size: int | None = None
    record_timings: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.d_grid != "binary" and not isinstance(self.d_grid, tuple):
            raise ValueError("d_grid is 'binary' or a tuple of dimensions")
        object.__setattr__(self, "checks", frozenset(Check(c) for c in self.checks))

    @classmethod
    def from_c(cls, n: int, c: float, **kw) -> "ExperimentConfig":
        return cls(n=n, p=min(1.0, p_of(n, c)), **kw)

    @property
    def c(self) -> float:
        return c_of(self.n, self.p)


def full_grid(n: int) -> tuple[int, ...]:
    return tuple(range(1, n))


@dataclass
class TrialRecord:
    trial_index: int
    derived_seed: int
    n: int
    p: float
    c: float
    delta: int
    edges: int
    d_max: int | None
    d_pred: dict | None
    edge_criterion_dmax: int
    delta_rigid: bool | None
    bootstrap_certified_d: int | None
    closure_density: int | None
    elapsed_ms: dict | None
    probes: list = field(default_factory=list)
    bootstrap_target_d: int | None = None
    bootstrap_target_ok: bool | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    def verdict(self, d: int) -> bool:
        """Measured d-rigidity: a direct probe when one exists, else d <= d_max."""
        for pd, ok in self.probes:
            if pd == d:
                return ok
        return self.d_max is not None and d <= self.d_max


def closure_density_probe(g: Graph, d: int, a: Iterable[int], emb: Embedding | None = None,
                          *, seed: int = DEFAULT_SEED) -> int:
    """Size of the contracted closure C_{d,A}(g)."""
    a = frozenset(a)
    if len(a) > 0.9 * g.n:
        raise ValueError("contracted set larger than 0.9 n")
    return contracted_closure(g, d, a, emb, seed=seed).member_count


def _explicit_search(g: Graph, grid: tuple[int, ...], emb_seed: int, repeats: int):
    probes = []
    for d in sorted(set(grid)):
        if not 1 <= d <= g.n - 1:
            continue
        probes.append((d, is_d_rigid(g, d, seed=probe_seed(emb_seed, d), repeats=repeats)))
    rigid = [d for d, ok in probes if ok]
    d_max = max(rigid, default=0)
    if any(not ok for d, ok in probes if d <= d_max):
        raise InvariantViolation("rigidity verdicts are not monotone in d")
    return d_max, probes


def run_trial(cfg: ExperimentConfig, trial_index: int) -> TrialRecord:
    seed = derive_seed(cfg.master_seed, trial_index)
    emb_seed = derive_seed(seed, "embedding")
    times: dict[str, float] = {}
    t0 = time.perf_counter()
    g = gnp_sample(cfg.n, cfg.p, RngStream(derive_seed(seed, "graph")))
    times["sample"] = time.perf_counter() - t0
    delta = min_degree(g)
    edge_dmax = edge_criterion_dmax(g.n, g.m)
    pred = predicted_dmax(cfg.n, cfg.p).as_dict() if 0 < cfg.p < 1 else None
    rec = TrialRecord(trial_index, seed, cfg.n, cfg.p, cfg.c, delta, g.m, None, pred,
                      edge_dmax, None, None, None, None)

    need_dmax = cfg.checks & {Check.DELTA_RIGIDITY, Check.EDGE_CRITERION, Check.BOOTSTRAP_SUCCESS}
    if need_dmax:
        t0 = time.perf_counter()
        if cfg.d_grid == "binary":
            search = search_max_rigid_dim(g, emb_seed, cfg.repeats)
            rec.d_max, rec.probes = search.d_max, [list(p) for p in search.probes]
        else:
            d_max, probes = _explicit_search(g, cfg.d_grid, emb_seed, cfg.repeats)
            rec.d_max, rec.probes = d_max, [list(p) for p in probes]
        times["d_max"] = time.perf_counter() - t0
        if rec.d_max > delta:
            raise InvariantViolation(f"trial {trial_index}: d_max {rec.d_max} > delta {delta}")
        if rec.d_max > edge_dmax:
            raise InvariantViolation(f"trial {trial_index}: d_max {rec.d_max} > edge bound {edge_dmax}")

    if Check.DELTA_RIGIDITY in cfg.checks:
        t0 = time.perf_counter()
        # a 0-rigidity question is vacuous; report it as attained
        rec.delta_rigid = True if delta == 0 else is_d_rigid(
            g, delta, seed=probe_seed(emb_seed, delta), repeats=cfg.repeats)
        times["delta_rigid"] = time.perf_counter() - t0

    if Check.BOOTSTRAP_SUCCESS in cfg.checks:
        t0 = time.perf_counter()
        _bootstrap(cfg, g, rec, emb_seed)
        times["bootstrap"] = time.perf_counter() - t0

    if Check.CLOSURE_DENSITY in cfg.checks:
        t0 = time.perf_counter()
        d = cfg.density_d if cfg.density_d is not None else max(1, math.floor(0.3 * cfg.n * cfg.p))
        size = cfg.density_a_size if cfg.density_a_size is not None else cfg.n // 2
        perm = np.argsort(RngStream(derive_seed(seed, "density")).uniform(cfg.n), kind="stable")
        a = [int(v) for v in perm[:size]]
        rec.closure_density = closure_density_probe(g, d, a, seed=probe_seed(emb_seed, d))
        times["closure_density"] = time.perf_counter() - t0

    if cfg.record_timings:
        rec.elapsed_ms = {k: round(v * 1000.0, 3) for k, v in times.items()}
    return rec


def _bootstrap(cfg: ExperimentConfig, g: Graph, rec: TrialRecord, emb_seed: int) -> None:
    dims = set()
    if rec.d_max:
        dims.add(rec.d_max)
    if cfg.bootstrap_d is not None and 1 <= cfg.bootstrap_d <= g.n - 1:
        dims.add(cfg.bootstrap_d)
        rec.bootstrap_target_d = cfg.bootstrap_d
    certified = 0
    for d in sorted(dims, reverse=True):
        seed = probe_seed(emb_seed, d)
        # a rigid probe already certifies a complete closure; skip recomputing it
        report = _complete_report(g.n, d, seed) if _probed_rigid(rec, d) else None
        log = bootstrap_clique(g, d, seed, report=report)
        if d == cfg.bootstrap_d:
            rec.bootstrap_target_ok = log.success
        if log.success:
            if not rec.verdict(d) and not is_d_rigid(g, d, seed=probe_seed(emb_seed, d)):
                raise InvariantViolation(f"bootstrap certified d={d} against a flexible rank verdict")
            certified = max(certified, d)
    rec.bootstrap_certified_d = certified
    if rec.d_max is not None and certified > rec.d_max:
        raise InvariantViolation(
            f"trial {rec.trial_index}: bootstrap certified {certified} > d_max {rec.d_max}")


def _probed_rigid(rec: TrialRecord, d: int) -> bool:
    return any(pd == d and ok for pd, ok in rec.probes)


def _complete_report(n: int, d: int, seed: int) -> ClosureReport:
    return ClosureReport(n, d, frozenset(), np.ones(n * (n - 1) // 2, bool),
                         generic_rank_formula(n, d), seed)


def _threads() -> int:
    env = os.environ.get("RIGOR_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord]
    summary: dict

    def write(self, records_path, summary_path=None) -> None:
        records_path = Path(records_path)
        with records_path.open("w", encoding="ascii") as fh:
            for r in self.records:
                fh.write(r.to_json() + "\n")
        if summary_path is not None:
            Path(summary_path).write_text(json.dumps(self.summary, indent=2) + "\n")


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    workers = min(cfg.trials, threads or _threads())
    if workers <= 1:
        records = [run_trial(cfg, i) for i in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda i: run_trial(cfg, i), range(cfg.trials)))
    return ExperimentResult(cfg, records, summarize(cfg, records))


def _mean_std(xs: list[float]) -> tuple[float | None, float | None]:
    if not xs:
        return None, None
    return statistics.fmean(xs), (statistics.pstdev(xs) if len(xs) > 1 else 0.0)


def summarize(cfg: ExperimentConfig, records: list[TrialRecord]) -> dict:
    n = cfg.n
    with_dmax = [r for r in records if r.d_max is not None]
    ratios = [r.d_max / r.d_pred["predicted_d"] for r in with_dmax
              if r.d_pred and r.d_pred["predicted_d"] > 0]
    ratio_mean, ratio_std = _mean_std(ratios)
    delta_flags = [r.delta_rigid for r in records if r.delta_rigid is not None]
    disagreements = []
    for r in with_dmax:
        for d in range(1, n):
            rigid = r.verdict(d)
            crit = r.edges >= d * n - d * (d + 1) // 2
            if rigid != crit:
                disagreements.append([r.trial_index, d, rigid, crit])
    pairs = len(with_dmax) * (n - 1)
    boot = [r for r in records if r.bootstrap_certified_d is not None]
    if cfg.bootstrap_d is not None:
        flags = [r.bootstrap_target_ok for r in boot if r.bootstrap_target_ok is not None]
    else:
        flags = [r.bootstrap_certified_d == r.d_max for r in boot if r.d_max]
    dens = [r.closure_density for r in records if r.closure_density is not None]
    return {
        "n": n,
        "p": cfg.p,
        "c": cfg.c,
        "trials": len(records),
        "master_seed": cfg.master_seed,
        "a_c": a_of_c(cfg.c) if cfg.c > 1 else None,
        "predicted": records[0].d_pred if records else None,
        "mean_delta": statistics.fmean(r.delta for r in records),
        "mean_edges": statistics.fmean(r.edges for r in records),
        "mean_d_max": statistics.fmean(r.d_max for r in with_dmax) if with_dmax else None,
        "delta_rigid_fraction": (sum(delta_flags) / len(delta_flags)) if delta_flags else None,
        "dmax_equals_delta_fraction": (sum(r.d_max == r.delta for r in with_dmax) / len(with_dmax)
                                       if with_dmax else None),
        "ratio_mean": ratio_mean,
        "ratio_std": ratio_std,
        "edge_agreement_rate": (sum(r.d_max == r.edge_criterion_dmax for r in with_dmax)
                                / len(with_dmax) if with_dmax else None),
        "pair_agreement_rate": (1 - len(disagreements) / pairs) if pairs else None,
        "disagreements": disagreements,
        "bootstrap_target_d": cfg.bootstrap_d,
        "bootstrap_success_rate": (sum(flags) / len(flags)) if flags else None,
        "closure_density_mean": statistics.fmean(dens) if dens else None,
    }


def min_degree_concentration(n: int, c: float, trials: int,
                             master_seed: int = DEFAULT_SEED) -> dict:
    """Empirical distribution of delta(G) / log n for G(n, c log n / (n-1))."""
    if n < 2 or trials < 1:
        raise ValueError("need n >= 2 and trials >= 1")
    p = min(1.0, p_of(n, c))
    log_n = math.log(n)
    deltas = []
    for i in range(trials):
        seed = derive_seed(master_seed, i)
        g = gnp_sample(n, p, RngStream(derive_seed(seed, "graph")))
        deltas.append(min_degree(g))
    normalized = [x / log_n for x in deltas]
    mean, std = _mean_std(normalized)
    return {"n": n, "c": c, "p": p, "trials": trials,
            "a_c": a_of_c(c) if c > 1 else None,
            "mean": mean, "std": std, "deltas": deltas, "normalized": normalized}
