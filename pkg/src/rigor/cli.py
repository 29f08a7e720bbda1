"""Command-line front end.

Exit codes: 0 success, 1 usage or domain error, 2 I/O or data error. Every
subcommand prints the resolved seed on its first line.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import io
from .constructions import bootstrap_clique, build_matching_gadget
from .experiments import (Check, ExperimentConfig, full_grid, min_degree_concentration,
                          run_experiment)
from .graph import gnp_sample, min_degree
from .rigidity import (DEFAULT_SEED, best_rank, closure, contracted_closure,
                       generic_rank_formula, globally_rigid_cert, search_max_rigid_dim)
from .rng import RngStream, derive_seed
from .thresholds import a_of_c, c_star, phase_diagram, phi, regime_of

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_graph(path):
    try:
        return io.read_graph(path)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read graph {path}: {exc}") from exc


def _summary_path(out: Path) -> Path:
    name = out.name[: -len(".jsonl")] if out.name.endswith(".jsonl") else out.stem
    return out.with_name(name + ".summary.json")


def cmd_rank(args) -> int:
    g = _load_graph(args.graph)
    r = best_rank(g, args.dim, args.seed, args.repeats)
    gen = generic_rank_formula(g.n, args.dim)
    print(f"rank={r} generic={gen} verdict={'Rigid' if r == gen else 'Flexible'}")
    return 0


def _parse_contract(text, n):
    if not text:
        return frozenset()
    try:
        vs = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise DataError(f"bad --contract list {text!r}") from None
    if len(set(vs)) != len(vs) or any(not 0 <= v < n for v in vs):
        raise DataError("--contract must list distinct valid vertices")
    return frozenset(vs)


def cmd_closure(args) -> int:
    g = _load_graph(args.graph)
    a = _parse_contract(args.contract, g.n)
    rep = contracted_closure(g, args.dim, a, seed=args.seed) if a else closure(g, args.dim, seed=args.seed)
    try:
        side = io.write_closure_report(args.out, rep)
    except OSError as exc:
        raise DataError(str(exc)) from exc
    print(f"members={rep.member_count} base_rank={rep.base_rank}")
    print(f"wrote {args.out} {side}")
    return 0


def cmd_maxdim(args) -> int:
    g = _load_graph(args.graph)
    s = search_max_rigid_dim(g, args.seed, args.repeats)
    print(f"d_max={s.d_max} delta={min_degree(g)} upper_bound={s.upper_bound}")
    print("probes=" + ",".join(f"{d}:{'R' if ok else 'F'}" for d, ok in s.probes))
    if s.d_max >= 2:
        cert = globally_rigid_cert(g, s.d_max - 1, args.seed, args.repeats)
        print(f"globally_rigid_dim>={s.d_max - 1} status={cert.status}")
    return 0


def cmd_bootstrap(args) -> int:
    g = _load_graph(args.graph)
    log = bootstrap_clique(g, args.dim, args.seed, match_in=args.match_in)
    print(f"success={log.success} clique={len(log.clique)} events={len(log.events)}")
    if args.out:
        try:
            Path(args.out).write_text(log.to_json() + "\n")
        except OSError as exc:
            raise DataError(str(exc)) from exc
    return 0


def _c_grid(c_min, c_max, steps):
    if steps == 1:
        return [c_min]
    h = (c_max - c_min) / (steps - 1)
    return [c_min + i * h if i < steps - 1 else c_max for i in range(steps)]


def cmd_scan(args) -> int:
    if args.n < 2 or args.trials < 1 or args.steps < 1 or args.c_min > args.c_max:
        raise UsageError("need n >= 2, trials >= 1, steps >= 1 and c-min <= c-max")
    checks = frozenset(Check(c) for c in args.checks.split(","))
    out = Path(args.out)
    summaries = []
    try:
        fh = out.open("w", encoding="ascii")
    except OSError as exc:
        raise DataError(str(exc)) from exc
    with fh:
        for i, c in enumerate(_c_grid(args.c_min, args.c_max, args.steps)):
            p = c * math.log(args.n) / (args.n - 1)
            if not 0 < p <= 1:
                raise UsageError(f"c={c} gives edge probability {p} outside (0, 1]")
            cfg = ExperimentConfig(
                n=args.n, p=p, trials=args.trials, master_seed=derive_seed(args.seed, "scan", i),
                d_grid=full_grid(args.n) if args.full_grid else "binary", checks=checks,
                repeats=args.repeats, bootstrap_d=args.bootstrap_d)
            res = run_experiment(cfg)
            for r in res.records:
                fh.write(r.to_json() + "\n")
            s = dict(res.summary, grid_index=i)
            summaries.append(s)
            print(f"c={c:.6g} trials={s['trials']} mean_delta={s['mean_delta']:.4g} "
                  f"mean_d_max={_fmt(s['mean_d_max'])} "
                  f"delta_rigid={_fmt(s['delta_rigid_fraction'])} "
                  f"edge_agreement={_fmt(s['edge_agreement_rate'])}")
    try:
        _summary_path(out).write_text(json.dumps(summaries, indent=2) + "\n")
    except OSError as exc:
        raise DataError(str(exc)) from exc
    return 0


def _fmt(x):
    return "na" if x is None else f"{x:.4g}"


def cmd_thresholds(args) -> int:
    if args.phase:
        try:
            rows = phase_diagram(args.c_min, args.c_max, args.steps)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if not args.out:
            raise UsageError("--phase needs --out")
        try:
            io.write_phase_csv(args.out, rows)
        except OSError as exc:
            raise DataError(str(exc)) from exc
        print(f"wrote {len(rows)} rows to {args.out}")
        return 0
    if args.c is None:
        raise UsageError("give --c or --phase")
    if not args.c > 1:
        raise UsageError(f"a(c) needs c > 1, got {args.c}")
    a = a_of_c(args.c)
    print(f"a={io.fmt12(a)} c_half={io.fmt12(args.c / 2)} regime={regime_of(args.c).value} "
          f"c_star={io.fmt12(c_star())}")
    if args.t is not None:
        if not args.t > 0:
            raise UsageError("--t must be positive")
        print(f"phi={io.fmt12(phi(args.c, args.t))}")
    return 0


def cmd_gadget(args) -> int:
    if args.dim < 1:
        raise UsageError("--dim must be at least 1")
    gad = build_matching_gadget(args.dim)
    b = gad.half
    comments = [f"matching gadget d={args.dim}",
                f"left half: 0..{b - 1}; right half: {b}..{2 * b - 1}; matched pairs (k, {b}+k)"]
    try:
        io.write_graph(args.out, gad.graph, comments)
    except OSError as exc:
        raise DataError(str(exc)) from exc
    print(f"n={gad.graph.n} m={gad.graph.m} cross={len(gad.cross_edges())}")
    return 0


def cmd_gnp(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    if not 0 <= args.p <= 1:
        raise UsageError("--p must lie in [0, 1]")
    g = gnp_sample(args.n, args.p, RngStream(args.seed))
    try:
        io.write_graph(args.out, g, [f"G(n={args.n}, p={args.p!r}) seed={args.seed}"])
    except OSError as exc:
        raise DataError(str(exc)) from exc
    print(f"n={g.n} m={g.m} min_degree={min_degree(g)}")
    return 0


def cmd_concentration(args) -> int:
    res = min_degree_concentration(args.n, args.c, args.trials, args.seed)
    print(f"mean={io.fmt12(res['mean'])} std={io.fmt12(res['std'])} "
          f"a_c={'na' if res['a_c'] is None else io.fmt12(res['a_c'])}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rigor", description="Generic rigidity of random graphs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.set_defaults(func=func)
        return sp

    sp = add("rank", cmd_rank, "rigidity-matrix rank and verdict")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--repeats", type=int, default=1)

    sp = add("closure", cmd_closure, "d-rigidity closure, optionally contracted")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--contract", default="")
    sp.add_argument("--out", required=True)

    sp = add("maxdim", cmd_maxdim, "largest d with the graph d-rigid")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--repeats", type=int, default=1)

    sp = add("bootstrap", cmd_bootstrap, "clique bootstrap certifier")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--match-in", choices=["closure", "graph"], default="closure")
    sp.add_argument("--out")

    sp = add("scan", cmd_scan, "Monte Carlo scan over c")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--c-min", type=float, required=True)
    sp.add_argument("--c-max", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--checks", default="DeltaRigidity,EdgeCriterion,BootstrapSuccess")
    sp.add_argument("--full-grid", action="store_true",
                    help="probe every d in 1..n-1 instead of binary search")
    sp.add_argument("--repeats", type=int, default=1)
    sp.add_argument("--bootstrap-d", type=int)

    sp = add("thresholds", cmd_thresholds, "a(c), phi and the phase table")
    sp.add_argument("--c", type=float)
    sp.add_argument("--t", type=float)
    sp.add_argument("--phase", action="store_true")
    sp.add_argument("--c-min", type=float, default=1.5)
    sp.add_argument("--c-max", type=float, default=10.0)
    sp.add_argument("--steps", type=int, default=81)
    sp.add_argument("--out")

    sp = add("gadget", cmd_gadget, "write the matching gadget graph")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--out", required=True)

    sp = add("gnp", cmd_gnp, "sample G(n, p)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--out", required=True)

    sp = add("concentration", cmd_concentration, "minimum degree of G(n, c log n / n)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--trials", type=int, default=50)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    print(f"seed={args.seed}")
    try:
        if getattr(args, "dim", 1) is not None and getattr(args, "dim", 1) < 1:
            raise UsageError("--dim must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"rigor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"rigor: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"rigor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
