"""Plain-text formats.

Graph files: first non-comment line ``n m``, then ``m`` lines ``u v`` with
``0 <= u < v < n`` in ascending lexicographic order. Lines starting with ``#``
are comments. ASCII, newline-terminated.
"""

from __future__ import annotations

import csv
import json
from itertools import combinations
from pathlib import Path
from typing import Iterable

import numpy as np

from .graph import Graph, pair_index
from .rigidity import ClosureReport
from .thresholds import PhaseRow


class GraphFormatError(ValueError):
    pass


def format_graph(g: Graph, comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"{g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def write_graph(path, g: Graph, comments: Iterable[str] = ()) -> None:
    Path(path).write_text(format_graph(g, comments), encoding="ascii")


def parse_graph(text: str) -> Graph:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected two integers")
        try:
            rows.append((lineno, int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphFormatError(f"line {lineno}: expected two integers") from None
    if not rows:
        raise GraphFormatError("missing header line 'n m'")
    _, n, m = rows[0]
    if n < 0 or m < 0:
        raise GraphFormatError("header values must be non-negative")
    body = rows[1:]
    if len(body) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(body)}")
    prev = None
    for lineno, u, v in body:
        if not 0 <= u < v < n:
            raise GraphFormatError(f"line {lineno}: need 0 <= u < v < {n}")
        if prev is not None and (u, v) <= prev:
            raise GraphFormatError(f"line {lineno}: edges must be strictly ascending")
        prev = (u, v)
    return Graph(n, [(u, v) for _, u, v in body])


def read_graph(path) -> Graph:
    try:
        text = Path(path).read_text(encoding="ascii")
    except UnicodeDecodeError as exc:
        raise GraphFormatError(f"{path}: not ASCII") from exc
    return parse_graph(text)


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def write_closure_report(path, report: ClosureReport) -> Path:
    """CSV ``u,v,member`` over the report's domain plus a JSON sidecar; returns the sidecar."""
    path = Path(path)
    inside = set(combinations(sorted(report.contracted), 2))
    with path.open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v", "member"])
        for u in range(report.n):
            for v in range(u + 1, report.n):
                if (u, v) in inside:
                    continue
                w.writerow([u, v, int(report.member[pair_index(u, v)])])
    side = sidecar_path(path)
    meta = {"n": report.n, "d": report.d, "contracted": sorted(report.contracted),
            "base_rank": report.base_rank, "embedding_seed": report.embedding_seed}
    side.write_text(json.dumps(meta) + "\n", encoding="ascii")
    return side


def read_closure_report(path) -> ClosureReport:
    path = Path(path)
    meta = json.loads(sidecar_path(path).read_text())
    n = meta["n"]
    member = np.zeros(n * (n - 1) // 2, bool)
    with path.open(newline="") as fh:
        for row in csv.DictReader(fh):
            member[pair_index(int(row["u"]), int(row["v"]))] = row["member"] == "1"
    return ClosureReport(n, meta["d"], frozenset(meta["contracted"]), member,
                         meta["base_rank"], meta["embedding_seed"])


def fmt12(x: float) -> str:
    return format(x, ".12g")


def write_phase_csv(path, rows: list[PhaseRow]) -> None:
    with Path(path).open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["c", "a_c", "half_c", "predicted", "regime"])
        for r in rows:
            w.writerow([fmt12(r.c), fmt12(r.a_c), fmt12(r.half_c), fmt12(r.predicted),
                        r.regime.value])
