"""
Batch experiments: enumerate structures, build walks, collect statistics.

Rows are produced in enumeration order whatever the worker count, and the
table views format floats with six decimals so repeated runs are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from qwalk.dynamics import concurrent_hitting, default_k_max, expected_hitting, one_shot_hitting
from qwalk.embeddings import RotationSystem, count_rotation_systems, embed, enumerate_rotation_systems
from qwalk.errors import ParameterError, PreconditionError
from qwalk.factorizations import (
    ShuntDecomposition,
    cycle_signature,
    enumerate_shunt_decompositions,
    is_symmetric,
)
from qwalk.graph import Graph, complete_bipartite_graph, complete_graph, parse_graph6, write_graph6
from qwalk.spectral import AverageMixingMatrix, average_mixing_matrix, spectral_decomposition, trace_lower_bound
from qwalk.walks import (
    TransitionUnitary,
    arc_reversal_from_rotation,
    make_coin,
    shunt_basis_arcs,
    shunt_unitary,
    simple_random_walk,
    szegedy_unitary,
)

__all__ = [
    "NAMED_GRAPHS",
    "resolve_graph",
    "worker_count",
    "ordered_map",
    "EmbeddingRow",
    "ShuntRow",
    "embedding_rows",
    "group_embedding_rows",
    "monotonicity_report",
    "shunt_rows",
    "group_shunt_rows",
    "symmetric_max_holds",
    "hitting_record",
    "szegedy_record",
    "mixing_table",
    "format_float",
    "to_csv",
    "to_json",
]

T = TypeVar("T")
R = TypeVar("R")

# Fixed vertex labelings, so reference rotation systems and shunts can be pasted verbatim.
NAMED_GRAPHS: dict[str, Graph] = {
    "K4": complete_graph(4),
    "K33": complete_bipartite_graph(3, 3),
    "K2xK3": Graph.from_edges(6, [(0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (1, 5), (2, 4), (2, 5), (3, 5)]),
    "Q3": Graph.from_edges(8, [(0, 4), (0, 5), (0, 6), (1, 4), (1, 5), (1, 7),
                               (2, 4), (2, 6), (2, 7), (3, 5), (3, 6), (3, 7)]),
    "GCrb`o": parse_graph6("GCrb`o"),
    "GCZJd_": parse_graph6("GCZJd_"),
    "GCXmd_": parse_graph6("GCXmd_"),
    "GCY^B_": parse_graph6("GCY^B_"),
}


def resolve_graph(source: str) -> Graph:
    """A named graph from :data:`NAMED_GRAPHS`, ``@path`` to a graph6 file, or graph6."""
    if source in NAMED_GRAPHS:
        return NAMED_GRAPHS[source]
    if source.startswith("@"):
        text = Path(source[1:]).read_text()
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if len(lines) != 1:
            raise ParameterError(f"{source[1:]} must hold exactly one graph6 line")
        return parse_graph6(lines[0])
    return parse_graph6(source)


def worker_count() -> int:
    env = os.environ.get("QWALK_THREADS")
    if env:
        try:
            k = int(env)
        except ValueError:
            raise ParameterError("QWALK_THREADS must be an integer") from None
        return max(1, k)
    return os.cpu_count() or 1


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """Map with a thread pool, results in input order."""
    threads = worker_count() if threads is None else threads
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def format_float(x: float, raw: bool = False) -> str:
    """Six decimals for tables, 17 significant digits for raw output."""
    return format(x, ".17g") if raw else f"{x:.6f}"


# --------------------------------------------------------------------------
# rotation systems
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingRow:
    index: int
    rotation: RotationSystem
    genus: int
    trace: float
    total_entropy: float
    groups: int
    trace_lower_bound: float


def _analyze(u: TransitionUnitary) -> tuple[AverageMixingMatrix, object]:
    sd = spectral_decomposition(u)
    return average_mixing_matrix(sd), sd


def embedding_rows(g: Graph, coin_kind: str = "circulant7", threads: int | None = None) -> list[EmbeddingRow]:
    """One row per rotation system of ``g`` with the arc-reversal walk statistics."""
    d = g.regular_degree()
    if d is None:
        raise PreconditionError("rotation-system walks need a regular graph")
    coin = make_coin(coin_kind, d)
    if not g.is_connected():
        raise PreconditionError("graph must be connected")

    def work(item):
        i, rot = item
        emb = embed(g, rot)
        amm, sd = _analyze(arc_reversal_from_rotation(g, rot, coin))
        return EmbeddingRow(i, rot, emb.genus, amm.trace, amm.total_entropy, len(sd), trace_lower_bound(sd))

    return ordered_map(work, enumerate(enumerate_rotation_systems(g)), threads)


def group_embedding_rows(rows: Sequence[EmbeddingRow]) -> list[tuple[int, float, int]]:
    """``(genus, trace rounded to 6 places, count)``, by genus then decreasing trace."""
    counts: dict[tuple[int, float], int] = defaultdict(int)
    for r in rows:
        counts[(r.genus, round(r.trace, 6))] += 1
    return sorted(((g, t, c) for (g, t), c in counts.items()), key=lambda x: (x[0], -x[1]))


def monotonicity_report(rows: Sequence[EmbeddingRow]) -> dict:
    """Per genus the trace range, and whether min(genus g) > max(genus g+1) throughout."""
    by_genus: dict[int, list[float]] = defaultdict(list)
    for r in rows:
        by_genus[r.genus].append(r.trace)
    ranges = {g: (min(ts), max(ts)) for g, ts in sorted(by_genus.items())}
    genera = sorted(ranges)
    holds = all(ranges[a][0] > ranges[b][1] for a, b in zip(genera, genera[1:]))
    return {"ranges": ranges, "monotone": holds}


# --------------------------------------------------------------------------
# shunt-decompositions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ShuntRow:
    index: int
    decomposition: ShuntDecomposition
    signature: str
    symmetric: bool
    trace: float
    total_entropy: float


def shunt_rows(g: Graph, coin_kind: str = "gauss", threads: int | None = None) -> list[ShuntRow]:
    d = g.regular_degree()
    if d is None:
        raise PreconditionError("shunt-decompositions need a regular graph")
    coin = make_coin(coin_kind, d)

    def work(item):
        i, dec = item
        amm, _ = _analyze(shunt_unitary(g, dec, coin))
        return ShuntRow(i, dec, cycle_signature(dec), is_symmetric(dec), amm.trace, amm.total_entropy)

    return ordered_map(work, enumerate(enumerate_shunt_decompositions(g)), threads)


def group_shunt_rows(rows: Sequence[ShuntRow]) -> list[dict]:
    """Per cycle signature: trace range, count and the first decomposition seen."""
    groups: dict[str, list[ShuntRow]] = defaultdict(list)
    for r in rows:
        groups[r.signature].append(r)
    out = []
    for sig, rs in groups.items():
        ts = [r.trace for r in rs]
        out.append({
            "signature": sig,
            "symmetric": rs[0].symmetric,
            "count": len(rs),
            "trace_min": min(ts),
            "trace_max": max(ts),
            "representative": rs[0].decomposition.cycle_notation(),
        })
    out.sort(key=lambda x: (x["trace_max"], x["signature"]))
    return out


def symmetric_max_holds(rows: Sequence[ShuntRow], tol: float = 1e-9) -> bool | None:
    """Whether a symmetric decomposition attains the maximum trace; ``None`` if none exists."""
    sym = [r.trace for r in rows if r.symmetric]
    if not sym:
        return None
    return max(sym) >= max(r.trace for r in rows) - tol


# --------------------------------------------------------------------------
# single-walk records
# --------------------------------------------------------------------------

def _arc_state(u: TransitionUnitary, arc: tuple[int, int], arc_labels) -> np.ndarray:
    try:
        i = arc_labels.index(tuple(arc))
    except ValueError:
        raise ParameterError(f"{arc} is not an arc of the walk") from None
    x = np.zeros(u.dim, dtype=complex)
    x[i] = 1.0
    return x


def hitting_record(u: TransitionUnitary, g: Graph, structure_id: str, src, dst, eps: float,
                   arc_labels=None, k_max: int | None = None) -> dict:
    """Hitting times from arc ``src`` to arc ``dst`` in the three senses."""
    labels = list(u.basis) if arc_labels is None else list(arc_labels)
    x = _arc_state(u, src, labels)
    y = _arc_state(u, dst, labels)
    k_max = default_k_max(u.dim) if k_max is None else k_max
    est = expected_hitting(u, x, y, k_max=k_max)
    return {
        "model": u.model,
        "graph6": write_graph6(g),
        "structure_id": structure_id,
        "x": {"arc": list(src)},
        "y": {"arc": list(dst)},
        "eps": eps,
        "value": {
            "one_shot": one_shot_hitting(u, x, y, eps, k_max),
            "concurrent": concurrent_hitting(u, x, y, eps, k_max),
            "expected": est.value,
        },
        "flags": {
            "expected_converged": est.converged,
            "truncation_bound": est.truncation_bound,
            "k_max": k_max,
        },
    }


def szegedy_record(g: Graph, src=None, dst=None, eps: float = 0.1, order: str = "r2r1") -> dict:
    """Summary of the two-reflection walk of the simple random walk on ``g``."""
    u = szegedy_unitary(simple_random_walk(g), order=order)
    amm, sd = _analyze(u)
    hit = None
    if src is not None and dst is not None:
        for arc in (src, dst):
            if not g.has_edge(*arc):
                raise ParameterError(f"{tuple(arc)} is not an arc of the graph")
        hit = hitting_record(u, g, "simple-random-walk", tuple(src), tuple(dst), eps)
    return {
        "graph6": write_graph6(g),
        "order": order,
        "unitary": {"dim": u.dim, "support": len(u.support), "unitarity_defect": u.defect()},
        "mixing": {
            "trace": amm.trace,
            "total_entropy": amm.total_entropy,
            "walk_regular": amm.walk_regular,
            "uniform": amm.uniform,
            "trace_lower_bound": trace_lower_bound(sd),
            "groups": len(sd),
        },
        "hitting": hit,
    }


def mixing_table(u: TransitionUnitary, labels=None, raw: bool = True) -> tuple[list[str], list[list[str]], AverageMixingMatrix]:
    """Arc-labelled rows of the average mixing matrix."""
    amm, _ = _analyze(u)
    labels = list(u.basis) if labels is None else list(labels)
    names = ["-".join(map(str, lab)) if isinstance(lab, tuple) else str(lab) for lab in labels]
    header = ["arc"] + names
    body = [[names[i]] + [format_float(v, raw) for v in row] for i, row in enumerate(amm.matrix)]
    return header, body, amm


def shunt_arc_labels(dec: ShuntDecomposition) -> list[tuple[int, int]]:
    return shunt_basis_arcs(dec)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def count_check(g: Graph, rows: Sequence[EmbeddingRow]) -> bool:
    return len(rows) == count_rotation_systems(g)
