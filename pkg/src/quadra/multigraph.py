"""Multigraph view of a polynomial: one vertex per variable, one edge per
variable pair per monomial."""

from __future__ import annotations

import json
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

from .pbf import Pbf

Edge = tuple[int, int]


@dataclass(frozen=True)
class MultiGraph:
    num_vertices: int
    edges: Mapping[Edge, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean: dict[Edge, int] = {}
        for (a, b), beta in self.edges.items():
            if a == b:
                raise ValueError(f"self-loop on vertex {a}")
            if beta < 1:
                raise ValueError(f"multiplicity {beta} < 1 for edge {(a, b)}")
            if not (0 <= min(a, b) and max(a, b) < self.num_vertices):
                raise ValueError(f"edge {(a, b)} out of range")
            clean[(min(a, b), max(a, b))] = beta
        object.__setattr__(self, "edges", {e: clean[e] for e in sorted(clean)})

    def multiplicity(self, a: int, b: int) -> int:
        return self.edges.get((min(a, b), max(a, b)), 0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "num_vertices": self.num_vertices,
            "edges": [{"u": a, "v": b, "multiplicity": m} for (a, b), m in self.edges.items()],
        }

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class GraphStats:
    total_edge_count: int
    multi_edge_mass: int
    max_multiplicity: int
    vertex_degrees: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "total_edge_count": self.total_edge_count,
            "multi_edge_mass": self.multi_edge_mass,
            "max_multiplicity": self.max_multiplicity,
            "vertex_degrees": list(self.vertex_degrees),
        }


def build_graph(f: Pbf) -> MultiGraph:
    counts: Counter[Edge] = Counter()
    for key, _ in f.items():
        if len(key) >= 2:
            counts.update(combinations(key, 2))
    return MultiGraph(f.num_vars, dict(counts))


def graph_stats(g: MultiGraph) -> GraphStats:
    degrees = [0] * g.num_vertices
    for (a, b), beta in g.edges.items():
        degrees[a] += beta
        degrees[b] += beta
    betas = list(g.edges.values())
    return GraphStats(
        total_edge_count=sum(betas),
        multi_edge_mass=sum(b for b in betas if b >= 2),
        max_multiplicity=max(betas, default=0),
        vertex_degrees=tuple(degrees),
    )


def has_multi_edges(g: MultiGraph) -> bool:
    return any(beta >= 2 for beta in g.edges.values())


def export_dot(g: MultiGraph, labels: Sequence[str] | None = None) -> str:
    """Graphviz text; an edge of multiplicity beta is written beta times."""
    if labels is not None and len(labels) < g.num_vertices:
        raise ValueError("fewer labels than vertices")

    def name(v: int) -> str:
        return f"v{v}"

    lines = ["graph G {"]
    for v in range(g.num_vertices):
        label = labels[v] if labels is not None else f"v{v}"
        lines.append(f'  {name(v)} [label="{label}"];')
    for (a, b), beta in g.edges.items():
        lines.extend(f"  {name(a)} -- {name(b)};" for _ in range(beta))
    lines.append("}")
    return "\n".join(lines) + "\n"
