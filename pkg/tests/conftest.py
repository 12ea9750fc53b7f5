import random

import pytest

from quadra.multigraph import build_graph, graph_stats
from quadra.pbf import Pbf, normalize, random_pbf
from quadra.reduce import ReductionResult, replay

# Two-step worked example; y1 and y2 are variables 4 and 5.
Y1, Y2 = 4, 5


@pytest.fixture
def f1() -> Pbf:
    return normalize({(0, 1): 1, (0, 1, 2): 1, (0, 1, 3): 1, (0, 1, 2, 3): 1})


@pytest.fixture
def f2() -> Pbf:
    return normalize(
        {(Y1,): 4, (0, 1): 1, (0, Y1): -2, (1, Y1): -2, (2, Y1): 1, (3, Y1): 1, (2, 3, Y1): 1}
    )


@pytest.fixture
def f3() -> Pbf:
    return normalize(
        {
            (Y1,): 4, (Y2,): 4, (Y1, 2): 1, (Y2, Y1): -2, (Y2, 2): -2,
            (0, 1): 1, (0, Y1): -2, (1, Y1): -2, (Y1, 3): 1, (Y2, 3): 1,
        }
    )


@pytest.fixture
def mixed_quartic() -> Pbf:
    # 3 x1 - 2 x2x3 + 5 x1x2x3x6 - 2 x1x2x4x5, shifted to 0-based indices
    return normalize({(0,): 3, (1, 2): -2, (0, 1, 2, 5): 5, (0, 1, 3, 4): -2})


@pytest.fixture
def density_example() -> Pbf:
    # 3 + x1x2 - 2 x2x3 + 7 x1x2x3, 0-based
    return normalize({(): 3, (0, 1): 1, (1, 2): -2, (0, 1, 2): 7}, num_vars=3)


def random_corpus(count: int, max_vars: int = 8, max_degree: int = 4, max_terms: int = 15):
    """Seeded random polynomials with 2..max_vars variables."""
    out = []
    for seed in range(count):
        n = random.Random(seed).randint(2, max_vars)
        out.append(random_pbf(n, max_degree, max_terms, seed=seed))
    return out


def graph_step_violations(f: Pbf, r: ReductionResult) -> list[str]:
    """Check the three per-step graph claims along a reduction trace."""
    problems = []
    polys = list(replay(f, r.steps, r.penalty_weight))
    for step, before, after in zip(r.steps, polys, polys[1:]):
        g0, g1 = build_graph(before), build_graph(after)
        s0, s1 = graph_stats(g0), graph_stats(g1)
        beta = g0.multiplicity(step.i, step.j)
        if s1.multi_edge_mass > s0.multi_edge_mass:
            problems.append(f"mass grew at {step}")
        if beta >= 2 and not s1.multi_edge_mass < s0.multi_edge_mass:
            problems.append(f"mass not strictly smaller at {step}")
        for v in range(before.num_vars):
            if s1.vertex_degrees[v] > s0.vertex_degrees[v]:
                problems.append(f"degree of {v} grew at {step}")
        touched = {step.i, step.j, step.h}
        for edge in set(g0.edges) | set(g1.edges):
            if not touched & set(edge) and g0.edges.get(edge) != g1.edges.get(edge):
                problems.append(f"edge {edge} changed at {step}")
    return problems


_LINES = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_lines(request):
    return request.config.stash.setdefault(_LINES, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
