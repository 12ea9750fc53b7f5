"""Metric sweeps over problem sizes, strategies and seeds."""

from __future__ import annotations

import csv
import io
import os
import statistics
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, TextIO, Union

from .pbf import Pbf, density_profile, random_pbf
from .qaoa import compile_md
from .reduce import SelectionStrategy, quadratize
from .sched import build_full_pubo, generate_instance

SWEEP_COLUMNS = (
    "n", "path", "strategy", "seed", "qubits_after", "introduced_vars", "reduce_ms",
    "d1", "d2", "single_q", "two_q", "total_gates", "depth",
)
TIMING_COLUMNS = ("reduce_ms",)

Size = Union[tuple[int, int], int]


@dataclass
class SweepConfig:
    """``sizes`` holds ``(N, M)`` scheduling shapes or bare variable counts.

    A bare count ``n`` stands for a seeded random degree-4 polynomial in ``n``
    variables.
    """

    sizes: list[Size]
    strategies: list[SelectionStrategy] = field(default_factory=lambda: list(SelectionStrategy))
    seeds: list[int] = field(default_factory=lambda: [0])
    gamma: float = 1.0
    repeats: int = 3
    output_path: str | None = None

    def __post_init__(self) -> None:
        if not self.sizes:
            raise ValueError("sweep needs at least one size")
        if not self.strategies:
            raise ValueError("sweep needs at least one strategy")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        self.strategies = [SelectionStrategy.parse(s) for s in self.strategies]
        self.sizes = [tuple(s) if isinstance(s, (list, tuple)) else int(s) for s in self.sizes]

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SweepConfig:
        return cls(
            sizes=[parse_size(s) if isinstance(s, str) else s for s in data["sizes"]],
            strategies=data.get("strategies", [s.value for s in SelectionStrategy]),
            seeds=[int(s) for s in data.get("seeds", [0])],
            gamma=float(data.get("gamma", 1.0)),
            repeats=int(data.get("repeats", 3)),
            output_path=data.get("output_path"),
        )


def parse_size(text: str) -> Size:
    """``"4x3"`` -> ``(4, 3)``; ``"10"`` -> ``10``."""
    text = text.strip().lower()
    if "x" in text:
        n, m = text.split("x")
        return int(n), int(m)
    return int(text)


def problem_for(size: Size, seed: int) -> Pbf:
    if isinstance(size, tuple):
        return build_full_pubo(generate_instance(size[0], size[1], seed))
    return random_pbf(size, max_degree=4, max_terms=15, seed=seed)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _row(f: Pbf, path: str, strategy: str, seed: int, qubits: int, introduced: int,
         reduce_ms: str, reduced: Pbf, gamma: float) -> dict[str, str]:
    dens = density_profile(reduced)
    _, m = compile_md(reduced, gamma)
    return {
        "n": str(f.num_vars), "path": path, "strategy": strategy, "seed": str(seed),
        "qubits_after": str(qubits), "introduced_vars": str(introduced), "reduce_ms": reduce_ms,
        "d1": _fmt(dens[1]), "d2": _fmt(dens[2]),
        "single_q": str(m.single_qubit_gates), "two_q": str(m.two_qubit_gates),
        "total_gates": str(m.total_gates), "depth": str(m.depth),
    }


def run_cell(size: Size, seed: int, strategies: Sequence[SelectionStrategy],
             gamma: float = 1.0, repeats: int = 3) -> list[dict[str, str]]:
    """MD row plus one RMD row per strategy for a single (size, seed)."""
    f = problem_for(size, seed)
    rows = [_row(f, "md", "", seed, f.num_vars, 0, "", f, gamma)]
    for strategy in strategies:
        runs = [quadratize(f, strategy) for _ in range(repeats)]
        result = runs[0]
        ms = statistics.median(r.elapsed_ms for r in runs)
        rows.append(_row(f, "rmd", strategy.value, seed, result.reduced.num_vars,
                         result.introduced_vars, f"{ms:.3f}", result.reduced, gamma))
    return rows


def _cell(args: tuple) -> list[dict[str, str]]:
    return run_cell(*args)


def thread_limit() -> int:
    try:
        return max(1, int(os.environ.get("QUADRA_THREADS", "1")))
    except ValueError:
        return 1


def run_sweep(config: SweepConfig, workers: int | None = None) -> list[dict[str, str]]:
    workers = thread_limit() if workers is None else workers
    cells = [(size, seed, config.strategies, config.gamma, config.repeats)
             for size in config.sizes for seed in config.seeds]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell, cells))
    else:
        results = [_cell(c) for c in cells]
    order = {s.value: k for k, s in enumerate(SelectionStrategy)}

    def sort_key(row: dict[str, str]) -> tuple:
        return (int(row["n"]), int(row["seed"]), row["path"] != "md", order.get(row["strategy"], -1))

    # Cells are already deterministic; the stable sort only fixes the file order.
    return sorted((row for rows in results for row in rows), key=sort_key)


def write_csv(rows: Iterable[dict[str, str]], stream: TextIO, columns: Sequence[str] = SWEEP_COLUMNS) -> None:
    writer = csv.DictWriter(stream, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def to_csv(rows: Iterable[dict[str, str]], columns: Sequence[str] = SWEEP_COLUMNS) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, columns)
    return buf.getvalue()


def strip_timing(text: str) -> list[list[str]]:
    """CSV rows with the timing columns blanked, for determinism checks."""
    rows = list(csv.reader(io.StringIO(text)))
    drop = [rows[0].index(c) for c in TIMING_COLUMNS if c in rows[0]]
    return [[("" if k in drop else v) for k, v in enumerate(r)] for r in rows]


def bench(sizes: Sequence[Size], strategies: Sequence[SelectionStrategy], seeds: Sequence[int],
          repeats: int = 5) -> list[dict[str, str]]:
    """Reduction timing only: median and minimum over ``repeats`` runs."""
    rows = []
    for size in sizes:
        for seed in seeds:
            f = problem_for(size, seed)
            for strategy in strategies:
                runs = [quadratize(f, strategy) for _ in range(repeats)]
                times = [r.elapsed_ms for r in runs]
                rows.append({
                    "n": str(f.num_vars), "strategy": strategy.value, "seed": str(seed),
                    "introduced_vars": str(runs[0].introduced_vars),
                    "reduce_ms": f"{statistics.median(times):.3f}",
                    "reduce_ms_min": f"{min(times):.3f}", "repeats": str(repeats),
                })
    return rows


BENCH_COLUMNS = ("n", "strategy", "seed", "introduced_vars", "reduce_ms", "reduce_ms_min", "repeats")
