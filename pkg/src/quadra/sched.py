"""Job-to-machine assignment PUBO.

Variable ``x_ij`` (job ``i`` on machine ``j``) lives at flat index ``i*M + j``.
The model is ``A*H_obj + B*H_r + C*H_single``: squared pairwise machine-load
differences, per-machine setup cost, and a one-machine-per-job constraint.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .pbf import Pbf, add, normalize, scale, square

MAX_RETRIES = 100


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SchedulingInstance:
    num_jobs: int
    num_machines: int
    durations: tuple[float, ...]
    setup_between: tuple[tuple[float, ...], ...]
    setup_initial: tuple[tuple[float, ...], ...]
    A: float
    B: float
    C: float
    seed: int | None = None

    def __post_init__(self) -> None:
        n, m = self.num_jobs, self.num_machines
        if n < 1 or m < 1:
            raise ValueError("need at least one job and one machine")
        if len(self.durations) != n:
            raise ValueError("durations must have one entry per job")
        if len(self.setup_between) != n or any(len(r) != n for r in self.setup_between):
            raise ValueError("setup_between must be N x N")
        if len(self.setup_initial) != n or any(len(r) != m for r in self.setup_initial):
            raise ValueError("setup_initial must be N x M")
        if any(self.setup_between[i][i] != 0 for i in range(n)):
            raise ValueError("setup_between must have a zero diagonal")
        if not (self.C > self.A and self.C > self.B):
            raise ValueError("constraint weight C must exceed A and B")

    @property
    def num_vars(self) -> int:
        return self.num_jobs * self.num_machines

    def var(self, job: int, machine: int) -> int:
        return job * self.num_machines + machine

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["num_vars"] = self.num_vars
        for key in ("durations", "setup_between", "setup_initial"):
            data[key] = json.loads(json.dumps(data[key]))
        return data

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SchedulingInstance:
        return cls(
            num_jobs=int(data["num_jobs"]),
            num_machines=int(data["num_machines"]),
            durations=tuple(float(d) for d in data["durations"]),
            setup_between=tuple(tuple(float(v) for v in row) for row in data["setup_between"]),
            setup_initial=tuple(tuple(float(v) for v in row) for row in data["setup_initial"]),
            A=float(data["A"]),
            B=float(data["B"]),
            C=float(data["C"]),
            seed=data.get("seed"),
        )


def exact_rank(matrix: Sequence[Sequence[int]]) -> int:
    """Rank over the rationals by fraction-free (Bareiss) elimination."""
    rows = [[int(v) for v in row] for row in matrix]
    if not rows or not rows[0]:
        return 0
    n_rows, n_cols = len(rows), len(rows[0])
    rank, prev = 0, 1
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(rank + 1, n_rows):
            for c in range(col + 1, n_cols):
                num = rows[r][c] * rows[rank][col] - rows[r][col] * rows[rank][c]
                rows[r][c] = int(Fraction(num, prev))
            rows[r][col] = 0
        prev = rows[rank][col]
        rank += 1
        if rank == n_rows:
            break
    return rank


def generate_instance(num_jobs: int, num_machines: int, seed: int = 0) -> SchedulingInstance:
    """Random instance with durations in [5, 20] and setup times in [1, 4].

    R (between jobs) is symmetric with zero diagonal; R and S are redrawn until
    both have full rank. A single job has no job pairs, so R is exempt there.
    """
    if num_jobs < 1 or num_machines < 1:
        raise ValueError("need at least one job and one machine")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RETRIES):
        d = rng.integers(5, 21, size=num_jobs)
        upper = np.triu(rng.integers(1, 5, size=(num_jobs, num_jobs)), k=1)
        R = upper + upper.T
        S = rng.integers(1, 5, size=(num_jobs, num_machines))
        r_ok = num_jobs == 1 or exact_rank(R.tolist()) == num_jobs
        if r_ok and exact_rank(S.tolist()) == min(num_jobs, num_machines):
            break
    else:
        raise GenerationError(f"no full-rank R, S after {MAX_RETRIES} draws")
    dmax = float(d.max())
    return SchedulingInstance(
        num_jobs=num_jobs,
        num_machines=num_machines,
        durations=tuple(float(v) for v in d),
        setup_between=tuple(tuple(float(v) for v in row) for row in R),
        setup_initial=tuple(tuple(float(v) for v in row) for row in S),
        A=1.0,
        B=2.0 * dmax,
        C=4.0 * dmax**2,
        seed=seed,
    )


def _machine_setup(inst: SchedulingInstance, j: int) -> list[tuple[tuple[int, ...], float]]:
    R = inst.setup_between
    raw = []
    for i in range(inst.num_jobs):
        for k in range(i + 1, inst.num_jobs):
            raw.append(((inst.var(i, j), inst.var(k, j)), R[i][k]))
    return raw


def _machine_load(inst: SchedulingInstance, j: int) -> Pbf:
    raw = [
        ((inst.var(i, j),), inst.durations[i] + inst.setup_initial[i][j])
        for i in range(inst.num_jobs)
    ]
    return normalize(raw + _machine_setup(inst, j), num_vars=inst.num_vars)


def build_objective(inst: SchedulingInstance) -> Pbf:
    loads = [_machine_load(inst, j) for j in range(inst.num_machines)]
    total = Pbf(inst.num_vars)
    for j in range(inst.num_machines):
        for k in range(j + 1, inst.num_machines):
            total = add(total, square(loads[j] - loads[k]))
    return total


def build_setup_cost(inst: SchedulingInstance) -> Pbf:
    raw = []
    for j in range(inst.num_machines):
        raw += _machine_setup(inst, j)
        raw += [((inst.var(i, j),), inst.setup_initial[i][j]) for i in range(inst.num_jobs)]
    return normalize(raw, num_vars=inst.num_vars)


def build_assignment_constraint(inst: SchedulingInstance) -> Pbf:
    total = Pbf(inst.num_vars)
    for i in range(inst.num_jobs):
        row = normalize(
            [((inst.var(i, j),), 1.0) for j in range(inst.num_machines)] + [((), -1.0)],
            num_vars=inst.num_vars,
        )
        total = add(total, square(row))
    return total


def build_full_pubo(inst: SchedulingInstance) -> Pbf:
    return add(
        add(scale(build_objective(inst), inst.A), scale(build_setup_cost(inst), inst.B)),
        scale(build_assignment_constraint(inst), inst.C),
    )
