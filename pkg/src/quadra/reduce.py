"""Iterative pair-substitution quadratisation with a penalty term.

Each step picks a variable pair ``(i, j)`` occurring in some monomial of
degree >= 3, replaces ``x_i x_j`` by a fresh variable ``y_h`` in every
monomial containing both, and adds ``w * (3 y_h + x_i x_j - 2 x_i y_h - 2 x_j y_h)``.

Monomials are always visited in canonical (sorted-index) order. Pairs
*within* monomials are ordered by an order key instead of raw index: original
variable ``k`` has key ``(k,)`` and a fresh variable inherits the key of the
earlier variable of the pair it replaces, extended by its own index, so it
sits where its pair used to sit. For ``y1 x2 x3`` the first pair is
``(y1, x2)``.
"""

from __future__ import annotations

import enum
import json
import time
from collections import Counter
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations
from typing import Any

from .pbf import DimensionError, Key, Pbf, normalize

OrderKey = tuple[int, ...]


class SelectionStrategy(enum.Enum):
    SPARSE = "sparse"
    MEDIUM = "medium"
    DENSE = "dense"

    @classmethod
    def parse(cls, value: str | SelectionStrategy) -> SelectionStrategy:
        if isinstance(value, cls):
            return value
        return cls(value.lower())


class NothingToSelectError(ValueError):
    """Raised when asked to pick a pair from a polynomial of degree <= 2."""


@dataclass(frozen=True)
class ReductionStep:
    i: int
    j: int
    h: int
    pair_multiplicity: int = 0

    def to_dict(self) -> dict[str, int]:
        return {"i": self.i, "j": self.j, "h": self.h, "pair_multiplicity": self.pair_multiplicity}


@dataclass(frozen=True)
class ReductionResult:
    original_num_vars: int
    reduced: Pbf
    steps: tuple[ReductionStep, ...]
    penalty_weight: float
    strategy: SelectionStrategy | None = None
    elapsed: float = 0.0  # seconds, selection + substitution only

    @property
    def introduced_vars(self) -> int:
        return len(self.steps)

    @property
    def elapsed_ms(self) -> float:
        return self.elapsed * 1e3

    def to_dict(self) -> dict[str, Any]:
        return {
            "original_num_vars": self.original_num_vars,
            "strategy": self.strategy.value if self.strategy else None,
            "penalty_weight": self.penalty_weight,
            "introduced_vars": self.introduced_vars,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "steps": [s.to_dict() for s in self.steps],
            "reduced": self.reduced.to_dict(),
        }

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ReductionResult:
        reduced = Pbf.from_dict(data["reduced"])
        steps = tuple(
            ReductionStep(int(s["i"]), int(s["j"]), int(s["h"]), int(s.get("pair_multiplicity", 0)))
            for s in data["steps"]
        )
        n = data.get("original_num_vars", reduced.num_vars - len(steps))
        strategy = data.get("strategy")
        return cls(
            original_num_vars=int(n),
            reduced=reduced,
            steps=steps,
            penalty_weight=float(data["penalty_weight"]),
            strategy=SelectionStrategy.parse(strategy) if strategy else None,
            elapsed=float(data.get("elapsed_ms", 0.0)) / 1e3,
        )


def variable_order(num_vars: int, steps: Sequence[ReductionStep] = ()) -> list[OrderKey]:
    """Order keys for the original variables plus one per step."""
    order: list[OrderKey] = [(k,) for k in range(num_vars)]
    for step in steps:
        if step.h != len(order):
            raise IndexError(f"step introduces {step.h}, expected {len(order)}")
        first = min(order[step.i], order[step.j])
        order.append(first + (step.h,))
    return order


def _pick(
    terms: Mapping[Key, float], strategy: SelectionStrategy, order: Sequence[OrderKey]
) -> tuple[int, int]:
    top = max((len(k) for k in terms), default=0)
    if top <= 2:
        raise NothingToSelectError(f"degree {top} <= 2, nothing to select")
    rank = order.__getitem__

    if strategy is SelectionStrategy.SPARSE:
        first = sorted(min(k for k in terms if len(k) == top), key=rank)
        return first[0], first[1]

    pool = (k for k in terms if len(k) == top) if strategy is SelectionStrategy.MEDIUM else (
        k for k in terms if len(k) >= 3
    )
    counts: Counter[tuple[int, int]] = Counter()
    for key in pool:
        counts.update(combinations(sorted(key, key=rank), 2))
    most = max(counts.values())
    return min((p for p, c in counts.items() if c == most), key=lambda p: (rank(p[0]), rank(p[1])))


def select_pair(
    f: Pbf, strategy: SelectionStrategy | str, order: Sequence[OrderKey] | None = None
) -> tuple[int, int]:
    """Pick the next pair to substitute; returned with ``i < j``.

    ``order`` gives per-variable tie-break keys (see :func:`variable_order`);
    by default variables are ordered by index.
    """
    if order is None:
        order = variable_order(f.num_vars)
    a, b = _pick(f.terms, SelectionStrategy.parse(strategy), order)
    return min(a, b), max(a, b)


def penalty(i: int, j: int, h: int, weight: float = 1.0) -> Pbf:
    """``weight * (3 y_h + x_i x_j - 2 x_i y_h - 2 x_j y_h)``; zero iff y_h == x_i x_j."""
    raw = [((h,), 3.0), ((i, j), 1.0), ((i, h), -2.0), ((j, h), -2.0)]
    return normalize(((k, weight * c) for k, c in raw), num_vars=max(i, j, h) + 1)


def _substitute(
    terms: dict[Key, float], i: int, j: int, h: int, weight: float
) -> tuple[dict[Key, float], int]:
    out: dict[Key, float] = {}
    beta = 0
    for key, coeff in terms.items():
        if i in key and j in key:
            beta += 1
            key = tuple(v for v in key if v != i and v != j) + (h,)
        value = out.get(key, 0.0) + coeff
        if value == 0.0:
            out.pop(key, None)
        else:
            out[key] = value
    for key, c in (((h,), 3.0), ((i, j), 1.0), ((i, h), -2.0), ((j, h), -2.0)):
        value = out.get(key, 0.0) + weight * c
        if value == 0.0:
            out.pop(key, None)
        else:
            out[key] = value
    return out, beta


def substitute_pair(f: Pbf, i: int, j: int, h: int, penalty_weight: float) -> Pbf:
    if h != f.num_vars:
        raise IndexError(f"new variable must be {f.num_vars}, got {h}")
    if i == j or not (0 <= i < f.num_vars and 0 <= j < f.num_vars):
        raise IndexError(f"invalid pair ({i}, {j})")
    if not penalty_weight > 0:
        raise ValueError("penalty_weight must be positive")
    i, j = min(i, j), max(i, j)
    terms, _ = _substitute(dict(f.items()), i, j, h, penalty_weight)
    return Pbf._trusted(h + 1, terms)


def default_penalty_weight(f: Pbf) -> float:
    """``1 + sum |alpha_S|``: larger than any swing the objective part can make."""
    return 1.0 + sum(abs(c) for _, c in f.items())


def quadratize(
    f: Pbf, strategy: SelectionStrategy | str, penalty_weight: float | None = None
) -> ReductionResult:
    strategy = SelectionStrategy.parse(strategy)
    weight = default_penalty_weight(f) if penalty_weight is None else float(penalty_weight)
    if not weight > 0:
        raise ValueError("penalty_weight must be positive")
    n = f.num_vars
    terms = dict(f.items())
    order = variable_order(n)
    steps: list[ReductionStep] = []

    start = time.perf_counter()
    while max((len(k) for k in terms), default=0) > 2:
        a, b = _pick(terms, strategy, order)
        i, j = min(a, b), max(a, b)
        h = n + len(steps)
        terms, beta = _substitute(terms, i, j, h, weight)
        order.append(min(order[i], order[j]) + (h,))
        steps.append(ReductionStep(i, j, h, beta))
    elapsed = time.perf_counter() - start

    return ReductionResult(
        original_num_vars=n,
        reduced=Pbf._trusted(n + len(steps), terms),
        steps=tuple(steps),
        penalty_weight=weight,
        strategy=strategy,
        elapsed=elapsed,
    )


def replay(f: Pbf, steps: Sequence[ReductionStep], penalty_weight: float) -> Iterator[Pbf]:
    """Yield ``f`` followed by the polynomial after each step.

    Unlike :func:`substitute_pair` this accepts any weight, including zero,
    so tampered traces can be rebuilt and checked.
    """
    current = f
    yield current
    for step in steps:
        if step.h != current.num_vars:
            raise IndexError(f"step introduces {step.h}, expected {current.num_vars}")
        terms, _ = _substitute(dict(current.items()), step.i, step.j, step.h, penalty_weight)
        current = Pbf._trusted(step.h + 1, terms)
        yield current


def decode_assignment(result: ReductionResult, extended: Sequence[int]) -> tuple[list[int], bool]:
    n = result.original_num_vars
    if len(extended) != n + result.introduced_vars:
        raise DimensionError(
            f"assignment has length {len(extended)}, expected {n + result.introduced_vars}"
        )
    values = [int(b) for b in extended[:n]]
    for step in result.steps:
        values.append(values[step.i] & values[step.j])
    return values[:n], values == [int(b) for b in extended]
