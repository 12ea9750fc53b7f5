"""Sparse multi-linear polynomials over binary variables.

A :class:`Pbf` maps sorted variable-index tuples to non-zero float
coefficients. Because ``x**k == x`` for binary ``x``, every product collapses
back to a set of indices, so the representation stays multi-linear.
"""

from __future__ import annotations

import json
import math
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

Key = tuple[int, ...]


class MalformedInputError(ValueError):
    """Raised when raw terms cannot be turned into a polynomial."""


class DimensionError(ValueError):
    """Raised when an assignment does not match the number of variables."""


class Pbf:
    """Pseudo-Boolean function in canonical multi-linear form.

    Instances are treated as immutable: every operation returns a new object.
    ``terms`` iterates in lexicographic key order.
    """

    __slots__ = ("_num_vars", "_terms")

    def __init__(self, num_vars: int, terms: Mapping[Key, float] | None = None) -> None:
        terms = dict(terms or {})
        if num_vars < 0:
            raise MalformedInputError("num_vars must be non-negative")
        for key, coeff in terms.items():
            if any(b <= a for a, b in zip(key, key[1:])):
                raise MalformedInputError(f"key {key} is not strictly increasing")
            if key and (key[0] < 0 or key[-1] >= num_vars):
                raise MalformedInputError(f"key {key} out of range for {num_vars} variables")
            if coeff == 0:
                raise MalformedInputError(f"zero coefficient stored for {key}")
        self._num_vars = num_vars
        self._terms = {k: float(terms[k]) for k in sorted(terms)}

    @classmethod
    def _trusted(cls, num_vars: int, terms: dict[Key, float]) -> Pbf:
        # Skips validation; callers guarantee canonical keys and non-zero coefficients.
        obj = cls.__new__(cls)
        obj._num_vars = num_vars
        obj._terms = {k: terms[k] for k in sorted(terms)}
        return obj

    @property
    def num_vars(self) -> int:
        return self._num_vars

    @property
    def terms(self) -> Mapping[Key, float]:
        return self._terms.copy()

    def items(self) -> Iterable[tuple[Key, float]]:
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, key: object) -> bool:
        return key in self._terms

    def __getitem__(self, key: Key) -> float:
        return self._terms.get(tuple(key), 0.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pbf):
            return NotImplemented
        return self._num_vars == other._num_vars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self._num_vars, tuple(self._terms.items())))

    def __repr__(self) -> str:
        return f"Pbf(num_vars={self._num_vars}, terms={self._terms!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for key, coeff in self._terms.items():
            mono = "*".join(f"x{v}" for v in key)
            parts.append(f"{coeff:g}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts).replace("+ -", "- ")

    def __add__(self, other: Pbf) -> Pbf:
        return add(self, other)

    def __sub__(self, other: Pbf) -> Pbf:
        return add(self, scale(other, -1.0))

    def __neg__(self) -> Pbf:
        return scale(self, -1.0)

    def __mul__(self, other: Pbf | float) -> Pbf:
        if isinstance(other, Pbf):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def with_num_vars(self, num_vars: int) -> Pbf:
        """Return the same polynomial over a (not smaller) variable range."""
        used = max((k[-1] + 1 for k in self._terms if k), default=0)
        if num_vars < used:
            raise MalformedInputError(f"num_vars {num_vars} < highest used index + 1 ({used})")
        return Pbf._trusted(num_vars, dict(self._terms))

    def constant(self) -> float:
        return self._terms.get((), 0.0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "num_vars": self._num_vars,
            "terms": [{"vars": list(k), "coeff": c} for k, c in self._terms.items()],
        }

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Pbf:
        raw = [(t["vars"], t["coeff"]) for t in data["terms"]]
        return normalize(raw, num_vars=int(data["num_vars"]))

    @classmethod
    def from_json(cls, text: str) -> Pbf:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class DensityProfile:
    """Degree-k densities ``d_k = t_k / C(n, k)`` for k = 0 .. deg(f)."""

    per_degree: tuple[float, ...]
    term_counts: tuple[int, ...]
    num_vars: int

    def exact(self, k: int) -> Fraction:
        if k >= len(self.term_counts):
            return Fraction(0)
        return Fraction(self.term_counts[k], math.comb(self.num_vars, k))

    def __getitem__(self, k: int) -> float:
        return self.per_degree[k] if k < len(self.per_degree) else 0.0


def _accumulate(acc: dict[Key, float], key: Key, coeff: float) -> None:
    value = acc.get(key, 0.0) + coeff
    if value == 0.0:
        acc.pop(key, None)
    else:
        acc[key] = value


def normalize(
    raw_terms: Iterable[tuple[Sequence[int], float]] | Mapping[Sequence[int], float],
    num_vars: int | None = None,
) -> Pbf:
    """Build a canonical :class:`Pbf` from arbitrary index multisets.

    Repeated indices collapse (``x*x == x``), equal keys are merged and zero
    coefficients are dropped. ``num_vars`` defaults to one past the largest
    index seen, including indices of terms that cancelled.
    """
    if isinstance(raw_terms, Mapping):
        raw_terms = raw_terms.items()
    acc: dict[Key, float] = {}
    highest = -1
    for indices, coeff in raw_terms:
        idx = [int(i) for i in indices]
        if any(i < 0 for i in idx):
            raise MalformedInputError(f"negative variable index in {tuple(indices)}")
        key = tuple(sorted(set(idx)))
        if key:
            highest = max(highest, key[-1])
        _accumulate(acc, key, float(coeff))
    if num_vars is None:
        num_vars = highest + 1
    elif num_vars <= highest:
        raise MalformedInputError(f"index {highest} out of range for {num_vars} variables")
    return Pbf._trusted(num_vars, acc)


def variable(index: int, num_vars: int | None = None) -> Pbf:
    """The polynomial ``x_index``."""
    return normalize([((index,), 1.0)], num_vars=num_vars)


def constant(value: float, num_vars: int = 0) -> Pbf:
    return normalize([((), value)], num_vars=num_vars)


def evaluate(f: Pbf, assignment: Sequence[int]) -> float:
    if len(assignment) != f.num_vars:
        raise DimensionError(f"assignment has length {len(assignment)}, expected {f.num_vars}")
    total = 0.0
    for key, coeff in f.items():
        if all(assignment[v] for v in key):
            total += coeff
    return total


def degree(f: Pbf) -> int:
    return max((len(k) for k in f.terms), default=0)


def density_profile(f: Pbf) -> DensityProfile:
    deg = degree(f)
    counts = [0] * (deg + 1)
    for key in f.terms:
        counts[len(key)] += 1
    n = f.num_vars
    # t_k and C(n, k) are exact integers; the single division is the only rounding.
    per_degree = tuple(
        float(Fraction(t, math.comb(n, k))) if math.comb(n, k) else 0.0
        for k, t in enumerate(counts)
    )
    return DensityProfile(per_degree=per_degree, term_counts=tuple(counts), num_vars=n)


def add(f: Pbf, g: Pbf) -> Pbf:
    acc = dict(f.items())
    for key, coeff in g.items():
        _accumulate(acc, key, coeff)
    return Pbf._trusted(max(f.num_vars, g.num_vars), acc)


def scale(f: Pbf, c: float) -> Pbf:
    if c == 0:
        return Pbf(f.num_vars)
    acc = {}
    for key, coeff in f.items():
        value = coeff * c
        if value != 0.0:
            acc[key] = value
    return Pbf._trusted(f.num_vars, acc)


def multiply(f: Pbf, g: Pbf) -> Pbf:
    acc: dict[Key, float] = {}
    for k1, c1 in f.items():
        s1 = set(k1)
        for k2, c2 in g.items():
            _accumulate(acc, tuple(sorted(s1.union(k2))), c1 * c2)
    return Pbf._trusted(max(f.num_vars, g.num_vars), acc)


def square(f: Pbf) -> Pbf:
    return multiply(f, f)


def relabel(f: Pbf, mapping: Sequence[int], num_vars: int | None = None) -> Pbf:
    """Rename variable ``v`` to ``mapping[v]``."""
    n = f.num_vars if num_vars is None else num_vars
    return normalize(((tuple(mapping[v] for v in key), c) for key, c in f.items()), num_vars=n)


def random_pbf(
    num_vars: int,
    max_degree: int = 4,
    max_terms: int = 15,
    seed: int | None = None,
    *,
    integer_coeffs: bool = True,
) -> Pbf:
    """Seeded random polynomial with up to ``max_terms`` terms of degree <= ``max_degree``.

    Integer coefficients in [-5, 5] keep exact comparisons meaningful.
    """
    rng = random.Random(seed)
    num_terms = rng.randint(1, max_terms)
    top = min(max_degree, num_vars)
    raw = []
    for _ in range(num_terms):
        k = rng.randint(0, top)
        key = rng.sample(range(num_vars), k)
        if integer_coeffs:
            coeff = float(rng.choice([c for c in range(-5, 6) if c]))
        else:
            coeff = rng.uniform(-5.0, 5.0)
        raw.append((key, coeff))
    return normalize(raw, num_vars=num_vars)
