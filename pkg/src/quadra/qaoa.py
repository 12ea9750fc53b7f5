"""Problem-layer circuit synthesis for one QAOA layer (mixer omitted).

Conventions:
  * ``Rz(theta) = diag(exp(-i theta/2), exp(+i theta/2))``
  * ``RzK(T, theta)`` applies ``exp(-i theta/2)`` when the bits on ``T`` have
    even parity and ``exp(+i theta/2)`` otherwise, i.e. ``exp(-i theta/2 Z_T)``.
  * An Ising weight ``w_T`` becomes angle ``2 * gamma * w_T``, so the layer
    applies ``exp(-i gamma (H - offset))`` on every basis state.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Any, Union

from .pbf import Pbf, degree
from .reduce import ReductionResult, SelectionStrategy, quadratize

Subset = tuple[int, ...]

CSV_HEADER = "n,strategy,qubits,single_q,two_q,depth,introduced_vars,reduce_ms"


@dataclass(frozen=True)
class IsingPoly:
    num_qubits: int
    terms: Mapping[Subset, float] = field(default_factory=dict)
    constant: float = 0.0

    def __post_init__(self) -> None:
        for subset, w in self.terms.items():
            if not subset:
                raise ValueError("empty subset belongs in the constant")
            if w == 0:
                raise ValueError(f"zero weight on {subset}")
        object.__setattr__(self, "terms", {k: self.terms[k] for k in sorted(self.terms)})

    def energy(self, bits: Sequence[int]) -> float:
        """Value at spins ``Z_j = 1 - 2 bits[j]``."""
        total = self.constant
        for subset, w in self.terms.items():
            parity = sum(bits[q] for q in subset) & 1
            total += -w if parity else w
        return total


@dataclass(frozen=True)
class Rz:
    qubit: int
    angle: float

    @property
    def qubits(self) -> Subset:
        return (self.qubit,)


@dataclass(frozen=True)
class Cx:
    control: int
    target: int

    def __post_init__(self) -> None:
        if self.control == self.target:
            raise ValueError("CX control and target must differ")

    @property
    def qubits(self) -> Subset:
        return (self.control, self.target)


@dataclass(frozen=True)
class RzK:
    qubit_list: Subset
    angle: float

    def __post_init__(self) -> None:
        qs = tuple(sorted(self.qubit_list))
        if len(qs) < 2 or len(set(qs)) != len(qs):
            raise ValueError("RzK needs at least two distinct qubits")
        object.__setattr__(self, "qubit_list", qs)

    @property
    def qubits(self) -> Subset:
        return self.qubit_list


Gate = Union[Rz, Cx, RzK]


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            if any(not 0 <= q < self.num_qubits for q in gate.qubits):
                raise ValueError(f"{gate} touches a qubit outside 0..{self.num_qubits - 1}")

    def __len__(self) -> int:
        return len(self.gates)

    def relabel(self, perm: Sequence[int]) -> Circuit:
        def move(g: Gate) -> Gate:
            if isinstance(g, Rz):
                return Rz(perm[g.qubit], g.angle)
            if isinstance(g, Cx):
                return Cx(perm[g.control], perm[g.target])
            return RzK(tuple(perm[q] for q in g.qubit_list), g.angle)

        return Circuit(self.num_qubits, tuple(move(g) for g in self.gates))


@dataclass(frozen=True)
class CircuitMetrics:
    total_gates: int
    single_qubit_gates: int
    two_qubit_gates: int
    higher_order_gates: int
    depth: int
    num_qubits: int = 0
    offset: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def pubo_to_ising(f: Pbf) -> IsingPoly:
    """Substitute ``x_j = (1 - Z_j) / 2`` and collect Z-subset weights."""
    acc: dict[Subset, float] = {}
    for key, coeff in f.items():
        share = coeff / (1 << len(key))
        for k in range(len(key) + 1):
            sign = -share if k % 2 else share
            for subset in combinations(key, k):
                acc[subset] = acc.get(subset, 0.0) + sign
    const = acc.pop((), 0.0)
    terms = {s: w for s, w in acc.items() if w != 0.0}
    return IsingPoly(f.num_vars, terms, const)


def map_to_gates(h: IsingPoly, gamma: float) -> Circuit:
    gates: list[Gate] = []
    for subset, w in h.terms.items():
        angle = 2.0 * gamma * w
        gates.append(Rz(subset[0], angle) if len(subset) == 1 else RzK(subset, angle))
    return Circuit(h.num_qubits, tuple(gates))


def decompose(c: Circuit) -> Circuit:
    """Replace each RzK by a CX ladder, an Rz on the last qubit, and the mirrored ladder."""
    gates: list[Gate] = []
    for g in c.gates:
        if isinstance(g, RzK):
            qs = g.qubit_list
            ladder = [Cx(a, b) for a, b in zip(qs, qs[1:])]
            gates += ladder
            gates.append(Rz(qs[-1], g.angle))
            gates += reversed(ladder)
        else:
            gates.append(g)
    return Circuit(c.num_qubits, tuple(gates))


def depth(c: Circuit) -> int:
    """Greedy ASAP layering in the given order; no reordering."""
    frontier = [0] * c.num_qubits
    for g in c.gates:
        qs = g.qubits
        layer = 1 + max(frontier[q] for q in qs)
        for q in qs:
            frontier[q] = layer
    return max(frontier, default=0)


def metrics(c: Circuit, offset: float = 0.0) -> CircuitMetrics:
    single = two = higher = 0
    for g in c.gates:
        arity = len(g.qubits)
        if arity == 1:
            single += 1
        elif arity == 2:
            two += 1
        else:
            higher += 1
    return CircuitMetrics(
        total_gates=len(c.gates),
        single_qubit_gates=single,
        two_qubit_gates=two,
        higher_order_gates=higher,
        depth=depth(c),
        num_qubits=c.num_qubits,
        offset=offset,
    )


def compile_md(f: Pbf, gamma: float) -> tuple[Circuit, CircuitMetrics]:
    """Map every term straight to a gate, then decompose."""
    ising = pubo_to_ising(f)
    circuit = decompose(map_to_gates(ising, gamma))
    return circuit, metrics(circuit, ising.constant)


def compile_rmd(
    f: Pbf, strategy: SelectionStrategy | str, gamma: float, penalty_weight: float | None = None
) -> tuple[ReductionResult, Circuit, CircuitMetrics]:
    """Quadratise first, then map and decompose the reduced polynomial."""
    result = quadratize(f, strategy, penalty_weight)
    if degree(result.reduced) > 2:
        raise AssertionError("reduction left a term of degree > 2")
    circuit, m = compile_md(result.reduced, gamma)
    return result, circuit, m


def _fmt(angle: float) -> str:
    return f"{angle:.12g}"


def to_text(c: Circuit) -> str:
    lines = [f"qubits {c.num_qubits}"]
    for g in c.gates:
        if isinstance(g, Rz):
            lines.append(f"rz q{g.qubit} {_fmt(g.angle)}")
        elif isinstance(g, Cx):
            lines.append(f"cx q{g.control} q{g.target}")
        else:
            qs = " ".join(f"q{q}" for q in g.qubit_list)
            lines.append(f"rzk {qs} {_fmt(g.angle)}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0][0] != "qubits":
        raise ValueError("circuit text must start with 'qubits <n>'")
    n = int(lines[0][1])
    gates: list[Gate] = []
    for parts in lines[1:]:
        op, args = parts[0], parts[1:]
        if op == "rz":
            gates.append(Rz(int(args[0][1:]), float(args[1])))
        elif op == "cx":
            gates.append(Cx(int(args[0][1:]), int(args[1][1:])))
        elif op == "rzk":
            gates.append(RzK(tuple(int(a[1:]) for a in args[:-1]), float(args[-1])))
        else:
            raise ValueError(f"unknown gate {op!r}")
    return Circuit(n, tuple(gates))


def csv_row(
    n: int, m: CircuitMetrics, strategy: SelectionStrategy | str | None = None,
    introduced_vars: int = 0, reduce_ms: float = 0.0,
) -> str:
    name = SelectionStrategy.parse(strategy).value if strategy else ""
    return (
        f"{n},{name},{m.num_qubits},{m.single_qubit_gates},{m.two_qubit_gates},"
        f"{m.depth},{introduced_vars},{reduce_ms:.3f}"
    )


def metrics_json(m: CircuitMetrics, **extra: Any) -> str:
    return json.dumps({**m.to_dict(), **extra}, indent=2)
