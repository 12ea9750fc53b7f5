"""Exhaustive checks used to verify reductions and compiled circuits.

Everything here enumerates the full assignment space. Variable ``k`` of an
assignment is bit ``k`` of its integer index.
"""

from __future__ import annotations

import json
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .pbf import Pbf
from .qaoa import Circuit, Cx, Rz, RzK
from .reduce import ReductionResult

MAX_VARS = 24
TOL = 1e-9


class CapacityError(ValueError):
    """Raised when exhaustive enumeration would exceed ``MAX_VARS`` variables."""


@dataclass(frozen=True)
class BruteForceReport:
    min_value: float
    argmin_set: tuple[tuple[int, ...], ...]
    evaluations: int


@dataclass(frozen=True)
class PhaseTrace:
    input_bits: tuple[int, ...]
    output_bits: tuple[int, ...]
    phase: float


@dataclass
class CheckResult:
    name: str
    passed: bool
    counterexample: list[int] | None = None
    detail: str = ""
    skipped: bool = False


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def to_dict(self) -> dict[str, Any]:
        return {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _guard(n: int) -> None:
    if n > MAX_VARS:
        raise CapacityError(f"{n} variables exceeds the exhaustive limit of {MAX_VARS}")


def bits_of(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> k) & 1 for k in range(n))


def all_values(f: Pbf, start: int = 0, stop: int | None = None) -> np.ndarray:
    """``f`` evaluated at assignment indices ``start .. stop-1``."""
    _guard(f.num_vars)
    if stop is None:
        stop = 1 << f.num_vars
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.zeros(idx.shape, dtype=np.float64)
    for key, coeff in f.items():
        mask = sum(1 << v for v in key)
        out += coeff * ((idx & mask) == mask)
    return out


def brute_force_min(f: Pbf) -> BruteForceReport:
    """Exact minimum over all ``2**n`` assignments; ties within ``TOL`` are kept."""
    _guard(f.num_vars)
    vals = all_values(f)
    best = float(vals.min())
    hits = np.flatnonzero(vals <= best + TOL)
    return BruteForceReport(
        min_value=best,
        argmin_set=tuple(bits_of(int(h), f.num_vars) for h in hits),
        evaluations=int(vals.size),
    )


def _bit_matrix(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.float64)


def _min_over_extra(fp: Pbf, n: int) -> np.ndarray:
    """``min_y fp(x, y)`` for every ``x`` in ``{0,1}^n``; ``y`` are the remaining variables."""
    m = fp.num_vars - n
    _guard(fp.num_vars)
    if m == 0:
        return all_values(fp)
    if max((len(k) for k in fp.terms), default=0) > 2:
        vals = all_values(fp).reshape(1 << m, 1 << n)
        return vals.min(axis=0)
    # Quadratic: fp = g(x) + h(y) + x^T C y, evaluated blockwise.
    g, h, cross = {}, {}, np.zeros((n, m))
    for key, coeff in fp.items():
        xs = [v for v in key if v < n]
        ys = [v - n for v in key if v >= n]
        if not ys:
            g[key] = coeff
        elif not xs:
            h[tuple(ys)] = coeff
        else:
            cross[xs[0], ys[0]] += coeff
    gx = all_values(Pbf._trusted(n, g))
    hy = all_values(Pbf._trusted(m, h))
    xb, yb = _bit_matrix(n), _bit_matrix(m)
    proj = xb @ cross
    out = np.empty(1 << n)
    rows = max(1, (1 << 22) >> m)
    for s in range(0, 1 << n, rows):
        block = proj[s : s + rows] @ yb.T + hy[None, :]
        out[s : s + rows] = gx[s : s + rows] + block.min(axis=1)
    return out


def quadratisation_counterexample(
    f: Pbf, reduced: Pbf, tol: float = TOL
) -> tuple[list[int], float, float] | None:
    """First ``x`` where ``min_y reduced(x, y) != f(x)``, with both values, or None."""
    n = f.num_vars
    if reduced.num_vars < n:
        raise ValueError("reduced polynomial has fewer variables than the original")
    fx = all_values(f)
    best = _min_over_extra(reduced, n)
    bad = np.flatnonzero(np.abs(best - fx) > tol)
    if bad.size == 0:
        return None
    x = int(bad[0])
    return list(bits_of(x, n)), float(fx[x]), float(best[x])


def check_quadratisation(f: Pbf, result: ReductionResult) -> bool:
    _guard(f.num_vars + result.introduced_vars)
    return quadratisation_counterexample(f, result.reduced) is None


def _apply(gate, state: np.ndarray, phase: np.ndarray) -> None:
    if isinstance(gate, Cx):
        state ^= ((state >> gate.control) & 1) << gate.target
    elif isinstance(gate, Rz):
        bit = (state >> gate.qubit) & 1
        phase += np.where(bit == 1, gate.angle / 2, -gate.angle / 2)
    elif isinstance(gate, RzK):
        parity = np.zeros_like(state)
        for q in gate.qubit_list:
            parity ^= (state >> q) & 1
        phase += np.where(parity == 1, gate.angle / 2, -gate.angle / 2)
    else:
        raise TypeError(f"unsupported gate {gate!r}")


def simulate_phase(c: Circuit, input_bits: Sequence[int]) -> PhaseTrace:
    if len(input_bits) != c.num_qubits:
        raise ValueError(f"expected {c.num_qubits} bits, got {len(input_bits)}")
    index = sum(int(b) << k for k, b in enumerate(input_bits))
    state = np.array([index], dtype=np.int64)
    phase = np.zeros(1)
    for gate in c.gates:
        _apply(gate, state, phase)
    return PhaseTrace(
        input_bits=tuple(int(b) for b in input_bits),
        output_bits=bits_of(int(state[0]), c.num_qubits),
        phase=float(np.mod(phase[0], 2 * math.pi)),
    )


def simulate_all(c: Circuit) -> tuple[np.ndarray, np.ndarray]:
    """Output basis index and phase (mod 2 pi) for every input basis state."""
    _guard(c.num_qubits)
    state = np.arange(1 << c.num_qubits, dtype=np.int64)
    phase = np.zeros(state.shape)
    for gate in c.gates:
        _apply(gate, state, phase)
    return state, np.mod(phase, 2 * math.pi)


def phase_distance(a: np.ndarray | float, b: np.ndarray | float) -> np.ndarray | float:
    """Distance on the circle between two angles."""
    d = np.mod(np.asarray(a) - np.asarray(b) + math.pi, 2 * math.pi) - math.pi
    return np.abs(d)


def phase_counterexample(
    f: Pbf, c: Circuit, gamma: float, offset: float, tol: float = TOL
) -> tuple[list[int], str] | None:
    """Check that ``c`` maps ``|x>`` to ``exp(-i gamma (f(x) - offset)) |x>`` for all ``x``."""
    if c.num_qubits != f.num_vars:
        raise ValueError("circuit width does not match the polynomial")
    out, phase = simulate_all(c)
    moved = np.flatnonzero(out != np.arange(out.size))
    if moved.size:
        x = int(moved[0])
        return list(bits_of(x, f.num_vars)), "basis state not restored"
    expected = -gamma * (all_values(f) - offset)
    bad = np.flatnonzero(phase_distance(phase, expected) > tol)
    if bad.size:
        x = int(bad[0])
        return list(bits_of(x, f.num_vars)), f"phase {phase[x]:.12g} != {np.mod(expected[x], 2 * math.pi):.12g}"
    return None


def same_action(a: Circuit, b: Circuit, tol: float = TOL) -> bool:
    """True when both circuits permute basis states identically with equal phases."""
    if a.num_qubits != b.num_qubits:
        return False
    sa, pa = simulate_all(a)
    sb, pb = simulate_all(b)
    return bool(np.array_equal(sa, sb) and np.all(phase_distance(pa, pb) <= tol))
