import itertools
import json

import numpy as np
import pytest

from quadra.oracle import all_values, brute_force_min
from quadra.pbf import degree, evaluate, normalize, relabel
from quadra.sched import (
    SchedulingInstance,
    build_assignment_constraint,
    build_full_pubo,
    build_objective,
    build_setup_cost,
    exact_rank,
    generate_instance,
)


def manual(N, M, R=None, S=None, d=None):
    R = R if R is not None else [[0.0] * N for _ in range(N)]
    S = S if S is not None else [[0.0] * M for _ in range(N)]
    d = d if d is not None else [5.0 + i for i in range(N)]
    return SchedulingInstance(N, M, tuple(d), tuple(map(tuple, R)), tuple(map(tuple, S)), 1.0, 2.0, 10.0)


class TestGenerate:
    def test_sizes(self):
        inst = generate_instance(3, 2, seed=7)
        assert inst.num_vars == 6
        assert generate_instance(1, 1).num_vars == 1

    def test_deterministic(self):
        assert generate_instance(4, 3, 11) == generate_instance(4, 3, 11)
        assert generate_instance(4, 3, 11).to_json() == generate_instance(4, 3, 11).to_json()

    @pytest.mark.parametrize("N,M,seed", [(3, 2, 0), (4, 3, 1), (5, 3, 2), (6, 2, 3)])
    def test_ranges_and_weights(self, N, M, seed):
        inst = generate_instance(N, M, seed)
        R, S, d = np.array(inst.setup_between), np.array(inst.setup_initial), np.array(inst.durations)
        assert ((5 <= d) & (d <= 20)).all()
        assert (R == R.T).all() and (np.diag(R) == 0).all()
        off = R[~np.eye(N, dtype=bool)]
        assert ((1 <= off) & (off <= 4)).all()
        assert ((1 <= S) & (S <= 4)).all()
        assert exact_rank(R.astype(int).tolist()) == N
        assert exact_rank(S.astype(int).tolist()) == min(N, M)
        assert inst.A == 1 and inst.B == 2 * d.max() and inst.C == 4 * d.max() ** 2
        assert inst.C > inst.A and inst.C > inst.B

    def test_json_round_trip(self):
        inst = generate_instance(3, 2, 5)
        assert SchedulingInstance.from_dict(json.loads(inst.to_json())) == inst

    def test_weight_guard(self):
        with pytest.raises(ValueError):
            SchedulingInstance(1, 1, (5.0,), ((0.0,),), ((1.0,),), 1.0, 2.0, 1.5)


def test_exact_rank_matches_numpy():
    rng = np.random.default_rng(0)
    for _ in range(200):
        r, c = rng.integers(1, 6, size=2)
        a = rng.integers(-3, 4, size=(r, c))
        if rng.random() < 0.3:
            a[-1] = a[0] * 2
        assert exact_rank(a.tolist()) == np.linalg.matrix_rank(a)


class TestTerms:
    def test_objective_single_machine(self):
        assert len(build_objective(generate_instance(3, 1, 0))) == 0
        assert len(build_objective(generate_instance(1, 1, 0))) == 0

    def test_objective_without_setup_between_is_quadratic(self):
        inst = manual(2, 2, S=[[1.0, 2.0], [3.0, 4.0]])
        assert degree(build_objective(inst)) == 2

    def test_objective_generic_is_quartic(self):
        assert degree(build_objective(generate_instance(3, 2, 0))) == 4

    def test_objective_values_match_definition(self):
        inst = generate_instance(3, 2, 4)
        f = build_objective(inst)
        R, S, d = inst.setup_between, inst.setup_initial, inst.durations
        for bits in itertools.product((0, 1), repeat=6):
            x = lambda i, j: bits[i * 2 + j]  # noqa: E731
            load = [
                sum(x(i, j) * (d[i] + S[i][j]) for i in range(3))
                + sum(x(i, j) * x(k, j) * R[i][k] for i in range(3) for k in range(i + 1, 3))
                for j in range(2)
            ]
            assert evaluate(f, bits) == pytest.approx((load[0] - load[1]) ** 2)

    def test_setup_cost(self):
        assert len(build_setup_cost(manual(3, 2))) == 0
        inst = manual(2, 1, R=[[0, 3.0], [3.0, 0]], S=[[2.0], [4.0]])
        assert build_setup_cost(inst) == normalize({(0, 1): 3.0, (0,): 2.0, (1,): 4.0})
        assert degree(build_setup_cost(generate_instance(3, 2, 0))) == 2

    def test_assignment_constraint(self):
        inst = manual(1, 2)
        assert build_assignment_constraint(inst) == normalize({(): 1, (0,): -1, (1,): -1, (0, 1): 2})
        inst = generate_instance(3, 2, 0)
        h = build_assignment_constraint(inst)
        assert evaluate(h, (1, 0, 0, 1, 1, 0)) == 0
        assert evaluate(h, (0,) * 6) == 3

    def test_full_pubo(self):
        f = build_full_pubo(generate_instance(3, 2, 0))
        assert degree(f) == 4 and f.num_vars == 6
        assert degree(build_full_pubo(generate_instance(2, 1, 0))) == 2

    @pytest.mark.parametrize("N,M", [(3, 2), (2, 3), (4, 2), (3, 3)])
    def test_sums_of_squares_non_negative(self, N, M):
        inst = generate_instance(N, M, 1)
        for part in (build_objective, build_setup_cost, build_assignment_constraint):
            assert all_values(part(inst)).min() >= 0

    @pytest.mark.parametrize("N,M", [(3, 2), (3, 3), (4, 3), (5, 3), (6, 2)])
    def test_degree_at_most_four(self, N, M):
        assert degree(build_full_pubo(generate_instance(N, M, 0))) <= 4


@pytest.mark.parametrize("N,M,seed", [(3, 2, 0), (3, 3, 1), (4, 2, 2)])
def test_machine_swap_symmetry(N, M, seed):
    inst = generate_instance(N, M, seed)
    S = [list(row) for row in inst.setup_initial]
    for row in S:
        row[0], row[1] = row[1], row[0]
    swapped = SchedulingInstance(N, M, inst.durations, inst.setup_between,
                                 tuple(map(tuple, S)), inst.A, inst.B, inst.C)
    perm = [i * M + {0: 1, 1: 0}.get(j, j) for i in range(N) for j in range(M)]
    f, g = build_full_pubo(inst), build_full_pubo(swapped)
    assert relabel(g, perm) == f
    assert brute_force_min(g).min_value == pytest.approx(brute_force_min(f).min_value)
