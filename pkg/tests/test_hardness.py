from fractions import Fraction

import numpy as np
import pytest

from padd import (
    Affine,
    BoxDomain,
    PreconditionError,
    RoundingState,
    Shape,
    SolverConfig,
    brute_force_max,
    build_cost,
    classify,
    derandomize,
    mis_brute_force,
    solve_concave,
    surplus_U,
    surplus_exact,
)
from padd.funcs import check_monotone
from padd.graphs import (
    GraphInstance,
    clique_graph,
    cycle_graph,
    empty_graph,
    parse_graph_json,
    parse_graph_text,
    path_graph,
    star_graph,
)
from padd.instances import hardness_corpus


def surplus_oracle(g, x):
    """Direct formula: sum_i [x_i - min(sum_j A_ji x_j, x_i)]."""
    x = np.asarray(x, dtype=float)
    a = g.adjacency
    return float(sum(x[i] - min(a[:, i] @ x, x[i]) for i in range(g.node_count)))


class TestBuildCost:
    def test_empty_graph_costs_nothing(self):
        c = build_cost(empty_graph(3))
        assert c.value((1.0, 1.0, 1.0)) == 0.0

    def test_single_edge(self):
        c = build_cost(GraphInstance.from_edges(2, [(0, 1)]))
        assert c.value((1.0, 1.0)) == 2.0

    def test_triangle_all_ones(self):
        c = build_cost(clique_graph(3))
        assert c.value((1.0, 1.0, 1.0)) == 3.0

    def test_structural_properties(self, rng):
        c = build_cost(cycle_graph(5))
        assert classify(c) is Shape.CONCAVE
        assert c.value(np.zeros(5)) == 0.0
        assert check_monotone(c, BoxDomain(np.ones(5)), rng)


class TestSurplus:
    def test_path_indicator(self):
        assert surplus_U(path_graph(3), (1.0, 0.0, 1.0)) == 2.0

    def test_zero_point(self):
        assert surplus_U(cycle_graph(4), np.zeros(4)) == 0.0

    def test_triangle_all_ones(self):
        assert surplus_U(clique_graph(3), (1.0, 1.0, 1.0)) == 0.0

    def test_matches_value_minus_cost(self, rng):
        for name, g in hardness_corpus()[:8]:
            c = build_cost(g)
            v = Affine((1.0,) * g.node_count, 0.0)
            for _ in range(20):
                x = rng.random(g.node_count)
                assert abs(surplus_U(g, x) - (v.value(x) - c.value(x))) < 1e-12, name
                assert abs(surplus_U(g, x) - surplus_oracle(g, x)) < 1e-12, name

    def test_out_of_box_rejected(self):
        with pytest.raises(PreconditionError):
            surplus_U(path_graph(2), (1.5, 0.0))


class TestBruteForce:
    def test_triangle(self):
        val, arg = brute_force_max(clique_graph(3))
        assert val == 1
        assert arg.tolist() == [0.0, 0.0, 1.0]  # lexicographically smallest

    def test_path_three(self):
        val, arg = brute_force_max(path_graph(3))
        assert val == 2
        assert arg.tolist() == [1.0, 0.0, 1.0]

    def test_empty_graph(self):
        val, arg = brute_force_max(empty_graph(6))
        assert val == 6
        assert arg.tolist() == [1.0] * 6

    def test_value_is_integer(self):
        for name, g in hardness_corpus():
            val, _ = brute_force_max(g)
            assert isinstance(val, int), name

    def test_too_large_rejected(self):
        with pytest.raises(PreconditionError):
            brute_force_max(empty_graph(21))


class TestMisOracle:
    def test_small_cases(self):
        assert mis_brute_force(clique_graph(3)) == 1
        assert mis_brute_force(cycle_graph(5)) == 2
        assert mis_brute_force(empty_graph(7)) == 7
        assert mis_brute_force(star_graph(6)) == 5
        assert mis_brute_force(path_graph(4)) == 2

    def test_reduction_identity_over_corpus(self):
        corpus = hardness_corpus()
        assert len(corpus) >= 20
        for name, g in corpus:
            assert g.node_count <= 12, name
            val, arg = brute_force_max(g)
            assert val == mis_brute_force(g), name
            # the maximizer's active nodes really form an independent set
            active = np.nonzero(arg)[0]
            sub = g.adjacency[np.ix_(active, active)]
            assert sub.sum() == 0, name


class TestConvexityOfSurplus:
    def test_midpoint_inequality(self, rng):
        for name, g in hardness_corpus()[:10]:
            for _ in range(50):
                x = rng.random(g.node_count)
                y = rng.random(g.node_count)
                mid = surplus_U(g, (x + y) / 2)
                assert mid <= (surplus_U(g, x) + surplus_U(g, y)) / 2 + 1e-12, name


class TestDerandomize:
    def test_binary_input_unchanged(self):
        g = path_graph(3)
        for x in ([1.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]):
            assert derandomize(g, x).tolist() == x

    def test_dominance_is_exact(self, rng):
        for name, g in hardness_corpus():
            for _ in range(10):
                xbar = rng.random(g.node_count)
                rounded = derandomize(g, xbar)
                assert set(np.unique(rounded)) <= {0.0, 1.0}, name
                assert surplus_exact(g, rounded) >= surplus_exact(g, xbar), name

    def test_path_midpoint_example(self):
        g = path_graph(3)
        xbar = (0.5, 0.5, 0.5)
        rounded = derandomize(g, xbar)
        assert surplus_exact(g, rounded) >= surplus_exact(g, xbar)

    def test_triangle_thirds_example(self):
        g = clique_graph(3)
        xbar = (1 / 3, 1 / 3, 1 / 3)
        rounded = derandomize(g, xbar)
        assert surplus_exact(g, rounded) >= surplus_exact(g, xbar)

    def test_jensen_direction(self, rng):
        # independent randomized rounding never loses surplus in expectation
        for name, g in hardness_corpus()[:10]:
            for _ in range(10):
                xbar = rng.random(g.node_count)
                state = RoundingState.from_fractional(g, xbar)
                assert state.expected_surplus() >= surplus_exact(g, xbar), name

    def test_expected_surplus_closed_form(self):
        g = path_graph(3)
        state = RoundingState.from_fractional(g, (0.5, 0.5, 0.5))
        # p1(1-p2) + p2(1-p1)(1-p3) + p3(1-p2)
        assert state.expected_surplus() == Fraction(5, 8)


class TestEquilibriumConsistency:
    def test_surplus_equals_mis_via_solver(self):
        cfg = SolverConfig(vertex_enumeration=True)
        for name, g in hardness_corpus()[:12]:
            d = g.node_count
            v = Affine((1.0,) * d, 0.0)
            out = solve_concave(v, build_cost(g), BoxDomain(np.ones(d)), cfg)
            assert out.buyer_surplus == mis_brute_force(g), name


class TestGraphParsing:
    def test_text_format(self):
        g = parse_graph_text("3 2\n1 2\n2 3\n")
        assert g.node_count == 3 and g.edges == [(0, 1), (1, 2)]

    def test_json_mirror(self):
        g = path_graph(4)
        assert parse_graph_json(g.to_dict()).edges == g.edges

    def test_self_loop_rejected(self):
        with pytest.raises(PreconditionError):
            parse_graph_text("2 1\n1 1\n")

    def test_bad_header_rejected(self):
        with pytest.raises(ValueError):
            parse_graph_text("3\n1 2\n")

    def test_edge_count_mismatch_rejected(self):
        with pytest.raises(ValueError):
            parse_graph_text("3 2\n1 2\n")
