"""
穷举求解模块测试

测试精确填装、精确 Turán 数、哈密顿性、极值图枚举与同构判定
"""

import itertools
from math import comb

import networkx as nx
import numpy as np
import pytest

from app.exceptions import InstanceTooLargeError, ParameterOutOfRangeError
from app.internal.constructions import ore_extremal
from app.internal.exact_oracle import (
    are_isomorphic,
    brute_ex,
    canonical_form,
    clique_number,
    enumerate_extremal,
    exact_pack,
    independence_number,
    is_hamiltonian,
)
from app.internal.graph_core import Graph
from app.internal.packing_engine import verify_packing


def _random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def _to_nx(g: Graph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from(g.edges())
    return graph


class TestExactPack:
    """测试精确填装判定"""

    def test_edgeless_always_packs(self):
        h = Graph.cycle(7)
        mapping = exact_pack(Graph.empty(7), h)
        assert mapping is not None
        assert verify_packing(Graph.empty(7), h, mapping)

    def test_ore_star_does_not_pack_with_cycle(self):
        """
        G = S_{1,4}，H = C_6

        验证点:
        - K_6 - S_{1,4} 不含哈密顿圈，返回 None
        """
        g = Graph.star(6, 0, range(1, 5))
        assert exact_pack(g, Graph.cycle(6)) is None

    def test_small_star_packs_with_cycle(self):
        g = Graph.star(6, 0, [1, 2, 3])
        h = Graph.cycle(6)
        mapping = exact_pack(g, h)
        assert mapping is not None
        assert verify_packing(g, h, mapping)

    def test_size_mismatch(self):
        with pytest.raises(ParameterOutOfRangeError):
            exact_pack(Graph.empty(4), Graph.cycle(5))

    def test_limit(self):
        with pytest.raises(InstanceTooLargeError):
            exact_pack(Graph.empty(17), Graph.cycle(17))
        assert exact_pack(Graph.empty(17), Graph.cycle(17), force=True) is not None


class TestBruteEx:
    """测试精确 Turán 数"""

    def test_cycle4(self):
        result = brute_ex(4, Graph.cycle(4))
        assert result.ex_value == 4
        assert result.min_missing == 2
        assert result.witness.edge_count == 4
        assert not is_hamiltonian(result.witness)

    def test_perfect_matching4(self):
        result = brute_ex(4, Graph.perfect_matching(4))
        assert result.ex_value == 3 == comb(3, 2) + 1 - 1

    def test_single_edge(self):
        result = brute_ex(2, Graph.from_edges(2, [(0, 1)]))
        assert result.ex_value == 0

    @pytest.mark.parametrize("n", [5, 6, 7])
    def test_cycles_match_formula(self, n):
        result = brute_ex(n, Graph.cycle(n))
        assert result.ex_value == comb(n - 1, 2) + 1
        assert result.missing == result.witness.complement()

    def test_limit(self):
        with pytest.raises(InstanceTooLargeError):
            brute_ex(10, Graph.cycle(10))

    def test_edgeless_target_rejected(self):
        with pytest.raises(ParameterOutOfRangeError):
            brute_ex(4, Graph.empty(4))

    def test_parallel_matches_sequential(self):
        h = Graph.cycle(6)
        assert brute_ex(6, h, workers=2) == brute_ex(6, h, workers=1)

    @pytest.mark.slow
    def test_triangles9_match_formula(self):
        h = Graph.disjoint_cliques(9, 3)
        assert brute_ex(9, h).ex_value == comb(8, 2) + 2 - 1


class TestHamiltonian:
    """测试哈密顿圈判定"""

    def test_cycle(self):
        assert is_hamiltonian(Graph.cycle(5))

    def test_k4_minus_edge(self):
        g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
        assert is_hamiltonian(g)

    def test_ore_extremal(self):
        assert not is_hamiltonian(ore_extremal(6))

    def test_tiny_graphs(self):
        assert not is_hamiltonian(Graph.complete(2))
        assert is_hamiltonian(Graph.complete(3))

    def test_matches_networkx_cycle_search(self):
        """随机小图上与 networkx 的环枚举一致"""
        rng = np.random.default_rng(2)
        for _ in range(15):
            g = _random_graph(7, 0.5, rng)
            cycles = nx.simple_cycles(_to_nx(g), length_bound=7)
            expected = any(len(c) == 7 for c in cycles)
            assert is_hamiltonian(g) == expected


class TestEnumerateExtremal:
    """测试极值图枚举"""

    def test_cycle6_unique(self):
        classes = enumerate_extremal(6, Graph.cycle(6))
        assert len(classes) == 1
        assert are_isomorphic(classes[0], ore_extremal(6))

    def test_cycle5_contains_ore(self):
        classes = enumerate_extremal(5, Graph.cycle(5))
        assert any(are_isomorphic(g, ore_extremal(5)) for g in classes)
        assert all(g.edge_count == comb(4, 2) + 1 for g in classes)

    def test_perfect_matching4(self):
        """
        验证点:
        - 两个同构类：K_{1,3} 与 K_3 ∪ K_1
        """
        classes = enumerate_extremal(4, Graph.perfect_matching(4))
        star = Graph.star(4, 0, [1, 2, 3])
        triangle = Graph.from_edges(4, [(0, 1), (0, 2), (1, 2)])
        assert len(classes) == 2
        assert any(are_isomorphic(g, star) for g in classes)
        assert any(are_isomorphic(g, triangle) for g in classes)

    def test_classes_pairwise_non_isomorphic(self):
        classes = enumerate_extremal(5, Graph.cycle(5))
        for a, b in itertools.combinations(classes, 2):
            assert not are_isomorphic(a, b)


class TestCliquesAndIsomorphism:
    """测试团数与同构"""

    def test_clique_and_independence_match_networkx(self):
        rng = np.random.default_rng(4)
        for _ in range(15):
            g = _random_graph(10, 0.4, rng)
            expected = max(len(c) for c in nx.find_cliques(_to_nx(g)))
            assert clique_number(g) == expected
            expected_alpha = max(len(c) for c in nx.find_cliques(nx.complement(_to_nx(g))))
            assert independence_number(g) == expected_alpha

    def test_relabeled_graph_is_isomorphic(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            g = _random_graph(7, 0.4, rng)
            perm = rng.permutation(7).tolist()
            assert canonical_form(g) == canonical_form(g.relabel(perm))

    def test_same_degrees_not_isomorphic(self):
        two_triangles = Graph.disjoint_cliques(6, 3)
        assert not are_isomorphic(Graph.cycle(6), two_triangles)

    def test_matches_networkx(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            a = _random_graph(6, 0.5, rng)
            b = _random_graph(6, 0.5, rng)
            assert are_isomorphic(a, b) == nx.is_isomorphic(_to_nx(a), _to_nx(b))
