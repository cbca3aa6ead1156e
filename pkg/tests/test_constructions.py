"""
极值构造测试

测试各构造的边数、度与报告中的性质检查
"""

from math import comb

import pytest

from app.exceptions import InstanceTooLargeError, ParameterOutOfRangeError
from app.internal.constructions import (
    CONSTRUCTION_NAMES,
    FAILED,
    FORMULA_CHECKED,
    VERIFIED,
    ConstructionReport,
    build_construction,
    construction_size,
    construction_t_report,
    counterexample_report,
    h_second_extremal_fixture,
    lower_bound_graph,
    lower_bound_report,
    ore_extremal,
    ore_report,
    second_extremal,
    second_extremal_report,
    tightness_pair,
    tightness_size,
)
from app.internal.exact_oracle import exact_pack, is_hamiltonian
from app.internal.graph_core import Graph
from app.internal.hypergraph import Hypergraph3


class TestConstructionReport:
    """测试报告模型"""

    def test_statuses(self):
        report = ConstructionReport(name="demo", params={"n": 4})
        report.add("exact", 1, 1)
        report.add("formula", True, True, exact=False)
        assert [p.status for p in report.properties] == [VERIFIED, FORMULA_CHECKED]
        assert report.ok
        report.add("broken", 2, 3)
        assert report.properties[-1].status == FAILED
        assert not report.ok


class TestLowerBound:
    """测试下界构造"""

    def test_n6_delta2(self):
        """
        验证点:
        - 边数 C(5,2) + 1 = 11
        - 最小度 δ - 1 = 1
        """
        g = lower_bound_graph(6, 2)
        assert g.edge_count == 11
        assert g.min_degree == 1
        assert g.degree(5) == 1

    def test_delta1_has_isolated_vertex(self):
        g = lower_bound_graph(5, 1)
        assert g.degree(4) == 0
        assert g.edge_count == comb(4, 2)

    def test_cycle_does_not_fit(self):
        g = lower_bound_graph(6, 2)
        assert exact_pack(g.complement(), Graph.cycle(6)) is None

    def test_report(self):
        _, report = lower_bound_report(8, 3)
        assert report.ok

    @pytest.mark.parametrize("n,delta", [(6, 0), (6, 6), (1, 1)])
    def test_out_of_range(self, n, delta):
        with pytest.raises(ParameterOutOfRangeError):
            lower_bound_graph(n, delta)


class TestTightness:
    """测试最大度系数的紧性构造"""

    def test_sizes(self):
        assert tightness_size(2) == 9
        assert tightness_size(4) == 21

    def test_k2_exact(self):
        """
        k = 2，n = 9

        验证点:
        - H 为两个 K_4 加一个度为 δ 的顶点
        - G 边数超过 C(n-1,2) + δ - 1
        - 精确搜索确认 H 不是 G 的生成子图
        """
        h, g_full, report = tightness_pair(2, 2)
        assert h.n == 9
        assert h.degree(8) == 2
        assert g_full.edge_count == comb(9, 2) - comb(4, 2)
        assert g_full.edge_count > comb(8, 2) + 2 - 1
        assert report.ok
        assert all(p.status == VERIFIED for p in report.properties if p.name == "h_not_spanning_in_g_full")

    def test_k4(self):
        h, g_full, report = tightness_pair(4, 1)
        assert h.n == 21
        assert report.ok

    @pytest.mark.parametrize("k,delta", [(3, 1), (0, 1), (2, 4)])
    def test_out_of_range(self, k, delta):
        with pytest.raises(ParameterOutOfRangeError):
            tightness_pair(k, delta)


class TestNonHamiltonianExtremal:
    """测试非哈密顿极值图"""

    @pytest.mark.parametrize("n", [6, 7, 8])
    def test_ore(self, n):
        g = ore_extremal(n)
        assert g.edge_count == comb(n - 1, 2) + 1
        assert not is_hamiltonian(g)
        assert ore_report(n)[1].ok

    @pytest.mark.parametrize("n", [6, 7])
    def test_second_extremal(self, n):
        """
        验证点:
        - 边数与 Ore 构造相同
        - 中心顶点度为 2
        - 样例 H 不是其生成子图
        """
        g = second_extremal(n)
        assert g.edge_count == ore_extremal(n).edge_count
        assert g.degree(0) == 2
        _, report = second_extremal_report(n)
        assert report.ok

    def test_fixture_shape(self):
        h = h_second_extremal_fixture(8)
        degrees = h.degrees()
        assert degrees[0] == 2
        assert h.has_edge(1, 2)
        assert min(degrees[1:]) >= 3

    def test_too_small(self):
        with pytest.raises(ParameterOutOfRangeError):
            second_extremal(5)
        with pytest.raises(ParameterOutOfRangeError):
            ore_extremal(3)


class TestHypergraphReports:
    """测试超图构造报告"""

    def test_counterexample_report(self):
        hg, report = counterexample_report(2)
        assert hg.n == 11
        assert hg.edge_count == 21
        assert report.ok

    def test_construction_t_report(self):
        t, report = construction_t_report(11)
        assert t.n == 11
        assert report.ok


class TestBuildConstruction:
    """测试统一入口"""

    def test_all_names(self):
        params = {
            "lower-bound": {"n": 7, "delta": 2},
            "tightness": {"k": 2, "delta": 1},
            "ore": {"n": 7},
            "second-extremal": {"n": 6},
            "hyper-h": {"s": 2},
            "hyper-t": {"n": 8},
        }
        assert set(params) == set(CONSTRUCTION_NAMES)
        for name in CONSTRUCTION_NAMES:
            objects, report = build_construction(name, params[name])
            assert objects
            assert report.ok, name
            assert all(isinstance(o, (Graph, Hypergraph3)) for o in objects.values())

    def test_second_extremal_emits_fixture(self):
        objects, _ = build_construction("second-extremal", {"n": 7})
        assert set(objects) == {"second-extremal", "second-extremal-h"}

    def test_missing_param(self):
        with pytest.raises(ParameterOutOfRangeError) as exc_info:
            build_construction("lower-bound", {"n": 6})
        assert "delta" in exc_info.value.message

    def test_unknown_name(self):
        with pytest.raises(ParameterOutOfRangeError):
            build_construction("petersen", {})

    def test_size(self):
        assert construction_size("tightness", {"k": 2}) == 9
        assert construction_size("hyper-h", {"s": 2}) == 11
        assert construction_size("ore", {"n": 7}) == 7
        assert construction_size("lower-bound", {"delta": 2}) == 0

    def test_limit(self):
        """
        验证点：
        - 超过 limit 的构造在生成之前被拒绝
        - 恰好等于 limit 的构造照常生成
        """
        with pytest.raises(InstanceTooLargeError) as exc_info:
            build_construction("ore", {"n": 100000}, limit=200)
        assert exc_info.value.limit == 200
        with pytest.raises(InstanceTooLargeError):
            build_construction("hyper-h", {"s": 3}, limit=15)
        objects, _ = build_construction("ore", {"n": 6}, limit=6)
        assert objects["ore"].n == 6
