"""
填装引擎测试

测试前提检查、S_i / B_i 构造、储备集抽样、四个阶段与完整流程
"""

import math

import numpy as np
import pytest

from app.exceptions import (
    GuaranteeViolationError,
    IsolatedVertexError,
    MaxDegreeExceededError,
    NotABijectionError,
    ParameterOutOfRangeError,
    SizeMismatchError,
    TooManyMissingEdgesError,
)
from app.internal.experiments import random_g, random_h
from app.internal.graph_core import Graph, VertexSet, degree_sequence_order, is_independent
from app.internal.packing_engine import (
    GuaranteeViolation,
    PackingConfig,
    PackingMap,
    PackingState,
    StageTrace,
    Success,
    build_s1,
    build_si,
    check_degree_bounds,
    check_inputs,
    lemma2_report,
    outcome_document,
    pack,
    reservoir_range,
    sample_reservoirs,
    stage3,
    verify_packing,
)
from app.internal.utils import derive_rng, derive_seed


# ========== 配置 ==========


class TestPackingConfig:
    """测试常数配置"""

    def test_defaults(self):
        cfg = PackingConfig()
        assert cfg.maxdeg_divisor == 200
        assert cfg.small_degree_cap == 10
        assert cfg.s_size_coeff == pytest.approx(1 / 18)

    def test_from_settings_ignores_none(self):
        cfg = PackingConfig.from_settings(seed=None, maxdeg_divisor=None)
        assert cfg.seed == 20140101
        assert cfg.max_resamples == 64
        assert cfg.maxdeg_divisor == 200

    def test_divisor_below_sqrt2_rejected(self):
        with pytest.raises(ParameterOutOfRangeError):
            PackingConfig.from_settings(maxdeg_divisor=1.4)

    def test_unknown_field_rejected(self):
        with pytest.raises(ParameterOutOfRangeError):
            PackingConfig.from_settings(alpha=3)


# ========== 前提检查 ==========


class TestCheckInputs:
    """测试前提检查"""

    def test_size_mismatch(self, small_config):
        with pytest.raises(SizeMismatchError):
            check_inputs(Graph.empty(4), Graph.cycle(5), small_config)

    def test_isolated_vertex(self, small_config):
        h = Graph.from_edges(12, [(i, i + 1) for i in range(10)])
        with pytest.raises(IsolatedVertexError) as exc_info:
            check_inputs(Graph.empty(12), h, small_config)
        assert exc_info.value.message.startswith("IsolatedVertexInH")

    def test_star_with_too_many_edges(self):
        """
        n = 10000，H 为完美匹配，G 为 9999 条边的星

        验证点:
        - 9999 > n - δ - 1 = 9998，报 TooManyMissingEdges
        - 该检查先于最大度检查
        """
        n = 10000
        g = Graph.star(n, 0, range(1, n))
        h = Graph.perfect_matching(n)
        with pytest.raises(TooManyMissingEdgesError):
            check_inputs(g, h, PackingConfig())

    def test_bound_is_inclusive(self):
        n = 10000
        g = Graph.star(n, 0, range(1, n - 1))
        h = Graph.perfect_matching(n)
        check_inputs(g, h, PackingConfig(maxdeg_divisor=100))

    def test_max_degree(self, small_config):
        with pytest.raises(MaxDegreeExceededError):
            check_inputs(Graph.empty(12), Graph.disjoint_cliques(12, 4), small_config)

    def test_degree_bounds_hold(self):
        g = Graph.star(12, 0, range(1, 10))
        bounds = check_degree_bounds(g, degree_sequence_order(g), 2)
        assert bounds == {"d1_bound": True, "d2_bound": True, "harmonic_bound": True}


# ========== S / B 构造 ==========


class TestReservoirSets:
    """测试 S_1 与 S_i"""

    def test_s1_edgeless(self):
        g = Graph.empty(12)
        s1 = build_s1(g, degree_sequence_order(g), 2, PackingConfig())
        assert s1.members == tuple(range(1, 12))

    def test_s1_star_leaves(self):
        n = 100
        g = Graph.star(n, 0, range(1, n - 2))
        s1 = build_s1(g, degree_sequence_order(g), 2, PackingConfig())
        assert len(s1) >= 2
        assert 0 not in s1
        assert is_independent(g, s1)

    def test_s1_failure(self):
        g = Graph.perfect_matching(12)
        with pytest.raises(GuaranteeViolationError) as exc_info:
            build_s1(g, degree_sequence_order(g), 2, PackingConfig(s1_degree_coeff=0.1))
        assert exc_info.value.stage == "S1"

    def test_si_edgeless(self):
        g = Graph.empty(40)
        b1 = VertexSet(40, [5, 6])
        s_i = build_si(g, 3, b1, PackingConfig())
        assert set(s_i) == set(range(40)) - {3, 5, 6}

    def test_si_degree_cap(self):
        g = Graph.star(40, 7, range(20, 31))
        s_i = build_si(g, 0, VertexSet(40, [1]), PackingConfig())
        assert 7 not in s_i

    def test_si_perfect_matching(self):
        """
        n = 1000 的完美匹配

        验证点:
        - |S_i| >= 1000 / 18
        - S_i 避开 N[v_i] 与 N[B_1]
        """
        g = Graph.perfect_matching(1000)
        s_i = build_si(g, 0, VertexSet(1000, [2]), PackingConfig())
        assert len(s_i) >= 56
        assert not {0, 1, 2, 3} & set(s_i)

    def test_reservoir_range(self):
        g = Graph.empty(400)
        assert reservoir_range(g, degree_sequence_order(g), PackingConfig()) == (0, 2)


# ========== 储备集抽样 ==========


class TestLemma2:
    """测试储备集抽样"""

    def test_edgeless_has_empty_c(self):
        n = 400
        g = Graph.empty(n)
        order = degree_sequence_order(g)
        cfg = PackingConfig()
        sets = {2: build_si(g, order[1], VertexSet(n, [1]), cfg)}
        report = lemma2_report(g, order, sets, cfg, np.random.default_rng(0))
        assert all(len(c) == 0 for c in report.c.values())
        assert report.conjunct_c

    def test_empty_si_fails_before_sampling(self):
        g = Graph.empty(400)
        order = degree_sequence_order(g)
        trace = StageTrace()
        with pytest.raises(GuaranteeViolationError) as exc_info:
            sample_reservoirs(g, order, {2: VertexSet.empty(400)}, PackingConfig(), trace=trace)
        assert exc_info.value.stage == "Lemma2"
        assert trace.of_kind("sample") == []

    def test_sampling_is_deterministic(self):
        """
        验证点:
        - 相同种子得到相同的 B_i
        - B_i ⊆ S_i
        """
        n = 400
        g = random_g("random", n, n - 2, np.random.default_rng(3))
        order = degree_sequence_order(g)
        cfg = PackingConfig(seed=5)
        b1 = build_s1(g, order, 1, cfg).take(1)
        _, last = reservoir_range(g, order, cfg)
        sets = {i: build_si(g, order[i - 1], b1, cfg) for i in range(2, last + 1)}

        first = sample_reservoirs(g, order, sets, cfg, b1=b1)
        second = sample_reservoirs(g, order, sets, cfg.model_copy(update={"max_resamples": 128}), b1=b1)
        assert first.b == second.b
        assert first.attempts == second.attempts
        for i, b_i in first.b.items():
            assert set(b_i) <= set(sets[i])


# ========== 阶段 ==========


class TestStage3:
    """测试 Stage 3 的独立集下界"""

    def test_small_j_is_violation(self, empty12, c12, small_config):
        """
        验证点:
        - 只剩 2 个未匹配顶点时 |J| = 2 < 12/4，报告 Stage3-J
        """
        state = PackingState(empty12, c12, StageTrace())
        for v in range(10):
            state.match(v, v, "stage1")
        with pytest.raises(GuaranteeViolationError) as exc_info:
            stage3(state, empty12, c12, small_config)
        assert exc_info.value.stage == "Stage3-J"

    def test_large_j_matches_rest(self, empty12, c12, small_config):
        state = PackingState(empty12, c12, StageTrace())
        for v in range(4):
            state.match(v, v, "stage1")
        stage3(state, empty12, c12, small_config)
        assert len(state.independent) == 8
        assert state.matched_count == 4


# ========== 验证 ==========


class TestVerifyPacking:
    """测试填装验证"""

    def test_edgeless_always_true(self, c12):
        assert verify_packing(Graph.empty(12), c12, list(range(12)))

    def test_edge_onto_edge(self):
        g = Graph.from_edges(2, [(0, 1)])
        assert not verify_packing(g, g, [0, 1])

    def test_cycle_onto_matching_diagonals(self):
        g = Graph.cycle(4)
        h = Graph.perfect_matching(4)
        assert verify_packing(g, h, [0, 2, 1, 3])
        assert not verify_packing(g, h, [0, 1, 2, 3])

    def test_not_a_bijection(self, c12):
        with pytest.raises(NotABijectionError):
            verify_packing(Graph.empty(12), c12, [0] * 12)
        with pytest.raises(NotABijectionError):
            verify_packing(Graph.empty(12), c12, list(range(11)))

    def test_mapping_inverse(self):
        mapping = PackingMap.of([2, 0, 1])
        assert mapping.inverse() == (1, 2, 0)
        assert mapping.to_list() == [2, 0, 1]


# ========== 完整流程 ==========


class TestPack:
    """测试完整填装流程"""

    def test_edgeless_cycle(self, empty12, c12, small_config):
        """
        G 无边，H = C_12

        验证点:
        - 返回 Success
        - 映射是双射且通过验证
        - 审计日志一致
        """
        outcome = pack(empty12, c12, small_config)

        assert isinstance(outcome, Success)
        assert sorted(outcome.mapping.to_list()) == list(range(12))
        assert verify_packing(empty12, c12, outcome.mapping)
        assert outcome.trace.is_consistent()
        assert len(outcome.trace.matched_pairs()) == 12

    def test_deterministic_trace(self, c12, small_config):
        g = Graph.from_edges(12, [(0, 5), (3, 8), (6, 7)])
        first = pack(g, c12, small_config)
        second = pack(g, c12, small_config)

        assert isinstance(first, Success)
        assert first.mapping == second.mapping
        assert first.trace.to_json() == second.trace.to_json()

    def test_extremal_star_rejected(self, c12, small_config):
        g = Graph.star(12, 0, range(1, 11))
        with pytest.raises(TooManyMissingEdgesError):
            pack(g, c12, small_config)

    def test_violation_is_returned(self, c12):
        cfg = PackingConfig.from_settings(maxdeg_divisor=1.5, s1_degree_coeff=0.1)
        outcome = pack(Graph.perfect_matching(12), c12, cfg)

        assert isinstance(outcome, GuaranteeViolation)
        assert outcome.stage == "S1"
        assert outcome.trace.events[-1].kind == "violation"

    def test_star_missing_edges(self, medium_config):
        n = 400
        g = Graph.star(n, 5, [v for v in range(n) if v not in (5, 6, 7)])
        h = Graph.perfect_matching(n)
        outcome = pack(g, h, medium_config)

        assert isinstance(outcome, Success)
        assert verify_packing(g, h, outcome.mapping)

    @pytest.mark.parametrize("model", ["random", "forest", "matching", "star-noise"])
    def test_random_missing_edges(self, model, medium_config):
        n = 400
        for seed in range(3):
            rng = np.random.default_rng(seed)
            g = random_g(model, n, n - 2, rng)
            h = Graph.perfect_matching(n).relabel(rng.permutation(n).tolist())
            outcome = pack(g, h, medium_config)
            assert isinstance(outcome, Success), getattr(outcome, "reason", "")
            assert verify_packing(g, h, outcome.mapping)

    def test_timings_recorded(self, empty12, c12, small_config):
        outcome = pack(empty12, c12, small_config)
        assert set(outcome.timings) == {"setup", "Lemma2", "stage1", "stage2", "stage3", "stage4"}

    def test_outcome_document(self, empty12, c12, small_config):
        document = outcome_document(pack(empty12, c12, small_config), small_config)
        assert document["format"] == 1
        assert document["outcome"] == "success"
        assert document["verified"] is True
        assert document["rng"] == "PCG64"
        assert document["seed"] == 7
        assert document["config"]["maxdeg_divisor"] == 1.5

    def test_three_high_degree_stars(self, medium_config):
        """
        三个不交的 40 叶星，n = 400，high_degree_coeff 调到 1.5 使阈值为 30

        验证点:
        - k = 3，Stage 2 依次处理 v_2、v_3
        - 每一轮检查点的三条不变量成立，Y ⊆ C_i ∪ B_1，|X ∪ Y| < 6√n
        - 三个中心都被匹配，结果通过验证
        """
        n = 400
        arm = 40
        edges = [(c, 3 + c * arm + j) for c in range(3) for j in range(arm)]
        g = Graph.from_edges(n, edges)
        h = Graph.perfect_matching(n)
        cfg = medium_config.model_copy(update={"high_degree_coeff": 1.5, "d_range_coeff": 0.15})
        outcome = pack(g, h, cfg)

        assert isinstance(outcome, Success), getattr(outcome, "reason", "")
        assert verify_packing(g, h, outcome.mapping)
        assert outcome.trace.of_kind("begin", "stage2")[0].data["k"] == 3
        checkpoints = outcome.trace.checkpoints("stage2")
        assert [c["i"] for c in checkpoints] == [2, 3]
        for c in checkpoints:
            assert c["inv1"] and c["inv2"] and c["inv3"]
            assert c["y_within_c_b1"]
            assert c["xy_below_6sqrt"]
        matched = dict(outcome.trace.matched_pairs())
        assert {0, 1, 2} <= set(matched)

    def test_random_triples_are_sound(self):
        """
        50 组随机 (G, H, seed)，均满足前提

        验证点:
        - 每次结果要么是 Success，要么是带阶段名的 GuaranteeViolation
        - 每个 Success 的映射都通过 verify_packing
        - 审计日志中没有重复匹配
        """
        g_models = ["empty", "matching", "forest", "random", "star-noise"]
        h_models = ["matching", "triangles"]
        sizes = [36, 60, 96, 120]
        for trial in range(50):
            rng = derive_rng(2024, trial)
            n = sizes[trial % len(sizes)]
            h = random_h(h_models[trial % len(h_models)], n, rng)
            g = random_g(g_models[trial % len(g_models)], n, n - h.min_degree - 1, rng)
            cfg = PackingConfig.from_settings(
                maxdeg_divisor=1.5, high_degree_coeff=1.0, seed=derive_seed(2024, trial)
            )
            outcome = pack(g, h, cfg)

            assert isinstance(outcome, (Success, GuaranteeViolation))
            assert outcome.trace.is_consistent()
            if isinstance(outcome, Success):
                assert verify_packing(g, h, outcome.mapping)
            else:
                assert outcome.stage
                assert outcome.trace.events[-1].kind == "violation"

    @pytest.mark.slow
    def test_two_high_degree_stars(self):
        """
        两个不交的高度数星，n = 10^4

        验证点:
        - k = 2，两个中心都被匹配
        - Stage 2 的检查点不变量全部成立
        """
        n = 10000
        arm = 25 * int(math.sqrt(n))
        edges = [(0, v) for v in range(2, 2 + arm)] + [(1, v) for v in range(2 + arm, 2 + 2 * arm)]
        g = Graph.from_edges(n, edges)
        h = Graph.perfect_matching(n)
        outcome = pack(g, h, PackingConfig.from_settings(maxdeg_divisor=100))

        assert isinstance(outcome, Success)
        checkpoints = outcome.trace.checkpoints("stage2")
        assert [c["i"] for c in checkpoints] == [2]
        for c in checkpoints:
            assert c["inv1"] and c["inv2"] and c["inv3"]
        matched = dict(outcome.trace.matched_pairs())
        assert 0 in matched and 1 in matched

    @pytest.mark.slow
    def test_large_random_instances(self):
        """n = 40000，H 为完美匹配，G 为 n-2 条随机边，50 个种子全部成功"""
        n = 40000
        for seed in range(50):
            rng = np.random.default_rng(seed)
            g = random_g("random", n, n - 2, rng)
            h = Graph.perfect_matching(n)
            outcome = pack(g, h, PackingConfig.from_settings(seed=seed))
            assert isinstance(outcome, Success)
