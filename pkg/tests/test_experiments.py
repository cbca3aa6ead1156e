"""
实验模块测试

测试随机图模型、储备集统计、填装试验与常数扫描
"""

import csv
import io
import math

import pytest

from app.exceptions import ParameterOutOfRangeError, UnknownModelSpecError
from app.internal.experiments import (
    G_MODELS,
    H_MODELS,
    OUTSIDE_THEOREM,
    SWEEP_HEADER,
    Lemma2Table,
    TrialRecord,
    boundary_h_spec,
    check_model,
    constant_sweep,
    failure_profile,
    lemma2_stats,
    random_g,
    random_h,
    run_trials,
)
from app.internal.graph_core import connected_components
from app.internal.packing_engine import PackingConfig
from app.internal.utils import derive_rng, derive_seed


class TestSeeds:
    """测试种子派生"""

    def test_derive_seed_stable(self):
        assert derive_seed(7, 3) == derive_seed(7, 3)
        assert derive_seed(7, 3) != derive_seed(7, 4)
        assert 0 <= derive_seed(7, 3) < 2 ** 64

    def test_derive_rng_streams(self):
        a = derive_rng(1, 0).integers(0, 1 << 30, size=4).tolist()
        b = derive_rng(1, 0).integers(0, 1 << 30, size=4).tolist()
        c = derive_rng(1, 1).integers(0, 1 << 30, size=4).tolist()
        assert a == b
        assert a != c


class TestModels:
    """测试随机图模型"""

    def test_check_model(self):
        check_model("random:5", G_MODELS)
        check_model("random", G_MODELS)
        check_model("cliques:4", H_MODELS)
        for spec, models in [
            ("cliques", H_MODELS),
            ("matching:3", H_MODELS),
            ("random:x", G_MODELS),
            ("petersen", G_MODELS),
        ]:
            with pytest.raises(UnknownModelSpecError):
                check_model(spec, models)

    def test_random_g_budget(self):
        """
        验证点:
        - random / forest 默认取 budget 条边
        - forest 无环
        - 显式参数覆盖 budget
        """
        rng = derive_rng(3, 0)
        assert random_g("empty", 20, 5, rng).edge_count == 0
        assert random_g("matching", 20, 5, rng).edge_count == 10
        assert random_g("random", 20, 15, rng).edge_count == 15
        assert random_g("random:4", 20, 15, rng).edge_count == 4
        forest = random_g("forest", 20, 12, rng)
        assert forest.edge_count == 12
        assert len(connected_components(forest, range(20))) == 20 - 12

    def test_star_noise(self):
        g = random_g("star-noise:2", 50, 20, derive_rng(4, 0))
        assert 18 <= g.edge_count <= 20
        assert g.max_degree >= 18

    def test_random_g_deterministic(self):
        first = random_g("random", 30, 20, derive_rng(9, 0))
        second = random_g("random", 30, 20, derive_rng(9, 0))
        assert first == second

    def test_random_h(self):
        rng = derive_rng(5, 1)
        triangles = random_h("triangles", 12, rng)
        assert triangles.edge_count == 12
        assert set(triangles.degrees()) == {2}
        assert set(random_h("cliques:4", 12, rng).degrees()) == {3}
        regular = random_h("regular:3", 20, rng)
        assert regular.max_degree <= 3
        assert regular.edge_count >= 25

    def test_random_h_indivisible(self):
        with pytest.raises(UnknownModelSpecError):
            random_h("triangles", 10, derive_rng(0, 0))

    def test_boundary_h_spec(self):
        assert boundary_h_spec(100, 2) == "regular:5"
        assert boundary_h_spec(16, 4) == "matching"
        assert boundary_h_spec(16, 5) is None


class TestLemma2Stats:
    """测试储备集统计"""

    def test_table(self, small_config):
        """
        验证点:
        - 抽样次数与准备失败次数之和等于 trials
        - 频率位于 [0, 1]
        - 相同种子结果一致
        """
        table = lemma2_stats(100, "matching", 4, small_config, workers=1)
        assert isinstance(table, Lemma2Table)
        assert table.sampled + sum(table.setup_failures.values()) == 4
        for freq in (table.freq_c, table.freq_d, table.freq_both):
            assert 0.0 <= freq <= 1.0
        assert table.freq_both <= min(table.freq_c, table.freq_d)
        again = lemma2_stats(100, "matching", 4, small_config, workers=1)
        assert again.model_dump() == table.model_dump()

    def test_invalid(self, small_config):
        with pytest.raises(ParameterOutOfRangeError):
            lemma2_stats(100, "matching", 0, small_config)
        with pytest.raises(UnknownModelSpecError):
            lemma2_stats(100, "petersen", 1, small_config)


class TestRunTrials:
    """测试完整填装试验"""

    def test_records_ordered(self, small_config):
        records = run_trials(16, "random", "matching", 3, small_config, master_seed=1, workers=1)
        assert [r.trial for r in records] == [0, 1, 2]
        assert all(isinstance(r, TrialRecord) for r in records)
        assert all(r.outcome in ("success", "violation", "rejected") for r in records)
        assert records[0].seed == derive_seed(1, 0)

    def test_reproducible(self, small_config):
        first = run_trials(16, "forest", "matching", 2, small_config, master_seed=5, workers=1)
        second = run_trials(16, "forest", "matching", 2, small_config, master_seed=5, workers=1)
        assert [(r.outcome, r.stage) for r in first] == [(r.outcome, r.stage) for r in second]

    def test_rejected(self, small_config):
        records = run_trials(16, "random:40", "matching", 2, small_config, master_seed=2, workers=1)
        assert {r.outcome for r in records} == {"rejected"}
        assert failure_profile(records) == {"rejected:TooManyMissingEdges": 2}

    def test_unknown_model(self, small_config):
        with pytest.raises(UnknownModelSpecError):
            run_trials(16, "random", "cycles", 1, small_config)

    def test_failure_profile(self):
        base = {"seed": 0, "n": 4, "config": {}}
        records = [
            TrialRecord(trial=0, outcome="success", **base),
            TrialRecord(trial=1, outcome="violation", stage="S1", **base),
            TrialRecord(trial=2, outcome="violation", stage="S1", **base),
            TrialRecord(trial=3, outcome="rejected", stage="SizeMismatch", **base),
        ]
        assert failure_profile(records) == {"S1": 2, "rejected:SizeMismatch": 1}


class TestConstantSweep:
    """测试常数扫描"""

    def _rows(self, text):
        return list(csv.reader(io.StringIO(text)))

    def test_header_and_crlf(self):
        text = constant_sweep([16], [1.0], 2, master_seed=0)
        assert text.startswith(",".join(SWEEP_HEADER) + "\r\n")
        assert text.endswith("\r\n")

    def test_outside_theorem(self):
        """divisor < √2 的单元不运行"""
        rows = self._rows(constant_sweep([16], [1.2], 3, master_seed=0))
        assert rows[1] == ["16", "1.2", "0", "0", OUTSIDE_THEOREM]

    def test_isolated_rejected(self):
        """Δ = ⌊√16 / 5⌋ = 0"""
        rows = self._rows(constant_sweep([16], [5], 3, master_seed=0))
        assert rows[1] == ["16", "5", "3", "0", "rejected:IsolatedVertexInH=3"]

    def test_cells(self):
        cfg = PackingConfig.from_settings(seed=3)
        text = constant_sweep([16, 36], [1.5, 2], 2, master_seed=4, g_model="forest", base_cfg=cfg, workers=1)
        rows = self._rows(text)
        assert len(rows) == 5
        for row in rows[1:]:
            assert int(row[2]) == 2
            assert 0 <= int(row[3]) <= 2
            assert float(row[1]) >= math.sqrt(2)
        assert text == constant_sweep([16, 36], [1.5, 2], 2, master_seed=4, g_model="forest", base_cfg=cfg, workers=1)

    def test_empty_lists(self):
        with pytest.raises(ParameterOutOfRangeError):
            constant_sweep([], [2], 1, master_seed=0)
