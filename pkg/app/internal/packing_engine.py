"""
填装引擎模块

给定缺失边图 G（边数不超过 n - δ(H) - 1）与生成目标图 H（无孤立点，
Δ(H) <= √n / maxdeg_divisor），分四个阶段构造双射 f: V(G) -> V(H)，
使任何 G 的边都不被映射到 H 的边上。

流程：
1. 按度降序排列 G 的顶点 v_1..v_n，构造 S_1 / B_1 与 S_i
2. 对 S_i 独立抽样得到储备集 B_i，检查 |C_i| 与 |D_i| 的界，失败则换派生种子重抽
3. Stage 1：v_1 -> H 的最小度顶点 w，B_1 -> N_H(w)
4. Stage 2：逐个匹配高度数顶点 v_2..v_k，并用 D_i 补齐 f(v_i) 的 H 邻居
5. Stage 3：未匹配顶点取独立集 J，其余 K 逐个贪心匹配
6. Stage 4：J 与剩余 H 顶点之间求完美匹配

任何一步的界不成立时返回 GuaranteeViolation，绝不返回未经验证的 Success。
"""

import json
import logging
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from app.config import settings
from app.exceptions import (
    GuaranteeViolationError,
    IsolatedVertexError,
    MaxDegreeExceededError,
    NotABijectionError,
    ParameterOutOfRangeError,
    SizeMismatchError,
    TooManyMissingEdgesError,
)
from app.internal.graph_core import (
    UNMATCHED,
    BipartiteGraph,
    Graph,
    VertexSet,
    closed_neighborhood,
    connected_components,
    degree_sequence_order,
    greedy_independent_set,
    maximum_bipartite_matching,
)
from app.internal.utils import RNG_NAME, apply_overrides, derive_rng


logger = logging.getLogger(__name__)

SQRT_TWO = math.sqrt(2)
_EPS = 1e-9


# ========== 配置 ==========


class PackingConfig(BaseModel):
    """
    引擎常数配置，默认值即证明中的常数

    Attributes:
        maxdeg_divisor: Δ(H) <= √n / maxdeg_divisor
        high_degree_coeff: Stage 2 的高度数阈值 high_degree_coeff·√n
        small_degree_cap: S_i 成员的度上限
        sample_prob_exponent: 储备集抽样概率 n^exponent
        c_bound_coeff: |C_i| <= c_bound_coeff·√n
        d_bound_coeff: |D_i| >= d_bound_coeff·√n
        d_range_coeff: D 界检查范围 i <= ⌈d_range_coeff·√n⌉
        s_size_coeff: |S_i| >= s_size_coeff·n
        s1_degree_coeff: S_1 成员度 < s1_degree_coeff·√n
        j_size_coeff: Stage 3 独立集 |J| >= j_size_coeff·n
        max_resamples: 储备集最多抽样次数
        seed: 主种子
    """

    maxdeg_divisor: float = Field(200.0, ge=SQRT_TWO)
    high_degree_coeff: float = Field(20.0, gt=0)
    small_degree_cap: int = Field(10, gt=0)
    sample_prob_exponent: float = Field(-0.5, le=0)
    c_bound_coeff: float = Field(4.0, gt=0)
    d_bound_coeff: float = Field(1 / 50, gt=0)
    d_range_coeff: float = Field(1 / 10, gt=0)
    s_size_coeff: float = Field(1 / 18, gt=0)
    s1_degree_coeff: float = Field(2.0, gt=0)
    j_size_coeff: float = Field(1 / 4, gt=0)
    max_resamples: int = Field(64, gt=0)
    seed: int = Field(0, ge=0, lt=2 ** 64)

    class Config:
        """Pydantic 配置"""
        frozen = True
        extra = "forbid"

    @classmethod
    def from_settings(cls, **overrides: Any) -> "PackingConfig":
        """
        以全局配置的种子与重抽上限为默认值构造

        Raises:
            ParameterOutOfRangeError: 任一常数越界
        """
        base = {
            "seed": settings.PACKING_SEED,
            "max_resamples": settings.PACKING_MAX_RESAMPLES,
        }
        values = apply_overrides(base, overrides)
        try:
            return cls(**values)
        except ValidationError as e:
            raise ParameterOutOfRangeError(f"填装配置非法: {e.errors()[0]['loc']} {e.errors()[0]['msg']}")

    def snapshot(self) -> Dict[str, Any]:
        return self.model_dump()


# ========== 结果类型 ==========


@dataclass(frozen=True)
class PackingMap:
    """双射 f: V(G) -> V(H)，forward[v] = f(v)"""

    forward: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.forward)
        if sorted(self.forward) != list(range(n)):
            raise NotABijectionError(f"映射不是 [0, {n}) 上的双射")

    @classmethod
    def of(cls, values: Sequence[int]) -> "PackingMap":
        try:
            return cls(tuple(int(v) for v in values))
        except (TypeError, ValueError):
            raise NotABijectionError("映射包含非整数项")

    def __len__(self) -> int:
        return len(self.forward)

    def __getitem__(self, v: int) -> int:
        return self.forward[v]

    def inverse(self) -> Tuple[int, ...]:
        backward = [0] * len(self.forward)
        for v, w in enumerate(self.forward):
            backward[w] = v
        return tuple(backward)

    def to_list(self) -> List[int]:
        return list(self.forward)


@dataclass(frozen=True)
class TraceEvent:
    """单条审计事件，seq 为单调递增的逻辑时间戳"""

    seq: int
    stage: str
    kind: str
    data: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {"seq": self.seq, "stage": self.stage, "kind": self.kind, "data": self.data}


class StageTrace:
    """
    阶段审计日志

    记录匹配对、S_i / B_i / C_i / D_i 的规模、重抽次数、阶段边界与不变量检查点。
    只记录确定性数据，相同输入得到逐字节相同的序列化结果。
    """

    def __init__(self):
        self.events: List[TraceEvent] = []

    def record(self, stage: str, kind: str, **data: Any) -> TraceEvent:
        event = TraceEvent(seq=len(self.events), stage=stage, kind=kind, data=data)
        self.events.append(event)
        return event

    def of_kind(self, kind: str, stage: Optional[str] = None) -> List[TraceEvent]:
        return [e for e in self.events if e.kind == kind and (stage is None or e.stage == stage)]

    def matched_pairs(self) -> List[Tuple[int, int]]:
        return [(e.data["g"], e.data["h"]) for e in self.of_kind("match")]

    def checkpoints(self, stage: Optional[str] = None) -> List[Dict[str, Any]]:
        return [e.data for e in self.of_kind("checkpoint", stage)]

    def is_consistent(self) -> bool:
        """seq 单调，且每个 G / H 顶点至多被匹配一次"""
        if any(e.seq != i for i, e in enumerate(self.events)):
            return False
        pairs = self.matched_pairs()
        g_side = [g for g, _ in pairs]
        h_side = [h for _, h in pairs]
        return len(set(g_side)) == len(g_side) and len(set(h_side)) == len(h_side)

    def to_dicts(self) -> List[Dict[str, Any]]:
        return [e.to_dict() for e in self.events]

    def to_json(self) -> str:
        return json.dumps(self.to_dicts(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class Success:
    mapping: PackingMap
    trace: StageTrace
    tag: str = "success"
    timings: Dict[str, float] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class GuaranteeViolation:
    stage: str
    reason: str
    trace: StageTrace
    tag: str = "violation"
    timings: Dict[str, float] = field(default_factory=dict, compare=False)


PackingOutcome = Union[Success, GuaranteeViolation]


@dataclass
class Lemma2Report:
    """
    一次储备集抽样的结果

    Attributes:
        b: i -> B_i
        c: i -> C_i（i 在已构造范围内）
        d: i -> D_i
        conjunct_c: |C_i| <= c_bound 对全部 i 成立
        conjunct_d: |D_i| >= d_bound 对 2 <= i <= ⌈d_range·√n⌉ 成立
        max_c: 全部 i 上的 max |C_i|
        min_d: 检查范围内的 min |D_i|（范围为空时为 None）
        heavy_c: d(v_i) >= c_bound 的 i -> |C_i|
    """

    b: Dict[int, VertexSet]
    c: Dict[int, VertexSet]
    d: Dict[int, VertexSet]
    conjunct_c: bool
    conjunct_d: bool
    max_c: int
    min_d: Optional[int]
    heavy_c: Dict[int, int] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.conjunct_c and self.conjunct_d


@dataclass
class Reservoirs:
    """通过检查的储备集族"""

    b1: VertexSet
    report: Lemma2Report
    attempts: int

    @property
    def b(self) -> Dict[int, VertexSet]:
        return self.report.b

    @property
    def c(self) -> Dict[int, VertexSet]:
        return self.report.c

    @property
    def d(self) -> Dict[int, VertexSet]:
        return self.report.d


# ========== 运行状态 ==========


class PackingState:
    """一次 pack() 运行中的可变匹配状态"""

    def __init__(self, g: Graph, h: Graph, trace: StageTrace):
        self.g = g
        self.h = h
        self.trace = trace
        self.forward = [UNMATCHED] * g.n
        self.backward = [UNMATCHED] * h.n
        self.matched_count = 0
        self.independent: VertexSet = VertexSet.empty(g.n)
        self._floor = 0

    def is_matched_g(self, v: int) -> bool:
        return self.forward[v] != UNMATCHED

    def is_matched_h(self, w: int) -> bool:
        return self.backward[w] != UNMATCHED

    def match(self, v: int, w: int, stage: str) -> None:
        if self.forward[v] != UNMATCHED or self.backward[w] != UNMATCHED:
            raise GuaranteeViolationError(stage, f"重复匹配 {v} -> {w}")
        self.forward[v] = w
        self.backward[w] = v
        self.matched_count += 1
        self.trace.record(stage, "match", g=v, h=w)

    def forbidden_targets(self, v: int) -> Set[int]:
        """v 的已匹配 G 邻居的像在 H 中的邻居，v 不能映射到这些顶点"""
        blocked: Set[int] = set()
        for u in self.g.neighbors(v):
            image = self.forward[u]
            if image != UNMATCHED:
                blocked.update(self.h.neighbor_set(image))
        return blocked

    def first_free_target(self, blocked: Set[int]) -> Optional[int]:
        """编号最小的、未匹配且不在 blocked 中的 H 顶点"""
        n = self.h.n
        while self._floor < n and self.backward[self._floor] != UNMATCHED:
            self._floor += 1
        w = self._floor
        while w < n:
            if self.backward[w] == UNMATCHED and w not in blocked:
                return w
            w += 1
        return None

    def unmatched_g(self) -> List[int]:
        return [v for v in range(self.g.n) if self.forward[v] == UNMATCHED]

    def unmatched_h(self) -> List[int]:
        return [w for w in range(self.h.n) if self.backward[w] == UNMATCHED]


# ========== 输入检查 ==========


def check_inputs(g: Graph, h: Graph, cfg: PackingConfig) -> None:
    """
    检查定理前提

    Raises:
        SizeMismatchError: |V(G)| != |V(H)|
        IsolatedVertexError: δ(H) = 0
        TooManyMissingEdgesError: e(G) > n - δ(H) - 1
        MaxDegreeExceededError: Δ(H) > √n / maxdeg_divisor
    """
    if g.n != h.n:
        raise SizeMismatchError(f"SizeMismatch: |V(G)|={g.n} 与 |V(H)|={h.n} 不一致")
    n = g.n
    delta = h.min_degree
    if delta < 1:
        isolated = h.degrees().index(0)
        raise IsolatedVertexError(f"IsolatedVertexInH: H 的顶点 {isolated} 是孤立点")
    limit = n - delta - 1
    if g.edge_count > limit:
        raise TooManyMissingEdgesError(
            f"TooManyMissingEdges: e(G)={g.edge_count} > n-δ-1={limit}"
        )
    bound = math.sqrt(n) / cfg.maxdeg_divisor
    if h.max_degree > bound + _EPS:
        raise MaxDegreeExceededError(
            f"MaxDegreeExceeded: Δ(H)={h.max_degree} > √n/{cfg.maxdeg_divisor:g}={bound:.4f}"
        )


def check_degree_bounds(g: Graph, order: Sequence[int], delta: int) -> Dict[str, Any]:
    """
    度序列的三条界：d(v_1) <= n-δ-1，d(v_2) <= n/2，d(v_i) < 2n/i

    Returns:
        检查点数据；输入满足前提时三项均为 True
    """
    n = g.n
    degrees = [g.degree(v) for v in order]
    first = degrees[0] <= n - delta - 1
    second = n < 2 or degrees[1] <= n / 2
    # i 为 1 起始的下标
    harmonic = all(d * i < 2 * n for i, d in enumerate(degrees, start=1))
    return {"d1_bound": first, "d2_bound": second, "harmonic_bound": harmonic}


# ========== S / B 构造 ==========


def high_degree_count(g: Graph, order: Sequence[int], cfg: PackingConfig) -> int:
    """最大的 k 使 d(v_k) >= high_degree_coeff·√n，不存在时为 0"""
    threshold = cfg.high_degree_coeff * math.sqrt(g.n)
    k = 0
    for i, v in enumerate(order, start=1):
        if g.degree(v) < threshold:
            break
        k = i
    return k


def reservoir_range(g: Graph, order: Sequence[int], cfg: PackingConfig) -> Tuple[int, int]:
    """
    需要构造 S_i 的下标范围

    Returns:
        (k, last)：S_i 只对 2 <= i <= last = max(k, ⌈d_range·√n⌉) 构造
    """
    k = high_degree_count(g, order, cfg)
    d_range = math.ceil(cfg.d_range_coeff * math.sqrt(g.n))
    return k, min(g.n, max(k, d_range))


def build_s1(g: Graph, order: Sequence[int], delta: int, cfg: PackingConfig) -> VertexSet:
    """
    S_1：V \\ N[v_1] 中度 < s1_degree_coeff·√n 的独立集

    非邻居数 n-d(v_1)-1 >= 6δ 时取贪心独立集，否则在非邻居诱导子图的
    每个连通分量中取一个顶点；所选方法不足 δ 时改用另一种并取较大者。

    Raises:
        GuaranteeViolationError: |S_1| < δ
    """
    n = g.n
    v1 = order[0]
    cap = math.ceil(cfg.s1_degree_coeff * math.sqrt(n)) - 1
    outside = closed_neighborhood(g, [v1])
    non_neighbors = [v for v in range(n) if v not in outside]

    def by_greedy() -> VertexSet:
        return greedy_independent_set(g, non_neighbors, degree_cap=cap)

    def by_components() -> VertexSet:
        picks = []
        for component in connected_components(g, non_neighbors):
            eligible = [v for v in component if g.degree(v) <= cap]
            if eligible:
                picks.append(eligible[0])
        return VertexSet(n, picks)

    if len(non_neighbors) >= 6 * delta:
        s1 = by_greedy()
        if len(s1) < delta:
            s1 = max(s1, by_components(), key=len)
    else:
        s1 = by_components()
        if len(s1) < delta:
            s1 = max(s1, by_greedy(), key=len)

    if len(s1) < delta:
        raise GuaranteeViolationError("S1", f"|S_1|={len(s1)} < δ={delta}")
    return s1


def build_si(g: Graph, v_i: int, b1: VertexSet, cfg: PackingConfig) -> VertexSet:
    """
    S_i：V \\ (N[v_i] ∪ N[B_1]) 中度 <= small_degree_cap 的独立集

    Raises:
        GuaranteeViolationError: |S_i| < s_size_coeff·n
    """
    excluded = closed_neighborhood(g, [v_i]).union(closed_neighborhood(g, b1))
    candidates = [v for v in range(g.n) if v not in excluded]
    s_i = greedy_independent_set(g, candidates, degree_cap=cfg.small_degree_cap)
    required = cfg.s_size_coeff * g.n
    if len(s_i) < required:
        raise GuaranteeViolationError("Si", f"|S_i|={len(s_i)} < {required:.2f} (v_i={v_i})")
    return s_i


# ========== 储备集抽样 ==========


def lemma2_report(
    g: Graph,
    order: Sequence[int],
    sets: Dict[int, VertexSet],
    cfg: PackingConfig,
    rng: np.random.Generator,
) -> Lemma2Report:
    """
    单次抽样并计算 C_i、D_i 及两组界（不重抽）

    C_i = (∪_{j=2}^{i-1} B_j) ∩ N(v_i)，D_i = B_i \\ (∪_{j=2}^{i-1} N[B_j])。
    未构造 S_i 的下标视为 B_i = ∅。
    """
    n = g.n
    sqrt_n = math.sqrt(n)
    p = float(n) ** cfg.sample_prob_exponent
    c_limit = cfg.c_bound_coeff * sqrt_n
    d_limit = cfg.d_bound_coeff * sqrt_n
    d_range = min(n, math.ceil(cfg.d_range_coeff * sqrt_n))

    b: Dict[int, VertexSet] = {}
    for i in sorted(sets):
        members = np.fromiter(sets[i].members, dtype=np.int64, count=len(sets[i]))
        chosen = members[rng.random(len(members)) < p]
        b[i] = VertexSet(n, chosen.tolist())

    union_b: Set[int] = set()
    union_nb: Set[int] = set()
    c: Dict[int, VertexSet] = {}
    d: Dict[int, VertexSet] = {}
    heavy_c: Dict[int, int] = {}
    max_c = 0
    min_d: Optional[int] = None
    conjunct_c = True

    last = max(sets) if sets else 1
    for i in range(2, last + 1):
        v_i = order[i - 1]
        c_i = union_b.intersection(g.neighbor_set(v_i))
        b_i = b.get(i, VertexSet.empty(n))
        d_i = [u for u in b_i if u not in union_nb]
        c[i] = VertexSet(n, c_i)
        d[i] = VertexSet(n, d_i)
        max_c = max(max_c, len(c_i))
        if g.degree(v_i) >= c_limit:
            heavy_c[i] = len(c_i)
        if len(c_i) > c_limit:
            conjunct_c = False
        if i <= d_range:
            min_d = len(d_i) if min_d is None else min(min_d, len(d_i))
        union_b.update(b_i)
        union_nb.update(closed_neighborhood(g, b_i))

    # last 之后 B_i 为空，C_i 只与 ∪B_j 和 N(v_i) 有关；度降序，可提前终止
    for i in range(last + 1, n + 1):
        v_i = order[i - 1]
        if g.degree(v_i) < c_limit:
            break
        size = len(union_b.intersection(g.neighbor_set(v_i)))
        max_c = max(max_c, size)
        heavy_c[i] = size
        if size > c_limit:
            conjunct_c = False

    conjunct_d = min_d is None or min_d >= d_limit
    return Lemma2Report(
        b=b, c=c, d=d,
        conjunct_c=conjunct_c, conjunct_d=conjunct_d,
        max_c=max_c, min_d=min_d, heavy_c=heavy_c,
    )


def sample_reservoirs(
    g: Graph,
    order: Sequence[int],
    sets: Dict[int, VertexSet],
    cfg: PackingConfig,
    b1: Optional[VertexSet] = None,
    trace: Optional[StageTrace] = None,
) -> Reservoirs:
    """
    抽样 B_2..B_last 并检查 C / D 界，失败时以派生种子重抽

    第 attempt 次抽样使用由 (cfg.seed, attempt) 派生的生成器，
    因此提高 max_resamples 不会改变此前各次抽样的结果。

    Raises:
        GuaranteeViolationError: 抽样前即可判定 D 界不可能成立，或 max_resamples 次均失败
    """
    n = g.n
    sqrt_n = math.sqrt(n)
    d_limit = cfg.d_bound_coeff * sqrt_n
    d_range = min(n, math.ceil(cfg.d_range_coeff * sqrt_n))
    for i in range(2, d_range + 1):
        size = len(sets.get(i, ()))
        if size < d_limit:
            raise GuaranteeViolationError(
                "Lemma2", f"|S_{i}|={size} < {d_limit:.2f}，D_{i} 的下界不可能成立"
            )

    for attempt in range(cfg.max_resamples):
        report = lemma2_report(g, order, sets, cfg, derive_rng(cfg.seed, attempt))
        if trace is not None:
            trace.record(
                "Lemma2", "sample",
                attempt=attempt,
                conjunct_c=report.conjunct_c,
                conjunct_d=report.conjunct_d,
                max_c=report.max_c,
                min_d=report.min_d,
            )
        if report.holds:
            logger.info(f"储备集抽样通过: 第 {attempt + 1} 次, max|C_i|={report.max_c}, min|D_i|={report.min_d}")
            return Reservoirs(b1=b1 if b1 is not None else VertexSet.empty(n), report=report, attempts=attempt + 1)
        logger.debug(f"储备集抽样失败: 第 {attempt + 1} 次, C={report.conjunct_c}, D={report.conjunct_d}")

    raise GuaranteeViolationError("Lemma2", f"{cfg.max_resamples} 次抽样均未满足 C / D 界")


# ========== 四个阶段 ==========


def stage1(state: PackingState, g: Graph, h: Graph, order: Sequence[int], b1: VertexSet) -> PackingState:
    """v_1 -> 最小度顶点 w（编号最小者），B_1 按编号顺序 -> N_H(w)"""
    state.trace.record("stage1", "begin")
    delta = h.min_degree
    w = h.degrees().index(delta)
    state.match(order[0], w, "stage1")
    for u, target in zip(b1, h.neighbors(w)):
        state.match(u, target, "stage1")
    state.trace.record("stage1", "end", matched=state.matched_count)
    return state


def stage2(
    state: PackingState,
    g: Graph,
    h: Graph,
    order: Sequence[int],
    reservoirs: Reservoirs,
    cfg: PackingConfig,
) -> PackingState:
    """
    依次匹配 v_2..v_k（d(v_k) >= high_degree_coeff·√n 的最大 k）

    每轮把 N(v_i) 分为 X（已匹配的 v_j, j<i）、Y（其余已匹配）、Z（未匹配），
    f(v_i) 取不与 X ∪ Y 的像相邻的编号最小空闲 H 顶点，再用 D_i 的前 |R|
    个顶点匹配 f(v_i) 的空闲 H 邻居 R。每轮结束检查三条不变量。
    """
    n = g.n
    sqrt_n = math.sqrt(n)
    k = high_degree_count(g, order, cfg)
    delta = h.min_degree
    big_delta = h.max_degree
    b1 = reservoirs.b1
    state.trace.record("stage2", "begin", k=k)

    reservoir_union: Set[int] = set(b1)
    for i in range(2, k + 1):
        v_i = order[i - 1]
        if state.is_matched_g(v_i):
            raise GuaranteeViolationError("Stage2-target", f"v_{i}={v_i} 已被匹配")

        earlier = set(order[:i - 1])
        x, y, z = [], [], []
        for u in g.neighbors(v_i):
            if not state.is_matched_g(u):
                z.append(u)
            elif u in earlier:
                x.append(u)
            else:
                y.append(u)

        c_i = reservoirs.c.get(i, VertexSet.empty(n))
        y_within = all(u in c_i or u in b1 for u in y)

        blocked: Set[int] = set()
        for u in x + y:
            blocked.update(h.neighbor_set(state.forward[u]))
        target = state.first_free_target(blocked)
        if target is None:
            raise GuaranteeViolationError("Stage2-target", f"v_{i}={v_i} 没有可用的目标顶点")
        state.match(v_i, target, "stage2")

        r = [w for w in h.neighbors(target) if not state.is_matched_h(w)]
        d_i = [u for u in reservoirs.d.get(i, ()) if not state.is_matched_g(u)]
        if len(d_i) < len(r):
            raise GuaranteeViolationError("Stage2-D", f"|D_{i}|={len(d_i)} < |R|={len(r)}")
        for u, w in zip(d_i, r):
            state.match(u, w, "stage2")

        reservoir_union.update(reservoirs.b.get(i, ()))
        prefix = set(order[:i])
        inv1 = all(state.is_matched_h(w) for w in h.neighbors(target))
        inv2 = all(
            v in prefix or v in reservoir_union
            for v in range(n) if state.is_matched_g(v)
        )
        inv3 = state.matched_count <= (i - 1) * (big_delta + 1) + delta + 1
        state.trace.record(
            "stage2", "checkpoint",
            i=i, v=v_i, x=len(x), y=len(y), z=len(z), r=len(r),
            y_within_c_b1=y_within,
            xy_below_6sqrt=len(x) + len(y) < 6 * sqrt_n,
            inv1=inv1, inv2=inv2, inv3=inv3,
            matched=state.matched_count,
        )
        logger.debug(f"Stage 2 第 {i} 轮: v={v_i} -> {target}, |R|={len(r)}")
        if not (inv1 and inv2 and inv3):
            raise GuaranteeViolationError(
                "Stage2-invariant", f"第 {i} 轮不变量失效: inv1={inv1}, inv2={inv2}, inv3={inv3}"
            )

    state.trace.record("stage2", "end", matched=state.matched_count)
    return state


def stage3(state: PackingState, g: Graph, h: Graph, cfg: PackingConfig) -> PackingState:
    """
    未匹配 G 顶点取贪心独立集 J，其余 K 按编号升序逐个匹配到
    编号最小的允许且空闲的 H 顶点

    Raises:
        GuaranteeViolationError: |J| < j_size_coeff·n，或某个 K 顶点没有可用目标
    """
    n = g.n
    unmatched = state.unmatched_g()
    j = greedy_independent_set(g, unmatched)
    required = cfg.j_size_coeff * n
    state.trace.record("stage3", "begin", unmatched=len(unmatched), j=len(j))
    if len(j) < required:
        raise GuaranteeViolationError("Stage3-J", f"|J|={len(j)} < {required:.2f}")
    state.independent = j

    free_h = n - state.matched_count
    min_pool: Optional[int] = None
    k_vertices = [v for v in unmatched if v not in j]
    for v in k_vertices:
        blocked = state.forbidden_targets(v)
        free_blocked = sum(1 for w in blocked if not state.is_matched_h(w))
        pool = free_h - free_blocked
        min_pool = pool if min_pool is None else min(min_pool, pool)
        target = state.first_free_target(blocked)
        if target is None:
            raise GuaranteeViolationError("Stage3-target", f"顶点 {v} 没有可用的目标顶点")
        state.match(v, target, "stage3")
        free_h -= 1

    state.trace.record("stage3", "checkpoint", k=len(k_vertices), min_pool=min_pool)
    state.trace.record("stage3", "end", matched=state.matched_count)
    return state


def stage4(state: PackingState, g: Graph, h: Graph) -> PackingMap:
    """
    在 J 与剩余 H 顶点 Q 之间构造二部图 P 并求完美匹配

    (v, q) 允许当且仅当 q 不与 v 的任何已匹配邻居的像在 H 中相邻。

    Raises:
        GuaranteeViolationError: P 没有完美匹配
    """
    j = [v for v in state.independent if not state.is_matched_g(v)]
    q = state.unmatched_h()
    state.trace.record("stage4", "begin", j=len(j), q=len(q))
    if len(j) != len(q):
        raise GuaranteeViolationError("Stage4-Hall", f"|J|={len(j)} 与 |Q|={len(q)} 不一致")

    q_index = {w: index for index, w in enumerate(q)}
    forbidden = []
    for v in j:
        blocked = state.forbidden_targets(v)
        forbidden.append([q_index[w] for w in blocked if w in q_index])
    p = BipartiteGraph.from_forbidden(len(j), len(q), forbidden)

    half = len(j) / 2
    min_left = min((p.left_degree(i) for i in range(len(j))), default=0)
    min_right = min(p.right_degrees(), default=0)
    state.trace.record(
        "stage4", "checkpoint",
        min_left_degree=min_left, min_right_degree=min_right,
        degrees_above_half=min_left > half and min_right > half,
    )

    matching = maximum_bipartite_matching(p)
    if len(matching) != len(j):
        raise GuaranteeViolationError("Stage4-Hall", f"最大匹配 {len(matching)} < |J|={len(j)}")
    for left, right in matching:
        state.match(j[left], q[right], "stage4")

    state.trace.record("stage4", "end", matched=state.matched_count)
    return PackingMap(tuple(state.forward))


# ========== 入口 ==========


@contextmanager
def _timed(timings: Dict[str, float], stage: str):
    """把阶段耗时（秒）累加到 timings，不进入审计日志"""
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = timings.get(stage, 0.0) + time.perf_counter() - start


def verify_packing(g: Graph, h: Graph, f: Union[PackingMap, Sequence[int]]) -> bool:
    """
    检查 f 是否为填装：任何 G 的边 (u, v) 都满足 (f(u), f(v)) 不是 H 的边

    Raises:
        NotABijectionError: f 不是双射或长度不符
    """
    mapping = f if isinstance(f, PackingMap) else PackingMap.of(f)
    if len(mapping) != g.n or g.n != h.n:
        raise NotABijectionError(f"映射长度 {len(mapping)} 与顶点数 {g.n} 不一致")
    return all(not h.has_edge(mapping[u], mapping[v]) for u, v in g.edges())


def pack(g: Graph, h: Graph, cfg: Optional[PackingConfig] = None) -> PackingOutcome:
    """
    运行完整的填装流程

    Args:
        g: 缺失边图
        h: 生成目标图
        cfg: 常数配置，None 时取全局默认

    Returns:
        Success（已验证）或 GuaranteeViolation

    Raises:
        HypothesisViolationError: 输入不满足定理前提
    """
    cfg = cfg or PackingConfig.from_settings()
    check_inputs(g, h, cfg)

    n = g.n
    delta = h.min_degree
    trace = StageTrace()
    state = PackingState(g, h, trace)
    timings: Dict[str, float] = {}
    logger.info(f"开始填装: n={n}, e(G)={g.edge_count}, δ(H)={delta}, Δ(H)={h.max_degree}, seed={cfg.seed}")

    try:
        with _timed(timings, "setup"):
            order = degree_sequence_order(g)
            trace.record("setup", "order", v1=order[0], d1=g.degree(order[0]), delta=delta, max_degree_h=h.max_degree)
            trace.record("setup", "checkpoint", **check_degree_bounds(g, order, delta))

            s1 = build_s1(g, order, delta, cfg)
            b1 = s1.take(delta)
            trace.record("setup", "s1", size=len(s1), b1=list(b1))

            k, last = reservoir_range(g, order, cfg)
            sets = {}
            for i in range(2, last + 1):
                sets[i] = build_si(g, order[i - 1], b1, cfg)
            trace.record("setup", "si", k=k, built=list(sets), sizes=[len(s) for s in sets.values()])

        with _timed(timings, "Lemma2"):
            reservoirs = sample_reservoirs(g, order, sets, cfg, b1=b1, trace=trace)
            trace.record(
                "Lemma2", "reservoirs",
                attempts=reservoirs.attempts,
                b={str(i): list(s) for i, s in reservoirs.b.items()},
                c={str(i): list(s) for i, s in reservoirs.c.items()},
                d={str(i): list(s) for i, s in reservoirs.d.items()},
            )

        with _timed(timings, "stage1"):
            stage1(state, g, h, order, b1)
        with _timed(timings, "stage2"):
            stage2(state, g, h, order, reservoirs, cfg)
        with _timed(timings, "stage3"):
            stage3(state, g, h, cfg)
        with _timed(timings, "stage4"):
            mapping = stage4(state, g, h)
    except GuaranteeViolationError as e:
        trace.record(e.stage, "violation", reason=e.reason)
        logger.warning(f"填装保证失效: {e.message}")
        return GuaranteeViolation(stage=e.stage, reason=e.reason, trace=trace, timings=timings)

    if not verify_packing(g, h, mapping):
        trace.record("verify", "violation", reason="映射不满足填装性质")
        logger.warning("填装结果未通过验证")
        return GuaranteeViolation(stage="Verify", reason="映射不满足填装性质", trace=trace, timings=timings)
    if not trace.is_consistent():
        trace.record("verify", "violation", reason="审计日志中有重复匹配")
        logger.warning("审计日志不一致")
        return GuaranteeViolation(stage="Verify", reason="审计日志中有重复匹配", trace=trace, timings=timings)

    logger.info(f"填装成功: n={n}, 储备集抽样 {reservoirs.attempts} 次")
    return Success(mapping=mapping, trace=trace, timings=timings)


def outcome_document(outcome: PackingOutcome, cfg: PackingConfig) -> Dict[str, Any]:
    """结果的 JSON 文档（format 1）"""
    success = isinstance(outcome, Success)
    return {
        "format": 1,
        "outcome": outcome.tag,
        "mapping": outcome.mapping.to_list() if success else None,
        "stage": None if success else outcome.stage,
        "reason": None if success else outcome.reason,
        "verified": success,
        "seed": cfg.seed,
        "rng": RNG_NAME,
        "config": cfg.snapshot(),
    }
