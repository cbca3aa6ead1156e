"""
极值构造模块

每个生成器返回固定标号的图，并附带可检查的性质报告：
- lower_bound_graph: K_{n-1} 加一个度为 δ-1 的顶点
- tightness_pair: 说明最大度系数不能低于 √2 的构造
- ore_extremal / second_extremal: 非哈密顿图的两个极值构造
- h_second_extremal_fixture: 满足第二极值构造前提的样例 H
- counterexample_report / construction_t_report: 超图构造的报告
"""

import logging
from fractions import Fraction
from math import comb
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel

from app.config import settings
from app.exceptions import InstanceTooLargeError, ParameterOutOfRangeError
from app.internal.exact_oracle import exact_pack, independence_number, is_hamiltonian
from app.internal.graph_core import Graph
from app.internal.hypergraph import (
    NO_SPANNING_COPY,
    Hypergraph3,
    construction_t,
    construction_t_edge_count,
    counterexample_h,
    is_3_colorable,
    link,
    link_chromatic_profile,
    links_extremal_zero,
    local_obstruction_check,
)


logger = logging.getLogger(__name__)

VERIFIED = "verified"
FORMULA_CHECKED = "formula-checked"
FAILED = "failed"

EXACT_TIGHTNESS_K = 4
EXACT_EMBED_N = 9
EXACT_HAMILTON_N = 20


class PropertyCheck(BaseModel):
    """单条性质：声明值、实测值与核验方式"""
    name: str
    expected: Any
    actual: Any
    status: str


class ConstructionReport(BaseModel):
    """构造的性质报告"""
    name: str
    params: Dict[str, int]
    properties: List[PropertyCheck] = []

    @property
    def ok(self) -> bool:
        return all(p.status != FAILED for p in self.properties)

    def add(self, name: str, expected: Any, actual: Any, exact: bool = True) -> None:
        """
        记录一条性质

        Args:
            name: 性质名
            expected: 声明值
            actual: 实测值
            exact: False 表示只做了公式核对
        """
        if expected != actual:
            status = FAILED
        else:
            status = VERIFIED if exact else FORMULA_CHECKED
        self.properties.append(PropertyCheck(name=name, expected=expected, actual=actual, status=status))


def _complete_minus(n: int, removed: List[Tuple[int, int]]) -> Graph:
    blocked = {(min(u, v), max(u, v)) for u, v in removed}
    return Graph.from_edges(n, [
        (u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in blocked
    ])


# ========== 下界构造 ==========


def lower_bound_graph(n: int, delta: int) -> Graph:
    """
    K_{n-1}（顶点 0..n-2）加顶点 n-1，后者只与 0..delta-2 相邻

    边数 C(n-1,2) + delta - 1，最小度 delta - 1，因此不含任何最小度为 delta 的生成子图

    Raises:
        ParameterOutOfRangeError: 不满足 1 <= delta <= n-1
    """
    if n < 2 or not 1 <= delta <= n - 1:
        raise ParameterOutOfRangeError(f"lower_bound_graph 要求 n >= 2 且 1 <= delta <= n-1: n={n}, delta={delta}")
    edges = [(u, v) for u in range(n - 1) for v in range(u + 1, n - 1)]
    edges.extend((u, n - 1) for u in range(delta - 1))
    return Graph.from_edges(n, edges)


def lower_bound_report(n: int, delta: int) -> Tuple[Graph, ConstructionReport]:
    graph = lower_bound_graph(n, delta)
    report = ConstructionReport(name="lower-bound", params={"n": n, "delta": delta})
    report.add("edges", comb(n - 1, 2) + delta - 1, graph.edge_count)
    report.add("min_degree", delta - 1, graph.min_degree)
    return graph, report


# ========== 紧性构造 ==========


def tightness_size(k: int) -> int:
    """n = k(k+6)/2 + 1"""
    return k * (k + 6) // 2 + 1


def tightness_pair(k: int, delta: int) -> Tuple[Graph, Graph, ConstructionReport]:
    """
    最大度系数下界的构造

    H：k 个大小为 (n-1)/k 的不交团（顶点 0..n-2 按块编号）加顶点 n-1，
    后者按轮转方式与各团编号最小的顶点相邻，共 delta 个邻居。
    G：K_n 去掉顶点 0..k+1 上的 K_{k+2}。
    α(H) <= k+1 < k+2，所以 H 不是 G 的生成子图。

    Returns:
        (h, g_full, report)

    Raises:
        ParameterOutOfRangeError: k 不是不小于 2 的偶数（k(k+6)/2 须被 k 整除）或 delta 越界
    """
    if k < 2 or k % 2:
        raise ParameterOutOfRangeError(f"tightness_pair 要求 k 为不小于 2 的偶数: k={k}")
    n = tightness_size(k)
    clique = (n - 1) // k
    if not 1 <= delta <= clique - 1:
        raise ParameterOutOfRangeError(f"tightness_pair 要求 1 <= delta <= {clique - 1}: delta={delta}")

    edges = []
    for start in range(0, n - 1, clique):
        block = range(start, start + clique)
        edges.extend((u, v) for u in block for v in block if u < v)
    apex = n - 1
    for t in range(delta):
        edges.append((apex, (t % k) * clique + t // k))
    h = Graph.from_edges(n, edges)
    g_full = _complete_minus(n, [(u, v) for u in range(k + 2) for v in range(u + 1, k + 2)])

    report = ConstructionReport(name="tightness", params={"k": k, "delta": delta, "n": n})
    report.add("max_degree_h", clique, h.max_degree)
    report.add("edges_g_full", comb(n, 2) - comb(k + 2, 2), g_full.edge_count)
    lower = comb(n - 1, 2) + delta - 1
    report.add("edges_g_full_exceed_bound", True, g_full.edge_count > lower, exact=False)

    exact_alpha = k <= EXACT_TIGHTNESS_K
    alpha_ok = independence_number(h) <= k + 1 if exact_alpha else True
    report.add("independence_at_most_k_plus_1", True, alpha_ok, exact=exact_alpha)

    if n <= EXACT_EMBED_N:
        missing = g_full.complement()
        embeds = exact_pack(missing, h, force=True) is not None
        report.add("h_not_spanning_in_g_full", True, not embeds)
    else:
        # α(H) < k+2 = 缺失团的大小
        report.add("h_not_spanning_in_g_full", True, alpha_ok, exact=exact_alpha)

    logger.info(f"紧性构造: k={k}, n={n}, e(G)={g_full.edge_count} > {lower}")
    return h, g_full, report


# ========== 非哈密顿极值图 ==========


def ore_extremal(n: int) -> Graph:
    """K_n - S_{1,n-2}：顶点 0 只与 n-1 相邻"""
    if n < 4:
        raise ParameterOutOfRangeError(f"ore_extremal 要求 n >= 4: n={n}")
    return _complete_minus(n, [(0, leaf) for leaf in range(1, n - 1)])


def second_extremal(n: int) -> Graph:
    """
    K_n 去掉以 0 为中心、叶子 2..n-2 的星 S_{1,n-3} 与边 {1, n-1}

    共去掉 n-2 条边，边数 C(n-1,2) + 1，与 ore_extremal(n) 相同
    """
    if n < 6:
        raise ParameterOutOfRangeError(f"second_extremal 要求 n >= 6: n={n}")
    removed = [(0, leaf) for leaf in range(2, n - 1)]
    removed.append((1, n - 1))
    return _complete_minus(n, removed)


def h_second_extremal_fixture(n: int) -> Graph:
    """
    恰有一个 2 度顶点且其两邻居相邻、其余顶点度 >= 3 的 n 顶点图

    顶点 1..n-1 构成步长 1、2 的循环图（4 正则），顶点 0 与相邻的 1、2 相连
    """
    if n < 6:
        raise ParameterOutOfRangeError(f"h_second_extremal_fixture 要求 n >= 6: n={n}")
    m = n - 1
    edges = [(0, 1), (0, 2)]
    for i in range(m):
        edges.append((1 + i, 1 + (i + 1) % m))
        edges.append((1 + i, 1 + (i + 2) % m))
    return Graph.from_edges(n, edges)


def ore_report(n: int) -> Tuple[Graph, ConstructionReport]:
    graph = ore_extremal(n)
    report = ConstructionReport(name="ore", params={"n": n})
    report.add("edges", comb(n - 1, 2) + 1, graph.edge_count)
    if n <= EXACT_HAMILTON_N:
        report.add("hamiltonian", False, is_hamiltonian(graph))
    return graph, report


def second_extremal_report(n: int) -> Tuple[Graph, ConstructionReport]:
    """第二极值构造的报告；小 n 时用样例 H 做精确的生成子图检查"""
    graph = second_extremal(n)
    report = ConstructionReport(name="second-extremal", params={"n": n})
    report.add("edges", comb(n - 1, 2) + 1, graph.edge_count)
    report.add("edges_equal_ore", ore_extremal(n).edge_count, graph.edge_count)
    report.add("center_degree", 2, graph.degree(0))
    if n <= EXACT_EMBED_N:
        fixture = h_second_extremal_fixture(n)
        embeds = exact_pack(graph.complement(), fixture, force=True) is not None
        report.add("fixture_not_spanning", True, not embeds)
    return graph, report


# ========== 超图构造报告 ==========


def counterexample_report(s: int) -> Tuple[Hypergraph3, ConstructionReport]:
    """
    反例超图 H 的报告

    链接不可 3-染色的顶点数在 n-1 <= COLORING_LIMIT 时精确计算；
    同时与 n 顶点的构造 T 比较边数并做鸽笼判定
    """
    hg = counterexample_h(s)
    n = hg.n
    report = ConstructionReport(name="hyper-h", params={"s": s, "n": n})
    report.add("edges", 10 * s + 1, hg.edge_count)
    report.add("links_extremal_zero", True, links_extremal_zero(hg))
    if n - 1 <= settings.COLORING_LIMIT:
        profile = link_chromatic_profile(hg)
        non_colorable = sum(1 for row in profile["vertices"] if not row["three_colorable"])
        report.add("non_3_colorable_links", n - 1, non_colorable)
        report.add("link_family", True, profile["family"])
        t = construction_t(n)
        report.add("t_edges_exceed", True, t.edge_count > comb(n - 1, 3), exact=False)
        report.add("obstruction", NO_SPANNING_COPY, local_obstruction_check(t, hg).verdict)
    return hg, report


def construction_t_report(n: int) -> Tuple[Hypergraph3, ConstructionReport]:
    """构造 T 的边数闭式、下界比较与 x、y 链接的可染色性"""
    t = construction_t(n)
    report = ConstructionReport(name="hyper-t", params={"n": n})
    report.add("edges", construction_t_edge_count(n), t.edge_count)
    lower = comb(n - 2, 3) + Fraction(4, 3) * comb(n - 2, 2)
    report.add("edges_at_least_bound", True, t.edge_count >= lower, exact=False)
    report.add("edges_exceed_c_n_minus_1_3", True, t.edge_count > comb(n - 1, 3), exact=False)
    if n - 1 <= settings.COLORING_LIMIT:
        colorable = [is_3_colorable(link(t, v).graph) for v in (n - 2, n - 1)]
        report.add("xy_links_3_colorable", [True, True], colorable)
    return t, report


# ========== 统一入口 ==========


CONSTRUCTION_NAMES = ("lower-bound", "tightness", "ore", "second-extremal", "hyper-h", "hyper-t")


def _require(params: Dict[str, Optional[int]], *names: str) -> List[int]:
    missing = [name for name in names if params.get(name) is None]
    if missing:
        raise ParameterOutOfRangeError(f"缺少参数: {', '.join(missing)}")
    return [int(params[name]) for name in names]


def construction_size(name: str, params: Dict[str, Optional[int]]) -> int:
    """构造的顶点数；参数缺失时返回 0，交给 build_construction 报错"""
    if name == "tightness":
        return tightness_size(params["k"]) if params.get("k") is not None else 0
    if name == "hyper-h":
        return 5 * params["s"] + 1 if params.get("s") is not None else 0
    return params.get("n") or 0


def build_construction(
    name: str,
    params: Dict[str, Optional[int]],
    limit: Optional[int] = None,
) -> Tuple[Dict[str, Union[Graph, Hypergraph3]], ConstructionReport]:
    """
    按名称构造

    Args:
        name: lower-bound | tightness | ore | second-extremal | hyper-h | hyper-t
        params: n / delta / k / s
        limit: 顶点数上限，None 表示不限制

    Returns:
        (文件名主干 -> 图或超图, 报告)

    Raises:
        ParameterOutOfRangeError: 名称未知或参数缺失、越界
        InstanceTooLargeError: 顶点数超出 limit
    """
    if limit is not None:
        size = construction_size(name, params)
        if size > limit:
            raise InstanceTooLargeError(name, size, limit)
    if name == "lower-bound":
        n, delta = _require(params, "n", "delta")
        graph, report = lower_bound_report(n, delta)
        return {"lower-bound": graph}, report
    if name == "tightness":
        k, delta = _require(params, "k", "delta")
        h, g_full, report = tightness_pair(k, delta)
        return {"tightness-h": h, "tightness-g": g_full}, report
    if name == "ore":
        (n,) = _require(params, "n")
        graph, report = ore_report(n)
        return {"ore": graph}, report
    if name == "second-extremal":
        (n,) = _require(params, "n")
        graph, report = second_extremal_report(n)
        return {"second-extremal": graph, "second-extremal-h": h_second_extremal_fixture(n)}, report
    if name == "hyper-h":
        (s,) = _require(params, "s")
        hg, report = counterexample_report(s)
        return {"hyper-h": hg}, report
    if name == "hyper-t":
        (n,) = _require(params, "n")
        t, report = construction_t_report(n)
        return {"hyper-t": t}, report
    raise ParameterOutOfRangeError(f"未知的构造: {name}，可选 {', '.join(CONSTRUCTION_NAMES)}")
