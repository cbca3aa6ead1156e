"""
3-一致超图模块

链接图、链接的可染色性、反例超图 H 与构造 T，以及小规模的精确生成子图搜索
"""

import itertools
import logging
from dataclasses import dataclass
from math import comb
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from app.config import settings
from app.exceptions import (
    GraphFormatError,
    InstanceTooLargeError,
    ParameterOutOfRangeError,
    SizeMismatchError,
    VertexOutOfRangeError,
)
from app.internal.exact_oracle import clique_number
from app.internal.graph_core import Graph, iter_bits, lsb_index


logger = logging.getLogger(__name__)

NO_SPANNING_COPY = "NoSpanningCopy"
INCONCLUSIVE = "Inconclusive"

Triple = Tuple[int, int, int]


# ========== 类型 ==========


class Hypergraph3:
    """
    n 个顶点上的 3-一致超图

    超边以升序三元组保存，整体按字典序排列
    """

    __slots__ = ("n", "_edges", "_lookup", "_incidence")

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        if n < 1:
            raise GraphFormatError(f"顶点数必须为正整数: {n}")
        triples = []
        for edge in edges:
            triple = tuple(sorted(int(v) for v in edge))
            if len(triple) != 3 or len(set(triple)) != 3:
                raise GraphFormatError(f"超边 {list(edge)} 不是 3 个不同顶点")
            if triple[0] < 0 or triple[2] >= n:
                raise GraphFormatError(f"超边 {list(triple)} 越界 (n={n})")
            triples.append(triple)
        lookup = frozenset(triples)
        if len(lookup) != len(triples):
            raise GraphFormatError("存在重复超边")

        incidence: List[List[Triple]] = [[] for _ in range(n)]
        for triple in sorted(lookup):
            for v in triple:
                incidence[v].append(triple)

        self.n = n
        self._edges: Tuple[Triple, ...] = tuple(sorted(lookup))
        self._lookup = lookup
        self._incidence = tuple(tuple(e) for e in incidence)

    @classmethod
    def complete(cls, n: int) -> "Hypergraph3":
        return cls(n, itertools.combinations(range(n), 3))

    @property
    def edges(self) -> Tuple[Triple, ...]:
        return self._edges

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def degree(self, v: int) -> int:
        return len(self._incidence[v])

    def incident(self, v: int) -> Tuple[Triple, ...]:
        return self._incidence[v]

    def has_edge(self, a: int, b: int, c: int) -> bool:
        return tuple(sorted((a, b, c))) in self._lookup

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph3):
            return NotImplemented
        return self.n == other.n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self.n, self._edges))

    def __repr__(self) -> str:
        return f"Hypergraph3(n={self.n}, m={self.edge_count})"


@dataclass(frozen=True)
class LinkGraph:
    """
    顶点 vertex 的链接图

    graph 的顶点 i 对应原超图的 index_map[i]
    """

    vertex: int
    graph: Graph
    index_map: Tuple[int, ...]

    def original_edges(self) -> List[Tuple[int, int]]:
        return [(self.index_map[a], self.index_map[b]) for a, b in self.graph.edges()]


@dataclass(frozen=True)
class ObstructionVerdict:
    """
    局部障碍判定结果

    Attributes:
        verdict: NoSpanningCopy 或 Inconclusive
        n: 顶点数
        a: T 中链接可 colors-染色的顶点数
        b: H 中链接不可 colors-染色的顶点数
        colors: 使用的颜色数
    """

    verdict: str
    n: int
    a: int
    b: int
    colors: int = 3

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": self.verdict, "n": self.n, "a": self.a, "b": self.b, "colors": self.colors}


# ========== 链接 ==========


def link(hg: Hypergraph3, v: int) -> LinkGraph:
    """
    v 的链接：V \\ {v} 上的图，{x, y} 为边当且仅当 {v, x, y} 是超边

    Raises:
        VertexOutOfRangeError: v 越界
    """
    if not 0 <= v < hg.n:
        raise VertexOutOfRangeError(v, hg.n)
    if hg.n < 2:
        raise ParameterOutOfRangeError("链接图至少需要 2 个顶点")
    index_map = tuple(u for u in range(hg.n) if u != v)
    position = {u: i for i, u in enumerate(index_map)}
    edges = []
    for triple in hg.incident(v):
        a, b = (u for u in triple if u != v)
        edges.append((position[a], position[b]))
    return LinkGraph(vertex=v, graph=Graph.from_edges(hg.n - 1, edges), index_map=index_map)


def all_links(hg: Hypergraph3) -> List[LinkGraph]:
    return [link(hg, v) for v in range(hg.n)]


# ========== 构造 ==========


def counterexample_h(s: int, block: int = 5) -> Hypergraph3:
    """
    s 个不交的完全 3-图 K_block^(3)（顶点 block·i .. block·i+block-1）
    加超边 {x, 0, 1}，x = block·s

    默认 block = 5 时 n = 5s+1，边数 10s+1；
    block = 4 给出 9 个顶点以内可穷举核对的小规模类比
    """
    if s < 2:
        raise ParameterOutOfRangeError(f"counterexample_h 要求 s >= 2: s={s}")
    if block < 4:
        raise ParameterOutOfRangeError(f"counterexample_h 要求 block >= 4: block={block}")
    edges: List[Triple] = []
    for i in range(s):
        edges.extend(itertools.combinations(range(block * i, block * (i + 1)), 3))
    x = block * s
    edges.append((0, 1, x))
    return Hypergraph3(block * s + 1, edges)


def part_sizes(total: int, parts: int) -> List[int]:
    """尽量均分，较大的部分在前"""
    base, extra = divmod(total, parts)
    return [base + 1 if i < extra else base for i in range(parts)]


def construction_t(n: int, parts: int = 3) -> Hypergraph3:
    """
    构造 T

    U = {0..n-3} 按 part_sizes 连续划分为 U_1..U_parts，x = n-2，y = n-1；
    超边为 U 的全部 3-子集，以及 x、y 各自与跨两个不同部分的顶点对组成的三元组。
    x、y 的链接是完全多部图，可 parts-染色。

    Raises:
        ParameterOutOfRangeError: n < 8 或 parts 越界
    """
    if n < 8:
        raise ParameterOutOfRangeError(f"construction_t 要求 n >= 8: n={n}")
    if not 2 <= parts <= n - 2:
        raise ParameterOutOfRangeError(f"construction_t 要求 2 <= parts <= n-2: parts={parts}")
    u_size = n - 2
    label = []
    for index, size in enumerate(part_sizes(u_size, parts)):
        label.extend([index] * size)
    x, y = n - 2, n - 1

    edges: List[Triple] = list(itertools.combinations(range(u_size), 3))
    for a, b in itertools.combinations(range(u_size), 2):
        if label[a] != label[b]:
            edges.append((a, b, x))
            edges.append((a, b, y))
    return Hypergraph3(n, edges)


def construction_t_edge_count(n: int, parts: int = 3) -> int:
    """C(n-2,3) + 2·Σ_{i<j} |U_i||U_j|"""
    sizes = part_sizes(n - 2, parts)
    cross = sum(a * b for a, b in itertools.combinations(sizes, 2))
    return comb(n - 2, 3) + 2 * cross


# ========== 可染色性 ==========


def is_k_colorable(g: Graph, colors: int, limit: Optional[int] = None) -> bool:
    """
    精确判定是否存在正常 colors-染色

    先用团数做快速否定，再按度降序回溯，颜色域以位集表示；
    第一个顶点固定颜色 0 以消去颜色对称

    Raises:
        InstanceTooLargeError: n 超出 COLORING_LIMIT
    """
    bound = settings.COLORING_LIMIT if limit is None else limit
    if g.n > bound:
        raise InstanceTooLargeError("is_k_colorable", g.n, bound)
    if colors < 1:
        raise ParameterOutOfRangeError(f"颜色数必须为正整数: {colors}")
    if g.edge_count == 0:
        return True
    if colors == 1 or clique_number(g) > colors:
        return False

    n = g.n
    degrees = g.degrees()
    order = sorted(range(n), key=lambda v: (-degrees[v], v))
    color = [-1] * n
    all_colors = (1 << colors) - 1

    def assign(depth: int, used: int) -> bool:
        if depth == n:
            return True
        v = order[depth]
        blocked = 0
        for u in g.neighbors(v):
            if color[u] >= 0:
                blocked |= 1 << color[u]
        # 只尝试已用颜色和一个新颜色
        options = all_colors & ~blocked
        fresh = (used + 1) & ~used
        options &= used | fresh
        for c in iter_bits(options):
            color[v] = c
            if assign(depth + 1, used | (1 << c)):
                return True
        color[v] = -1
        return False

    return assign(0, 0)


def is_3_colorable(g: Graph, limit: Optional[int] = None) -> bool:
    return is_k_colorable(g, 3, limit)


# ========== 局部障碍 ==========


def local_obstruction_check(t: Hypergraph3, h: Hypergraph3, colors: int = 3) -> ObstructionVerdict:
    """
    链接可染色性的鸽笼判定

    若 H 嵌入 T 为生成子图，则 link_H(v) ⊆ link_T(f(v))，链接不可 colors-染色的
    H 顶点只能映到链接同样不可染色的 T 顶点。b > n - a 时不存在生成拷贝。

    Raises:
        SizeMismatchError: 顶点数不一致
    """
    if t.n != h.n:
        raise SizeMismatchError(f"SizeMismatch: |V(T)|={t.n} 与 |V(H)|={h.n} 不一致")
    a = sum(1 for lg in all_links(t) if is_k_colorable(lg.graph, colors))
    b = sum(1 for lg in all_links(h) if not is_k_colorable(lg.graph, colors))
    verdict = NO_SPANNING_COPY if b > t.n - a else INCONCLUSIVE
    logger.info(f"局部障碍判定: n={t.n}, a={a}, b={b}, {verdict}")
    return ObstructionVerdict(verdict=verdict, n=t.n, a=a, b=b, colors=colors)


def links_extremal_zero(h: Hypergraph3) -> bool:
    """存在链接恰为一条边的顶点时，链接族的极值数为 0"""
    return any(h.degree(v) == 1 for v in range(h.n))


def link_chromatic_profile(h: Hypergraph3) -> Dict[str, Any]:
    """
    每个顶点链接的可染色性，以及是否属于如下族：
    除一个顶点外所有链接的色数 >= 4，剩下那个链接的色数为 2

    Returns:
        {"vertices": [...], "family": bool, "special": 顶点或 None}
    """
    rows = []
    for lg in all_links(h):
        edges = lg.graph.edge_count
        rows.append({
            "vertex": lg.vertex,
            "edges": edges,
            "two_colorable": is_k_colorable(lg.graph, 2),
            "three_colorable": is_k_colorable(lg.graph, 3),
        })
    colorable = [row for row in rows if row["three_colorable"]]
    special = None
    family = False
    if len(colorable) == 1:
        row = colorable[0]
        family = row["two_colorable"] and row["edges"] > 0
        special = row["vertex"] if family else None
    return {"vertices": rows, "family": family, "special": special}


# ========== 精确生成子图搜索 ==========


def exact_spanning_embedding(
    t: Hypergraph3,
    h: Hypergraph3,
    limit: Optional[int] = None,
) -> Optional[Tuple[int, ...]]:
    """
    穷举搜索 H 到 T 的生成嵌入

    Returns:
        phi，phi[v] 为 H 顶点 v 在 T 中的像；不存在时返回 None

    Raises:
        SizeMismatchError: 顶点数不一致
        InstanceTooLargeError: n 超出 HYPER_EMBED_LIMIT
    """
    if t.n != h.n:
        raise SizeMismatchError(f"SizeMismatch: |V(T)|={t.n} 与 |V(H)|={h.n} 不一致")
    bound = settings.HYPER_EMBED_LIMIT if limit is None else limit
    if h.n > bound:
        raise InstanceTooLargeError("exact_spanning_embedding", h.n, bound)
    if h.edge_count > t.edge_count:
        return None

    n = h.n
    order = sorted(range(n), key=lambda v: (-h.degree(v), v))
    position = {v: i for i, v in enumerate(order)}
    # 第 i 个顶点放置后即可检查的超边
    closing: List[List[Triple]] = [[] for _ in range(n)]
    for triple in h.edges:
        closing[max(position[v] for v in triple)].append(triple)
    t_degrees = [t.degree(v) for v in range(n)]
    phi = [-1] * n

    def place(depth: int, free: int) -> bool:
        if depth == n:
            return True
        v = order[depth]
        candidates = free
        while candidates:
            w = lsb_index(candidates)
            candidates &= candidates - 1
            if t_degrees[w] < h.degree(v):
                continue
            phi[v] = w
            if all(t.has_edge(phi[a], phi[b], phi[c]) for a, b, c in closing[depth]):
                if place(depth + 1, free & ~(1 << w)):
                    return True
        phi[v] = -1
        return False

    if not place(0, (1 << n) - 1):
        return None
    return tuple(phi)
