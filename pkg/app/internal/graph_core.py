"""
图基础模块

不可变简单图、顶点集合、二部图，以及度序、闭邻域、贪心独立集、
二部图最大匹配等基础运算
"""

import heapq
from collections import deque
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from app.exceptions import GraphFormatError


UNMATCHED = -1  # 未匹配或 BFS 未到达


# ========== 位集工具 ==========


def lsb_index(x: int) -> int:
    """最低位 1 的下标"""
    return (x & -x).bit_length() - 1


def iter_bits(mask: int) -> Iterator[int]:
    """按升序遍历位集中的元素"""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    """顶点集合转位集"""
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


# ========== 顶点集合 ==========


class VertexSet:
    """
    [0, n) 的不可变子集

    成员以升序元组保存，同时维护哈希集合以支持常数时间成员判断；
    遍历顺序总是升序，保证结果可复现
    """

    __slots__ = ("n", "_members", "_lookup")

    def __init__(self, n: int, members: Iterable[int] = ()):
        lookup = frozenset(members)
        for v in lookup:
            if not 0 <= v < n:
                raise GraphFormatError(f"顶点 {v} 不在 [0, {n}) 内")
        self.n = n
        self._lookup = lookup
        self._members = tuple(sorted(lookup))

    @classmethod
    def empty(cls, n: int) -> "VertexSet":
        return cls(n)

    @property
    def members(self) -> Tuple[int, ...]:
        return self._members

    @property
    def mask(self) -> int:
        return mask_of(self._members)

    def __contains__(self, v: object) -> bool:
        return v in self._lookup

    def __iter__(self) -> Iterator[int]:
        return iter(self._members)

    def __len__(self) -> int:
        return len(self._members)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.n == other.n and self._lookup == other._lookup

    def __hash__(self) -> int:
        return hash((self.n, self._lookup))

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, members={list(self._members)})"

    def union(self, other: Iterable[int]) -> "VertexSet":
        return VertexSet(self.n, self._lookup.union(other))

    def difference(self, other: Iterable[int]) -> "VertexSet":
        return VertexSet(self.n, self._lookup.difference(other))

    def intersection(self, other: Iterable[int]) -> "VertexSet":
        return VertexSet(self.n, self._lookup.intersection(other))

    def take(self, count: int) -> "VertexSet":
        """升序取前 count 个成员"""
        return VertexSet(self.n, self._members[:count])


# ========== 简单图 ==========


class Graph:
    """
    n 个带标号顶点上的无向简单图

    邻接以升序邻居元组保存（稀疏大图节省内存），位集形式在首次
    访问 ``masks`` 时惰性构建，供小规模穷举内核使用。
    构造时校验：无自环、邻接对称、端点越界。
    """

    __slots__ = ("n", "_neighbors", "_neighbor_sets", "_degrees", "_m", "_masks")

    def __init__(self, n: int, neighbors: Sequence[Iterable[int]]):
        if n < 1:
            raise GraphFormatError(f"顶点数必须为正整数: {n}")
        if len(neighbors) != n:
            raise GraphFormatError(f"邻接表长度 {len(neighbors)} 与顶点数 {n} 不一致")

        neighbor_sets = []
        for v, nbrs in enumerate(neighbors):
            nbr_set = frozenset(nbrs)
            if v in nbr_set:
                raise GraphFormatError(f"顶点 {v} 存在自环")
            for u in nbr_set:
                if not 0 <= u < n:
                    raise GraphFormatError(f"顶点 {v} 的邻居 {u} 越界 (n={n})")
            neighbor_sets.append(nbr_set)

        for v, nbr_set in enumerate(neighbor_sets):
            for u in nbr_set:
                if v not in neighbor_sets[u]:
                    raise GraphFormatError(f"邻接不对称: {v} -> {u}")

        self.n = n
        self._neighbor_sets = tuple(neighbor_sets)
        self._neighbors = tuple(tuple(sorted(s)) for s in neighbor_sets)
        self._degrees = tuple(len(s) for s in neighbor_sets)
        self._m = sum(self._degrees) // 2
        self._masks: Optional[Tuple[int, ...]] = None

    # ---------- 构造 ----------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        """由边列表构造，重复边合并"""
        adjacency: List[set] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphFormatError(f"边 ({u}, {v}) 是自环")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"边 ({u}, {v}) 越界 (n={n})")
            adjacency[u].add(v)
            adjacency[v].add(u)
        return cls(n, adjacency)

    @classmethod
    def from_masks(cls, n: int, masks: Sequence[int]) -> "Graph":
        return cls(n, [list(iter_bits(m)) for m in masks])

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, [()] * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, [[u for u in range(n) if u != v] for v in range(n)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise GraphFormatError(f"圈至少需要 3 个顶点: {n}")
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def star(cls, n: int, center: int, leaves: Iterable[int]) -> "Graph":
        return cls.from_edges(n, [(center, leaf) for leaf in leaves])

    @classmethod
    def perfect_matching(cls, n: int) -> "Graph":
        if n % 2:
            raise GraphFormatError(f"完美匹配要求 n 为偶数: {n}")
        return cls.from_edges(n, [(2 * i, 2 * i + 1) for i in range(n // 2)])

    @classmethod
    def disjoint_cliques(cls, n: int, size: int) -> "Graph":
        """{0..size-1}, {size..2size-1}, ... 上的不交团"""
        if size < 1 or n % size:
            raise GraphFormatError(f"n={n} 不能被团大小 {size} 整除")
        edges = []
        for start in range(0, n, size):
            block = range(start, start + size)
            edges.extend((u, v) for u in block for v in block if u < v)
        return cls.from_edges(n, edges)

    # ---------- 查询 ----------

    @property
    def edge_count(self) -> int:
        return self._m

    @property
    def max_degree(self) -> int:
        return max(self._degrees)

    @property
    def min_degree(self) -> int:
        return min(self._degrees)

    @property
    def masks(self) -> Tuple[int, ...]:
        """每个顶点的邻接位集"""
        if self._masks is None:
            self._masks = tuple(mask_of(nbrs) for nbrs in self._neighbors)
        return self._masks

    def degree(self, v: int) -> int:
        return self._degrees[v]

    def degrees(self) -> Tuple[int, ...]:
        return self._degrees

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._neighbors[v]

    def neighbor_set(self, v: int) -> frozenset:
        return self._neighbor_sets[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._neighbor_sets[u]

    def edges(self) -> List[Tuple[int, int]]:
        """升序排列的边 (u, v)，u < v"""
        return [(u, v) for u in range(self.n) for v in self._neighbors[u] if u < v]

    def complement(self) -> "Graph":
        full = (1 << self.n) - 1
        return Graph.from_masks(self.n, [full & ~m & ~(1 << v) for v, m in enumerate(self.masks)])

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """顶点 v 改名为 perm[v]"""
        return Graph.from_edges(self.n, [(perm[u], perm[v]) for u, v in self.edges()])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._neighbors == other._neighbors

    def __hash__(self) -> int:
        return hash((self.n, self._neighbors))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self._m})"


# ========== 二部图 ==========


class BipartiteGraph:
    """
    二部图，左侧 [0, left_size)，右侧 [0, right_size)

    两种存储：
    - 显式边表（稀疏 P）
    - 禁止边表（稠密 P，只保存不允许的 (left, right) 对）
    """

    __slots__ = ("left_size", "right_size", "_adjacency", "_forbidden")

    def __init__(self, left_size: int, right_size: int, edges: Iterable[Tuple[int, int]] = ()):
        if left_size < 0 or right_size < 0:
            raise GraphFormatError(f"二部图规模非法: {left_size} x {right_size}")
        adjacency: List[List[int]] = [[] for _ in range(left_size)]
        seen = set()
        for left, right in edges:
            if not (0 <= left < left_size and 0 <= right < right_size):
                raise GraphFormatError(f"二部图边 ({left}, {right}) 越界")
            if (left, right) in seen:
                raise GraphFormatError(f"二部图边 ({left}, {right}) 重复")
            seen.add((left, right))
            adjacency[left].append(right)
        self.left_size = left_size
        self.right_size = right_size
        self._adjacency: Optional[Tuple[Tuple[int, ...], ...]] = tuple(tuple(sorted(a)) for a in adjacency)
        self._forbidden: Optional[Tuple[frozenset, ...]] = None

    @classmethod
    def from_forbidden(
        cls,
        left_size: int,
        right_size: int,
        forbidden: Sequence[Iterable[int]],
    ) -> "BipartiteGraph":
        """稠密二部图：除 forbidden[left] 之外的右顶点全部相邻"""
        if len(forbidden) != left_size:
            raise GraphFormatError("禁止边表长度与左侧规模不一致")
        graph = cls.__new__(cls)
        graph.left_size = left_size
        graph.right_size = right_size
        graph._adjacency = None
        blocked = []
        for left, rights in enumerate(forbidden):
            row = frozenset(rights)
            if any(not 0 <= r < right_size for r in row):
                raise GraphFormatError(f"左顶点 {left} 的禁止边越界")
            blocked.append(row)
        graph._forbidden = tuple(blocked)
        return graph

    @property
    def is_dense(self) -> bool:
        return self._forbidden is not None

    def neighbors(self, left: int) -> Tuple[int, ...]:
        if self._adjacency is not None:
            return self._adjacency[left]
        blocked = self._forbidden[left]
        return tuple(r for r in range(self.right_size) if r not in blocked)

    def forbidden(self, left: int) -> frozenset:
        if self._forbidden is None:
            return frozenset(range(self.right_size)) - frozenset(self._adjacency[left])
        return self._forbidden[left]

    def left_degree(self, left: int) -> int:
        if self._adjacency is not None:
            return len(self._adjacency[left])
        return self.right_size - len(self._forbidden[left])

    def right_degrees(self) -> List[int]:
        """所有右顶点的度"""
        if self._adjacency is not None:
            degrees = [0] * self.right_size
            for row in self._adjacency:
                for r in row:
                    degrees[r] += 1
            return degrees
        degrees = [self.left_size] * self.right_size
        for row in self._forbidden:
            for r in row:
                degrees[r] -= 1
        return degrees

    @property
    def edges(self) -> frozenset:
        return frozenset(
            (left, right) for left in range(self.left_size) for right in self.neighbors(left)
        )

    @property
    def edge_count(self) -> int:
        return sum(self.left_degree(left) for left in range(self.left_size))


# ========== 基础运算 ==========


def degree_sequence_order(g: Graph) -> Tuple[int, ...]:
    """
    按度降序排列顶点，度相同按编号升序

    Returns:
        (v_1, ..., v_n)，满足 d(v_i) >= d(v_{i+1})
    """
    degrees = g.degrees()
    return tuple(sorted(range(g.n), key=lambda v: (-degrees[v], v)))


def closed_neighborhood(g: Graph, w: Iterable[int]) -> VertexSet:
    """N[W] = W ∪ (∪_{v∈W} N(v))"""
    result = set(w)
    for v in list(result):
        result.update(g.neighbor_set(v))
    return VertexSet(g.n, result)


def is_independent(g: Graph, vertices: Iterable[int]) -> bool:
    members = set(vertices)
    return all(not (g.neighbor_set(v) & members) for v in members)


def connected_components(g: Graph, within: Iterable[int]) -> List[List[int]]:
    """
    within 诱导子图的连通分量

    每个分量升序排列，分量按最小顶点升序
    """
    alive = set(within)
    components = []
    for root in sorted(alive):
        if root not in alive:
            continue
        alive.discard(root)
        component = [root]
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in g.neighbors(v):
                if u in alive:
                    alive.discard(u)
                    component.append(u)
                    queue.append(u)
        components.append(sorted(component))
    return components


def greedy_independent_set(
    g: Graph,
    candidates: Iterable[int],
    degree_cap: Optional[int] = None,
) -> VertexSet:
    """
    最小度贪心独立集

    先按 d_g(v) <= degree_cap 过滤候选，然后在候选诱导子图中反复选取
    当前度最小（同度取编号最小）的顶点，并删去它及其邻居。
    结果大小不小于 |候选| / (1 + 诱导子图平均度)。

    Args:
        g: 图
        candidates: 候选顶点
        degree_cap: 度上限（按 g 中的度），None 表示不限制

    Returns:
        独立集
    """
    alive = {
        v for v in candidates
        if degree_cap is None or g.degree(v) <= degree_cap
    }
    current: Dict[int, int] = {v: sum(1 for u in g.neighbors(v) if u in alive) for v in alive}
    heap = [(d, v) for v, d in current.items()]
    heapq.heapify(heap)

    chosen = []
    while heap:
        d, v = heapq.heappop(heap)
        if v not in alive or current[v] != d:
            continue
        chosen.append(v)
        removed = [v] + [u for u in g.neighbors(v) if u in alive]
        for u in removed:
            alive.discard(u)
        for u in removed[1:]:
            for w in g.neighbors(u):
                if w in alive:
                    current[w] -= 1
                    heapq.heappush(heap, (current[w], w))

    return VertexSet(g.n, chosen)


def maximum_bipartite_matching(p: BipartiteGraph) -> List[Tuple[int, int]]:
    """
    二部图最大匹配

    显式存储走 Hopcroft-Karp 分层增广；稠密存储先贪心，再对每个未匹配
    左顶点做一次补图 BFS 增广（补图 BFS 的代价由禁止边数控制）。

    Returns:
        按左顶点升序的匹配对列表；长度等于 left_size = right_size 时为完美匹配
    """
    if p.is_dense:
        pair_left = _dense_matching(p)
    else:
        pair_left = _hopcroft_karp(p)
    return [(left, right) for left, right in enumerate(pair_left) if right != UNMATCHED]


def _hopcroft_karp(p: BipartiteGraph) -> List[int]:
    adjacency = [p.neighbors(left) for left in range(p.left_size)]
    pair_left = [UNMATCHED] * p.left_size
    pair_right = [UNMATCHED] * p.right_size
    dist = [UNMATCHED] * p.left_size

    while True:
        # BFS 分层
        queue = deque()
        for left in range(p.left_size):
            if pair_left[left] == UNMATCHED:
                dist[left] = 0
                queue.append(left)
            else:
                dist[left] = UNMATCHED
        reference = UNMATCHED
        while queue:
            left = queue.popleft()
            if reference != UNMATCHED and dist[left] >= reference:
                continue
            for right in adjacency[left]:
                other = pair_right[right]
                if other == UNMATCHED:
                    if reference == UNMATCHED:
                        reference = dist[left] + 1
                elif dist[other] == UNMATCHED:
                    dist[other] = dist[left] + 1
                    queue.append(other)
        if reference == UNMATCHED:
            break

        # 迭代式 DFS，沿层图寻找不相交的最短增广路
        cursor = [0] * p.left_size
        for root in range(p.left_size):
            if pair_left[root] != UNMATCHED:
                continue
            stack = [root]
            while stack:
                left = stack[-1]
                row = adjacency[left]
                pushed = False
                augmented = False
                while cursor[left] < len(row):
                    right = row[cursor[left]]
                    cursor[left] += 1
                    other = pair_right[right]
                    if other == UNMATCHED:
                        if dist[left] + 1 == reference:
                            augmented = True
                            break
                    elif dist[other] == dist[left] + 1:
                        stack.append(other)
                        pushed = True
                        break
                if augmented:
                    for node in stack:
                        chosen = adjacency[node][cursor[node] - 1]
                        pair_left[node] = chosen
                        pair_right[chosen] = node
                    break
                if not pushed:
                    dist[left] = UNMATCHED
                    stack.pop()

    return pair_left


def _dense_matching(p: BipartiteGraph) -> List[int]:
    pair_left = [UNMATCHED] * p.left_size
    pair_right = [UNMATCHED] * p.right_size

    # 贪心：每个左顶点取编号最小的允许且空闲的右顶点
    free_rights = list(range(p.right_size))
    for left in range(p.left_size):
        blocked = p.forbidden(left)
        for index, right in enumerate(free_rights):
            if right not in blocked:
                pair_left[left] = right
                pair_right[right] = left
                free_rights.pop(index)
                break

    for root in range(p.left_size):
        if pair_left[root] == UNMATCHED:
            _augment_dense(p, root, pair_left, pair_right)
    return pair_left


def _augment_dense(p: BipartiteGraph, root: int, pair_left: List[int], pair_right: List[int]) -> bool:
    unvisited = set(range(p.right_size))
    parent: Dict[int, int] = {}
    queue = deque([root])
    while queue:
        left = queue.popleft()
        blocked = unvisited & p.forbidden(left)
        reached = sorted(unvisited - blocked)
        unvisited = blocked
        for right in reached:
            parent[right] = left
            if pair_right[right] == UNMATCHED:
                # 沿 parent 回溯翻转
                while True:
                    node = parent[right]
                    previous = pair_left[node]
                    pair_left[node] = right
                    pair_right[right] = node
                    if node == root:
                        return True
                    right = previous
            queue.append(pair_right[right])
    return False
