"""
穷举求解模块

小规模实例的精确判定，用于核对填装引擎与构造：
- exact_pack: 精确填装判定（回溯）
- brute_ex: 小 n 的精确 Turán 数
- is_hamiltonian: 哈密顿圈判定
- enumerate_extremal: 极值图同构类枚举
- clique_number / independence_number / canonical_form / are_isomorphic
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from app.config import settings
from app.exceptions import InstanceTooLargeError, ParameterOutOfRangeError
from app.internal.graph_core import Graph, iter_bits, lsb_index
from app.internal.packing_engine import PackingMap


logger = logging.getLogger(__name__)

CLIQUE_LIMIT = 64


@dataclass(frozen=True)
class ExSearchResult:
    """
    精确 Turán 数搜索结果

    Attributes:
        n: 顶点数
        ex_value: ex(n, H)
        witness: 边数为 ex_value 且不含生成 H 的图
        min_missing: m*，ex_value = C(n,2) - m*
        missing: witness 的补图（缺失边图）
    """

    n: int
    ex_value: int
    witness: Graph
    min_missing: int
    missing: Graph


def _check_limit(what: str, size: int, limit: Optional[int], default: int, force: bool = False) -> None:
    bound = default if limit is None else limit
    if size > bound and not force:
        raise InstanceTooLargeError(what, size, bound)


# ========== 精确填装 ==========


def exact_pack(
    g: Graph,
    h: Graph,
    limit: Optional[int] = None,
    force: bool = False,
) -> Optional[PackingMap]:
    """
    精确判定 G 与 H 能否填装

    按 H 度降序依次为 H 顶点选择 G 顶点，要求已放置的 H 邻居在 G 中与之不相邻，
    即把 H 嵌入 G 的补图。

    Args:
        g: 缺失边图
        h: 目标图
        limit: 顶点数软上限，None 时取 ORACLE_PACK_LIMIT
        force: 忽略上限

    Returns:
        存在时返回 f: V(G) -> V(H)，否则 None

    Raises:
        InstanceTooLargeError: 超出上限且未 force
        ParameterOutOfRangeError: 顶点数不一致
    """
    if g.n != h.n:
        raise ParameterOutOfRangeError(f"顶点数不一致: |V(G)|={g.n}, |V(H)|={h.n}")
    _check_limit("exact_pack", g.n, limit, settings.ORACLE_PACK_LIMIT, force)

    n = g.n
    h_degrees = h.degrees()
    order = sorted(range(n), key=lambda x: (-h_degrees[x], x))
    position = {x: index for index, x in enumerate(order)}
    # 每个 H 顶点在 order 中更早出现的邻居
    earlier = [
        [y for y in h.neighbors(x) if position[y] < position[x]]
        for x in order
    ]
    g_masks = g.masks
    full = (1 << n) - 1
    placed = [-1] * n

    def extend(depth: int, free: int) -> bool:
        if depth == n:
            return True
        x = order[depth]
        candidates = free
        for y in earlier[depth]:
            candidates &= ~g_masks[placed[y]]
            if not candidates:
                return False
        while candidates:
            u = lsb_index(candidates)
            candidates &= candidates - 1
            placed[x] = u
            if extend(depth + 1, free & ~(1 << u)):
                return True
        placed[x] = -1
        return False

    if not extend(0, full):
        return None
    forward = [0] * n
    for x, u in enumerate(placed):
        forward[u] = x
    return PackingMap(tuple(forward))


# ========== 哈密顿圈 ==========


def is_hamiltonian(g: Graph, limit: Optional[int] = None) -> bool:
    """
    精确判定是否存在哈密顿圈

    从顶点 0 出发回溯延伸路径，记录已失败的 (已访问集合, 端点) 状态

    Raises:
        InstanceTooLargeError: n 超出 ORACLE_HAMILTON_LIMIT
    """
    _check_limit("is_hamiltonian", g.n, limit, settings.ORACLE_HAMILTON_LIMIT)
    n = g.n
    if n < 3 or g.min_degree < 2:
        return False
    masks = g.masks
    full = (1 << n) - 1
    failed = set()

    def walk(visited: int, end: int) -> bool:
        if visited == full:
            return bool(masks[end] & 1)
        if (visited, end) in failed:
            return False
        for u in iter_bits(masks[end] & ~visited):
            if walk(visited | (1 << u), u):
                return True
        failed.add((visited, end))
        return False

    return walk(1, 0)


# ========== 团与独立集 ==========


def clique_number(g: Graph, limit: Optional[int] = None) -> int:
    """
    最大团大小（位集分支定界）

    Raises:
        InstanceTooLargeError: n > 64
    """
    _check_limit("clique_number", g.n, limit, CLIQUE_LIMIT)
    masks = g.masks
    best = 0

    def expand(size: int, candidates: int) -> None:
        nonlocal best
        if not candidates:
            best = max(best, size)
            return
        while candidates:
            if size + bin(candidates).count("1") <= best:
                return
            v = lsb_index(candidates)
            candidates &= candidates - 1
            expand(size + 1, candidates & masks[v])

    expand(0, (1 << g.n) - 1)
    return best


def independence_number(g: Graph, limit: Optional[int] = None) -> int:
    return clique_number(g.complement(), limit)


# ========== 同构 ==========


def _pair_index(i: int, j: int, n: int) -> int:
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def canonical_form(g: Graph) -> Tuple[int, int]:
    """
    同构不变的规范码

    顶点先按同构不变量（度，邻居度的多重集）降序分组，在所有保持分组顺序的
    重标号中取边位码最小者；两图同构当且仅当规范码相同

    Returns:
        (n, 最小边位码)
    """
    n = g.n
    degrees = g.degrees()
    classes: Dict[Tuple[int, Tuple[int, ...]], List[int]] = {}
    for v in range(n):
        key = (degrees[v], tuple(sorted(degrees[u] for u in g.neighbors(v))))
        classes.setdefault(key, []).append(v)
    groups = [classes[d] for d in sorted(classes, reverse=True)]
    edges = g.edges()
    # 孤立点互换不改变边位码
    choices = [
        itertools.permutations(group) if degrees[group[0]] else [tuple(group)]
        for group in groups
    ]

    best: Optional[int] = None
    for arrangement in itertools.product(*choices):
        position = {}
        for v in itertools.chain.from_iterable(arrangement):
            position[v] = len(position)
        code = 0
        for u, v in edges:
            code |= 1 << _pair_index(position[u], position[v], n)
        if best is None or code < best:
            best = code
    return n, best or 0


def are_isomorphic(a: Graph, b: Graph) -> bool:
    if a.n != b.n or a.edge_count != b.edge_count:
        return False
    if sorted(a.degrees()) != sorted(b.degrees()):
        return False
    return canonical_form(a) == canonical_form(b)


def _graph_from_code(n: int, code: int) -> Graph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return Graph.from_edges(n, [pairs[b] for b in iter_bits(code)])


# ========== 精确 Turán 数 ==========


def _next_level(n: int, level: Sequence[int]) -> List[int]:
    """在每个规范图上加一条边，去重后按规范码升序返回"""
    total = comb(n, 2)
    seen = set()
    for code in level:
        for bit in range(total):
            if code >> bit & 1:
                continue
            seen.add(canonical_form(_graph_from_code(n, code | (1 << bit)))[1])
    return sorted(seen)


def _packs(job: Tuple[int, int, Graph]) -> bool:
    n, code, h = job
    return exact_pack(_graph_from_code(n, code), h, force=True) is not None


def _failing_codes(n: int, level: Sequence[int], h: Graph, workers: int) -> List[int]:
    """level 中与 h 不能填装的缺失边图，保持规范码顺序"""
    jobs = [(n, code, h) for code in level]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_packs, jobs))
    else:
        results = [_packs(job) for job in jobs]
    return [code for code, ok in zip(level, results) if not ok]


def _search_missing_levels(n: int, h: Graph, workers: int) -> Tuple[int, List[int]]:
    """逐级增加缺失边数，返回 (m*, 该级全部不可填装的规范码)"""
    level = [0]
    for m in range(comb(n, 2) + 1):
        failing = _failing_codes(n, level, h, workers)
        logger.debug(f"缺失边数 {m}: {len(level)} 个同构类, {len(failing)} 个不可填装")
        if failing:
            return m, failing
        level = _next_level(n, level)
    raise ParameterOutOfRangeError("完全图的补图也能填装，H 不能有边")


def _check_ex_inputs(n: int, h: Graph, limit: Optional[int], default: int, what: str) -> None:
    if h.n != n:
        raise ParameterOutOfRangeError(f"n={n} 与 |V(H)|={h.n} 不一致")
    if h.edge_count == 0:
        raise ParameterOutOfRangeError("H 至少需要一条边")
    _check_limit(what, n, limit, default)


def brute_ex(
    n: int,
    h: Graph,
    limit: Optional[int] = None,
    workers: Optional[int] = None,
) -> ExSearchResult:
    """
    穷举计算 ex(n, H)

    缺失边数 m 从 0 起递增，每级由上一级加边并按规范码去重生成全部同构类，
    第一次出现与 H 不能填装的缺失边图时 m* = m。

    Args:
        n: 顶点数，须等于 |V(H)|
        h: 目标图
        limit: 顶点数上限，None 时取 ORACLE_EX_LIMIT
        workers: 并行进程数，None 时取 EXPERIMENT_WORKERS；结果与顺序执行一致

    Returns:
        ExSearchResult，witness 取规范码最小的极值图

    Raises:
        InstanceTooLargeError: n 超出上限
    """
    _check_ex_inputs(n, h, limit, settings.ORACLE_EX_LIMIT, "brute_ex")
    m_star, failing = _search_missing_levels(n, h, workers or settings.EXPERIMENT_WORKERS)
    missing = _graph_from_code(n, failing[0])
    logger.info(f"ex({n}, H) = {comb(n, 2) - m_star}, m* = {m_star}")
    return ExSearchResult(
        n=n,
        ex_value=comb(n, 2) - m_star,
        witness=missing.complement(),
        min_missing=m_star,
        missing=missing,
    )


def enumerate_extremal(
    n: int,
    h: Graph,
    limit: Optional[int] = None,
    workers: Optional[int] = None,
) -> List[Graph]:
    """
    枚举 ex(n, H) 的全部极值图（同构类代表）

    Returns:
        按缺失边图规范码升序排列的极值图，两两不同构

    Raises:
        InstanceTooLargeError: n 超出 ORACLE_ENUMERATE_LIMIT
    """
    _check_ex_inputs(n, h, limit, settings.ORACLE_ENUMERATE_LIMIT, "enumerate_extremal")
    _, failing = _search_missing_levels(n, h, workers or settings.EXPERIMENT_WORKERS)
    return [_graph_from_code(n, code).complement() for code in failing]
