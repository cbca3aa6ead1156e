"""
文件格式模块

- 边表：首行 "n m"，随后 m 行 "u v"（0 起编号，u < v，按字典序）
- 超图：首行 "n m"，随后 m 行三个升序顶点
- JSON：带 "format": 1，键排序输出
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

from app.exceptions import GraphFormatError, NotABijectionError
from app.internal.graph_core import Graph
from app.internal.hypergraph import Hypergraph3
from app.internal.packing_engine import PackingMap
from app.internal.utils import read_file


FORMAT_VERSION = 1


def _content_lines(text: str) -> List[Tuple[int, List[str]]]:
    """(行号, 字段) 列表，跳过空行与 # 注释"""
    rows = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((number, line.split()))
    return rows


def _ints(fields: List[str], count: int, number: int) -> List[int]:
    if len(fields) != count:
        raise GraphFormatError(f"应有 {count} 个整数，实际 {len(fields)} 个", line=number)
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise GraphFormatError(f"无法解析为整数: {' '.join(fields)}", line=number)


def _header(rows: List[Tuple[int, List[str]]], kind: str) -> Tuple[int, int]:
    if not rows:
        raise GraphFormatError(f"{kind}文件为空", line=1)
    number, fields = rows[0]
    n, m = _ints(fields, 2, number)
    if n < 1 or m < 0:
        raise GraphFormatError(f"非法的表头 n={n}, m={m}", line=number)
    if len(rows) - 1 != m:
        raise GraphFormatError(f"表头声明 {m} 条边，实际 {len(rows) - 1} 条", line=number)
    return n, m


# ========== 边表 ==========


def parse_edge_list(text: str) -> Graph:
    """
    解析边表文本

    Raises:
        GraphFormatError: 格式错误，消息带行号
    """
    rows = _content_lines(text)
    n, _ = _header(rows, "边表")
    edges = []
    seen = set()
    for number, fields in rows[1:]:
        u, v = _ints(fields, 2, number)
        if u == v:
            raise GraphFormatError(f"自环 ({u}, {v})", line=number)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"边 ({u}, {v}) 越界 (n={n})", line=number)
        pair = (min(u, v), max(u, v))
        if pair in seen:
            raise GraphFormatError(f"重复边 ({u}, {v})", line=number)
        seen.add(pair)
        edges.append(pair)
    return Graph.from_edges(n, edges)


def serialize_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_text(path: Union[str, Path]) -> str:
    """读取输入文件，非 UTF-8 内容按格式错误处理"""
    try:
        return read_file(Path(path))
    except UnicodeDecodeError as e:
        raise GraphFormatError(f"{Path(path).name} 不是合法的 UTF-8 文本 (字节偏移 {e.start})")


def load_graph(path: Union[str, Path]) -> Graph:
    return parse_edge_list(read_text(path))


def graph_from_payload(n: int, edges: Sequence[Sequence[int]]) -> Graph:
    """HTTP 载荷 {"n", "edges"} 转图"""
    pairs = []
    for index, edge in enumerate(edges):
        if len(edge) != 2:
            raise GraphFormatError(f"第 {index} 条边应有 2 个端点")
        pairs.append((int(edge[0]), int(edge[1])))
    return Graph.from_edges(n, pairs)


def graph_to_payload(g: Graph) -> Dict[str, Any]:
    return {"n": g.n, "edges": [list(e) for e in g.edges()]}


# ========== 超图 ==========


def parse_hypergraph(text: str) -> Hypergraph3:
    """
    解析超图文本

    Raises:
        GraphFormatError: 格式错误，消息带行号
    """
    rows = _content_lines(text)
    n, _ = _header(rows, "超图")
    triples = []
    seen = set()
    for number, fields in rows[1:]:
        triple = _ints(fields, 3, number)
        if len(set(triple)) != 3:
            raise GraphFormatError(f"超边 {triple} 含重复顶点", line=number)
        if any(not 0 <= v < n for v in triple):
            raise GraphFormatError(f"超边 {triple} 越界 (n={n})", line=number)
        key = tuple(sorted(triple))
        if key in seen:
            raise GraphFormatError(f"重复超边 {triple}", line=number)
        seen.add(key)
        triples.append(key)
    return Hypergraph3(n, triples)


def serialize_hypergraph(hg: Hypergraph3) -> str:
    lines = [f"{hg.n} {hg.edge_count}"]
    lines.extend(f"{a} {b} {c}" for a, b, c in hg.edges)
    return "\n".join(lines) + "\n"


def load_hypergraph(path: Union[str, Path]) -> Hypergraph3:
    return parse_hypergraph(read_text(path))


# ========== JSON ==========


def dump_json(document: Dict[str, Any]) -> str:
    """键排序、缩进 2 的 JSON，末尾换行"""
    payload = {"format": FORMAT_VERSION, **document}
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def parse_mapping(text: str) -> PackingMap:
    """
    解析映射 JSON：整数数组，或带 "mapping" 字段的结果文档

    Raises:
        NotABijectionError: 不是双射或缺少映射
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise NotABijectionError(f"映射 JSON 无法解析: {e.msg}")
    if isinstance(data, dict):
        data = data.get("mapping")
    if not isinstance(data, list):
        raise NotABijectionError("映射文件中没有整数数组")
    return PackingMap.of(data)
