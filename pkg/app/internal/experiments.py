"""
实验模块

基于派生种子的蒙特卡洛实验：
- lemma2_stats: 单次储备集抽样中两组界成立的经验频率
- run_trials / failure_profile: 完整填装的成功率与失败阶段分布
- constant_sweep: 不同 (n, maxdeg_divisor) 下的成功率表（CSV）

每次试验的种子为 derive_seed(master_seed, 试验序号)，并行执行时按序号排序后再汇总
"""

import csv
import io
import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from app.config import settings
from app.exceptions import (
    GuaranteeViolationError,
    HypothesisViolationError,
    ParameterOutOfRangeError,
    UnknownModelSpecError,
)
from app.internal.graph_core import Graph, degree_sequence_order
from app.internal.packing_engine import (
    PackingConfig,
    Success,
    build_s1,
    build_si,
    lemma2_report,
    pack,
    reservoir_range,
)
from app.internal.utils import derive_rng, derive_seed


logger = logging.getLogger(__name__)

SWEEP_HEADER = ["n", "divisor", "trials", "successes", "violations_by_stage"]
OUTSIDE_THEOREM = "outside-theorem"
REGULAR_ATTEMPTS = 100


# ========== 结果类型 ==========


class TrialRecord(BaseModel):
    """
    单次填装试验

    outcome 为 success / violation / rejected；stage 为失效阶段或被违反的前提名。
    max_c、min_d、resamples 只在储备集抽样执行过时给出
    """
    trial: int
    seed: int
    n: int
    config: Dict[str, Any]
    outcome: str
    stage: Optional[str] = None
    timings: Dict[str, float] = {}
    max_c: Optional[int] = None
    min_d: Optional[int] = None
    resamples: Optional[int] = None


class Lemma2Table(BaseModel):
    """储备集界的经验统计"""
    n: int
    model: str
    trials: int
    sampled: int
    freq_c: float
    freq_d: float
    freq_both: float
    max_c_ratio: Dict[str, Optional[float]]
    min_d_ratio: Dict[str, Optional[float]]
    heavy_c_mean: Dict[int, float]
    heavy_c_max_ratio: Optional[float]
    setup_failures: Dict[str, int]


# ========== 随机图模型 ==========


def _parse_spec(spec: str) -> Tuple[str, Optional[int]]:
    name, _, arg = spec.partition(":")
    if not arg:
        return name, None
    try:
        return name, int(arg)
    except ValueError:
        raise UnknownModelSpecError(spec)


# 模型名 -> 是否需要整数参数（None 表示可选）
G_MODELS = {"empty": False, "matching": False, "forest": None, "random": None, "star-noise": None}
H_MODELS = {"matching": False, "triangles": False, "cliques": True, "regular": True}


def check_model(spec: str, models: Dict[str, Optional[bool]]) -> None:
    """
    只校验模型名与参数形式，不生成图

    Raises:
        UnknownModelSpecError: 未知模型或参数形式不符
    """
    name, arg = _parse_spec(spec)
    if name not in models:
        raise UnknownModelSpecError(spec)
    needs_arg = models[name]
    if needs_arg is True and arg is None or needs_arg is False and arg is not None:
        raise UnknownModelSpecError(spec)


def _random_edges(n: int, m: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    """n 个顶点上均匀随机的 m 条不同边"""
    m = min(m, n * (n - 1) // 2)
    chosen = set()
    while len(chosen) < m:
        batch = rng.integers(0, n, size=(2 * (m - len(chosen)) + 8, 2))
        for u, v in batch.tolist():
            if u == v:
                continue
            pair = (u, v) if u < v else (v, u)
            if pair not in chosen:
                chosen.add(pair)
                if len(chosen) == m:
                    break
    return sorted(chosen)


def _random_forest(n: int, m: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    """随机顶点序上的递归树，取前 m 条边"""
    m = min(m, n - 1)
    perm = rng.permutation(n).tolist()
    parents = [int(rng.integers(0, i)) for i in range(1, m + 1)]
    return [(perm[i], perm[p]) for i, p in zip(range(1, m + 1), parents)]


def _star_noise(n: int, budget: int, noise: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    """以随机顶点为中心、budget - noise 片叶子的星，加 noise 条随机边"""
    noise = min(noise, budget)
    perm = rng.permutation(n).tolist()
    center = perm[0]
    edges = {(min(center, leaf), max(center, leaf)) for leaf in perm[1:budget - noise + 1]}
    edges.update(_random_edges(n, noise, rng))
    return sorted(edges)


def random_g(spec: str, n: int, budget: int, rng: np.random.Generator) -> Graph:
    """
    缺失边图 G 的随机模型

    Args:
        spec: empty | matching | forest | random[:m] | star-noise[:m]
        n: 顶点数
        budget: 默认边数，通常为 n - δ(H) - 1
        rng: 随机数生成器

    Raises:
        UnknownModelSpecError: 未知模型
    """
    name, arg = _parse_spec(spec)
    if name == "empty" and arg is None:
        return Graph.empty(n)
    if name == "matching" and arg is None:
        perm = rng.permutation(n).tolist()
        return Graph.from_edges(n, [(perm[2 * i], perm[2 * i + 1]) for i in range(n // 2)])
    if name == "forest":
        return Graph.from_edges(n, _random_forest(n, budget if arg is None else arg, rng))
    if name == "random":
        return Graph.from_edges(n, _random_edges(n, budget if arg is None else arg, rng))
    if name == "star-noise":
        noise = arg if arg is not None else max(1, budget // 10)
        return Graph.from_edges(n, _star_noise(n, budget, noise, rng))
    raise UnknownModelSpecError(spec)


def _random_regular(n: int, d: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    """配对模型生成 d-正则图，带拒绝；多次失败后丢弃自环与重边"""
    stubs = np.repeat(np.arange(n), d)
    if len(stubs) % 2:
        stubs = stubs[:-1]
    edges: List[Tuple[int, int]] = []
    for _ in range(REGULAR_ATTEMPTS):
        pairs = rng.permutation(stubs).reshape(-1, 2).tolist()
        edges = [(min(u, v), max(u, v)) for u, v in pairs]
        if all(u != v for u, v in edges) and len(set(edges)) == len(edges):
            return edges
    return sorted({(u, v) for u, v in edges if u != v})


def random_h(spec: str, n: int, rng: np.random.Generator) -> Graph:
    """
    生成目标图 H 的随机模型（顶点随机重标号）

    Args:
        spec: matching | triangles | cliques:<size> | regular:<d>

    Raises:
        UnknownModelSpecError: 未知模型或 n 不满足模型要求
    """
    name, arg = _parse_spec(spec)
    if name == "matching" and arg is None:
        size = 2
    elif name == "triangles" and arg is None:
        size = 3
    elif name == "cliques" and arg is not None and arg >= 2:
        size = arg
    elif name == "regular" and arg is not None and 1 <= arg < n:
        perm = rng.permutation(n).tolist()
        edges = _random_regular(n, arg, rng)
        return Graph.from_edges(n, [(perm[u], perm[v]) for u, v in edges])
    else:
        raise UnknownModelSpecError(spec)
    if n % size:
        raise UnknownModelSpecError(f"{spec} (n={n} 不能被 {size} 整除)")
    perm = rng.permutation(n).tolist()
    base = Graph.disjoint_cliques(n, size)
    return base.relabel(perm)


def boundary_h_spec(n: int, divisor: float) -> Optional[str]:
    """Δ(H) = ⌊√n / divisor⌋ 处的 H 模型；Δ = 0 时返回 None"""
    degree = math.floor(math.sqrt(n) / divisor + 1e-9)
    if degree < 1:
        return None
    return "matching" if degree == 1 else f"regular:{degree}"


# ========== 并行 ==========


def _run_jobs(func: Callable, jobs: Sequence[Any], workers: Optional[int]) -> List[Any]:
    """按 jobs 顺序返回结果；workers > 1 时使用进程池"""
    workers = workers or settings.EXPERIMENT_WORKERS
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, jobs))
    return [func(job) for job in jobs]


def _distribution(values: Iterable[float]) -> Dict[str, Optional[float]]:
    data = np.asarray(list(values), dtype=float)
    if data.size == 0:
        return {"min": None, "mean": None, "max": None, "std": None}
    return {
        "min": float(data.min()),
        "mean": float(data.mean()),
        "max": float(data.max()),
        "std": float(data.std()),
    }


# ========== 储备集统计 ==========


def _lemma2_trial(job: Tuple[int, int, str, Dict[str, Any], int, int]) -> Dict[str, Any]:
    index, n, model, cfg_values, master_seed, delta = job
    seed = derive_seed(master_seed, index)
    cfg = PackingConfig(**{**cfg_values, "seed": seed})
    g = random_g(model, n, max(n - delta - 1, 0), derive_rng(seed, 0))
    order = degree_sequence_order(g)
    try:
        b1 = build_s1(g, order, delta, cfg).take(delta)
        _, last = reservoir_range(g, order, cfg)
        sets = {i: build_si(g, order[i - 1], b1, cfg) for i in range(2, last + 1)}
    except GuaranteeViolationError as e:
        return {"trial": index, "seed": seed, "failure": e.stage}
    report = lemma2_report(g, order, sets, cfg, derive_rng(seed, 1))
    return {
        "trial": index,
        "seed": seed,
        "failure": None,
        "conjunct_c": report.conjunct_c,
        "conjunct_d": report.conjunct_d,
        "max_c": report.max_c,
        "min_d": report.min_d,
        "heavy_c": report.heavy_c,
    }


def lemma2_stats(
    n: int,
    g_model: str,
    trials: int,
    cfg: Optional[PackingConfig] = None,
    master_seed: Optional[int] = None,
    delta: int = 1,
    workers: Optional[int] = None,
) -> Lemma2Table:
    """
    单次抽样（不重抽）下两组界的经验频率

    Args:
        n: 顶点数
        g_model: G 的随机模型
        trials: 试验次数
        cfg: 常数配置，seed 字段被每次试验的派生种子覆盖
        master_seed: 主种子，None 时取 cfg.seed
        delta: 构造 B_1 所用的 δ
        workers: 并行进程数

    Returns:
        Lemma2Table；heavy_c_mean 为 d(v_i) >= c_bound·√n 的下标 i 上 |C_i| 的均值
    """
    if trials < 1:
        raise ParameterOutOfRangeError(f"trials 必须为正整数: {trials}")
    check_model(g_model, G_MODELS)
    cfg = cfg or PackingConfig.from_settings()
    master = cfg.seed if master_seed is None else master_seed
    values = cfg.snapshot()
    jobs = [(i, n, g_model, values, master, delta) for i in range(trials)]
    rows = sorted(_run_jobs(_lemma2_trial, jobs, workers), key=lambda row: row["trial"])

    sampled = [row for row in rows if row["failure"] is None]
    failures = Counter(row["failure"] for row in rows if row["failure"] is not None)
    sqrt_n = math.sqrt(n)
    count = len(sampled) or 1

    heavy: Dict[int, List[int]] = {}
    for row in sampled:
        for i, size in row["heavy_c"].items():
            heavy.setdefault(i, []).append(size)
    heavy_mean = {i: float(np.mean(sizes)) for i, sizes in sorted(heavy.items())}

    table = Lemma2Table(
        n=n,
        model=g_model,
        trials=trials,
        sampled=len(sampled),
        freq_c=sum(row["conjunct_c"] for row in sampled) / count,
        freq_d=sum(row["conjunct_d"] for row in sampled) / count,
        freq_both=sum(row["conjunct_c"] and row["conjunct_d"] for row in sampled) / count,
        max_c_ratio=_distribution(row["max_c"] / sqrt_n for row in sampled),
        min_d_ratio=_distribution(row["min_d"] / sqrt_n for row in sampled if row["min_d"] is not None),
        heavy_c_mean=heavy_mean,
        heavy_c_max_ratio=max(heavy_mean.values()) / sqrt_n if heavy_mean else None,
        setup_failures=dict(sorted(failures.items())),
    )
    logger.info(f"储备集统计: n={n}, model={g_model}, C={table.freq_c:.3f}, D={table.freq_d:.3f}")
    return table


# ========== 填装试验 ==========


def _pack_trial(job: Tuple[int, int, str, str, Dict[str, Any], int]) -> TrialRecord:
    index, n, g_model, h_model, cfg_values, master_seed = job
    seed = derive_seed(master_seed, index)
    cfg = PackingConfig(**{**cfg_values, "seed": seed})
    h = random_h(h_model, n, derive_rng(seed, 1))
    budget = max(n - h.min_degree - 1, 0)
    g = random_g(g_model, n, budget, derive_rng(seed, 0))
    base = {"trial": index, "seed": seed, "n": n, "config": cfg.snapshot()}
    try:
        outcome = pack(g, h, cfg)
    except HypothesisViolationError as e:
        return TrialRecord(**base, outcome="rejected", stage=e.hypothesis)

    samples = outcome.trace.of_kind("sample")
    last = samples[-1].data if samples else {}
    return TrialRecord(
        **base,
        outcome=outcome.tag,
        stage=None if isinstance(outcome, Success) else outcome.stage,
        timings=outcome.timings,
        max_c=last.get("max_c"),
        min_d=last.get("min_d"),
        resamples=len(samples) if samples else None,
    )


def run_trials(
    n: int,
    g_model: str,
    h_model: str,
    trials: int,
    cfg: Optional[PackingConfig] = None,
    master_seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> List[TrialRecord]:
    """
    运行 trials 次完整填装，结果按试验序号排列

    Raises:
        UnknownModelSpecError: 模型未知
    """
    check_model(g_model, G_MODELS)
    check_model(h_model, H_MODELS)
    cfg = cfg or PackingConfig.from_settings()
    master = cfg.seed if master_seed is None else master_seed
    values = cfg.snapshot()
    jobs = [(i, n, g_model, h_model, values, master) for i in range(trials)]
    records = _run_jobs(_pack_trial, jobs, workers)
    return sorted(records, key=lambda r: r.trial)


def failure_profile(records: Iterable[TrialRecord]) -> Dict[str, int]:
    """失败阶段分布；输入被拒绝的试验记为 rejected:<前提名>"""
    counts: Counter = Counter()
    for record in records:
        if record.outcome == "violation":
            counts[record.stage] += 1
        elif record.outcome == "rejected":
            counts[f"rejected:{record.stage}"] += 1
    return dict(sorted(counts.items()))


# ========== 常数扫描 ==========


def _format_profile(profile: Dict[str, int]) -> str:
    return ";".join(f"{stage}={count}" for stage, count in sorted(profile.items()))


def constant_sweep(
    n_list: Sequence[int],
    divisor_list: Sequence[float],
    trials: int,
    master_seed: int,
    g_model: str = "random",
    base_cfg: Optional[PackingConfig] = None,
    workers: Optional[int] = None,
) -> str:
    """
    对每个 (n, divisor) 在边界 Δ(H) = ⌊√n/divisor⌋ 上运行填装

    divisor < √2 的单元标记为 outside-theorem 且不运行；Δ(H) = 0 时全部试验记为
    rejected:IsolatedVertexInH

    Returns:
        CSV 文本，表头 n,divisor,trials,successes,violations_by_stage
    """
    if not n_list or not divisor_list:
        raise ParameterOutOfRangeError("n_list 与 divisor_list 不能为空")
    check_model(g_model, G_MODELS)
    base = (base_cfg or PackingConfig.from_settings()).snapshot()

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(SWEEP_HEADER)
    for cell, (n, divisor) in enumerate((n, d) for n in n_list for d in divisor_list):
        if divisor < math.sqrt(2):
            writer.writerow([n, f"{divisor:g}", 0, 0, OUTSIDE_THEOREM])
            continue
        h_spec = boundary_h_spec(n, divisor)
        if h_spec is None:
            writer.writerow([n, f"{divisor:g}", trials, 0, f"rejected:IsolatedVertexInH={trials}"])
            continue
        cfg = PackingConfig(**{**base, "maxdeg_divisor": divisor})
        records = run_trials(
            n, g_model, h_spec, trials, cfg,
            master_seed=derive_seed(master_seed, cell),
            workers=workers,
        )
        successes = sum(1 for r in records if r.outcome == "success")
        writer.writerow([n, f"{divisor:g}", trials, successes, _format_profile(failure_profile(records))])
        logger.info(f"常数扫描: n={n}, divisor={divisor:g}, 成功 {successes}/{trials}")
    return buffer.getvalue()
