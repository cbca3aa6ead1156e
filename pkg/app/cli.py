"""
命令行入口

    python -m app.cli pack G.txt H.txt --seed 1
    python -m app.cli verify G.txt H.txt mapping.json
    python -m app.cli construct ore --n 6
    python -m app.cli brute-ex C6.txt
    python -m app.cli enumerate C6.txt
    python -m app.cli obstruction T.txt H.txt
    python -m app.cli experiments lemma2 --n 400 --model matching --trials 20
    python -m app.cli experiments sweep --n 400 1600 --divisor 10 20 --trials 5

退出码：0 成功，1 输入或参数错误，2 保证失效，3 验证失败
"""

import argparse
import logging
import sys
from math import comb
from pathlib import Path
from typing import Optional, Sequence

from app.config import settings
from app.exceptions import PackingException
from app.internal import constructions, exact_oracle, experiments, formats, hypergraph
from app.internal.graph_core import Graph
from app.internal.packing_engine import PackingConfig, Success, outcome_document, pack, verify_packing
from app.internal.utils import save_file
from app.logger_config import setup_logging


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2
EXIT_VERIFY = 3

# 由 --seed / --retries 单独提供
_EXPLICIT_FIELDS = ("seed", "max_resamples")


def _emit(text: str, out: Optional[str] = None) -> None:
    if out:
        path = Path(out)
        save_file(text, path.name, path.parent)
    sys.stdout.write(text)


def _config_from_args(args: argparse.Namespace) -> PackingConfig:
    overrides = {name: getattr(args, name, None) for name in PackingConfig.model_fields}
    overrides["max_resamples"] = args.retries
    return PackingConfig.from_settings(**overrides)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    """PackingConfig 的每个常数对应一个同名开关"""
    group = parser.add_argument_group("常数覆盖")
    for name, info in PackingConfig.model_fields.items():
        if name in _EXPLICIT_FIELDS:
            continue
        group.add_argument(
            f"--{name.replace('_', '-')}",
            dest=name,
            type=info.annotation,
            default=None,
            help=f"默认 {info.default:g}",
        )
    parser.add_argument("--seed", type=int, default=None, help=f"主种子，默认 {settings.PACKING_SEED}")
    parser.add_argument("--retries", type=int, default=None, help=f"储备集最多抽样次数，默认 {settings.PACKING_MAX_RESAMPLES}")


# ========== 子命令 ==========


def cmd_pack(args: argparse.Namespace) -> int:
    g = formats.load_graph(args.g)
    h = formats.load_graph(args.h)
    cfg = _config_from_args(args)
    outcome = pack(g, h, cfg)
    if args.trace_out:
        path = Path(args.trace_out)
        save_file(outcome.trace.to_json() + "\n", path.name, path.parent)
    _emit(formats.dump_json(outcome_document(outcome, cfg)), args.out)
    return EXIT_OK if isinstance(outcome, Success) else EXIT_VIOLATION


def cmd_verify(args: argparse.Namespace) -> int:
    g = formats.load_graph(args.g)
    h = formats.load_graph(args.h)
    mapping = formats.parse_mapping(formats.read_text(args.mapping))
    valid = verify_packing(g, h, mapping)
    _emit(formats.dump_json({"valid": valid}))
    return EXIT_OK if valid else EXIT_VERIFY


def cmd_construct(args: argparse.Namespace) -> int:
    params = {"n": args.n, "delta": args.delta, "k": args.k, "s": args.s}
    objects, report = constructions.build_construction(args.name, params)
    out_dir = Path(args.out_dir) if args.out_dir else settings.OUTPUT_DIR
    files = {}
    for stem, obj in objects.items():
        if isinstance(obj, Graph):
            text = formats.serialize_edge_list(obj)
        else:
            text = formats.serialize_hypergraph(obj)
        files[stem] = save_file(text, f"{stem}.txt", out_dir)
    document = {"report": report.model_dump(), "files": files, "ok": report.ok}
    _emit(formats.dump_json(document))
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_brute_ex(args: argparse.Namespace) -> int:
    h = formats.load_graph(args.h)
    result = exact_oracle.brute_ex(h.n, h, workers=args.workers)
    document = {
        "n": result.n,
        "ex": result.ex_value,
        "min_missing": result.min_missing,
        "formula": comb(h.n - 1, 2) + h.min_degree - 1,
        "witness": formats.graph_to_payload(result.witness),
    }
    _emit(formats.dump_json(document))
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    h = formats.load_graph(args.h)
    classes = exact_oracle.enumerate_extremal(h.n, h, workers=args.workers)
    document = {
        "n": h.n,
        "count": len(classes),
        "classes": [
            {
                "edges": g.edge_count,
                "clique_number": exact_oracle.clique_number(g),
                "graph": formats.graph_to_payload(g),
            }
            for g in classes
        ],
    }
    _emit(formats.dump_json(document))
    return EXIT_OK


def cmd_obstruction(args: argparse.Namespace) -> int:
    t = formats.load_hypergraph(args.t)
    h = formats.load_hypergraph(args.h)
    verdict = hypergraph.local_obstruction_check(t, h, colors=args.colors)
    _emit(formats.dump_json(verdict.to_dict()))
    return EXIT_OK


def cmd_lemma2(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    table = experiments.lemma2_stats(
        args.n, args.model, args.trials, cfg,
        master_seed=cfg.seed, delta=args.delta, workers=args.workers,
    )
    _emit(formats.dump_json(table.model_dump()), args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    text = experiments.constant_sweep(
        args.n, args.divisor, args.trials, cfg.seed,
        g_model=args.model, base_cfg=cfg, workers=args.workers,
    )
    _emit(text, args.out)
    return EXIT_OK


# ========== 解析器 ==========


class _Parser(argparse.ArgumentParser):
    """用法错误按参数错误处理，退出码 1"""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="packing", description="稀疏生成图填装与极值构造工具")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pack", help="运行四阶段填装")
    p.add_argument("g", help="缺失边图 G 的边表文件")
    p.add_argument("h", help="目标图 H 的边表文件")
    p.add_argument("--trace-out", help="审计日志输出路径")
    p.add_argument("--out", help="结果 JSON 输出路径")
    _add_config_flags(p)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("verify", help="验证映射是否为填装")
    p.add_argument("g")
    p.add_argument("h")
    p.add_argument("mapping", help="映射 JSON（数组或 pack 的结果文档）")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", help="生成极值构造及其报告")
    p.add_argument("name", choices=constructions.CONSTRUCTION_NAMES)
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--out-dir", help=f"默认 {settings.OUTPUT_DIR}")
    p.set_defaults(func=cmd_construct)

    for name, func, text in (
        ("brute-ex", cmd_brute_ex, "穷举计算 ex(n, H)"),
        ("enumerate", cmd_enumerate, "枚举极值图同构类"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("h", help="目标图 H 的边表文件")
        p.add_argument("--workers", type=int, default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("obstruction", help="超图链接可染色性的鸽笼判定")
    p.add_argument("t", help="宿主超图文件")
    p.add_argument("h", help="目标超图文件")
    p.add_argument("--colors", type=int, default=3)
    p.set_defaults(func=cmd_obstruction)

    p = sub.add_parser("experiments", help="蒙特卡洛实验")
    exp = p.add_subparsers(dest="experiment", required=True)

    q = exp.add_parser("lemma2", help="储备集界的经验频率")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--model", default="matching")
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--delta", type=int, default=1)
    q.add_argument("--workers", type=int, default=None)
    q.add_argument("--out")
    _add_config_flags(q)
    q.set_defaults(func=cmd_lemma2)

    q = exp.add_parser("sweep", help="常数扫描，输出 CSV")
    q.add_argument("--n", type=int, nargs="+", required=True)
    q.add_argument("--divisor", type=float, nargs="+", required=True)
    q.add_argument("--trials", type=int, default=10)
    q.add_argument("--model", default="random")
    q.add_argument("--workers", type=int, default=None)
    q.add_argument("--out")
    _add_config_flags(q)
    q.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging()
    try:
        return args.func(args)
    except PackingException as e:
        logger.error(e.message)
        sys.stderr.write(f"error: {e.message}\n")
        return EXIT_INPUT
    except OSError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
