"""Command line entry for structured gradient tree boosting (``sgtb``)."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from application.config_validator import ConfigValidationError
from application.configuration import AppSettings
from application.container import ServiceContainer
from application.services import DEFAULT_MODEL_PATH, DEFAULT_REPORT_PATH, SGTBWorkflow
from config import (
    DEFAULT_BEAM_WIDTH,
    DEFAULT_BIBSG_ROUNDS,
    DEFAULT_ETA,
    DEFAULT_EVAL_EVERY,
    DEFAULT_MAX_DEPTH,
    DEFAULT_MAX_EPOCHS,
    Strategy,
)
from utils.logging import configure


class UsageError(Exception):
    """Raised instead of argparse's exit so every failure maps to exit code 1."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _common_options() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config-file", help="配置文件路径（默认: config.yaml）")
    common.add_argument(
        "--log-level",
        help="日志级别 (DEBUG/INFO/WARNING/ERROR)；也可通过环境变量 SGTB_LOG_LEVEL 配置",
    )
    common.add_argument("--log-file", help="可选的日志文件路径")
    return common


def _add_search_options(parser: argparse.ArgumentParser, *, include_local: bool = True) -> None:
    strategies = [member.value for member in Strategy if include_local or member is not Strategy.LOCAL]
    parser.add_argument(
        "--strategy",
        choices=strategies,
        help="搜索策略（默认: bibsg；环境变量 SGTB_STRATEGY）",
    )
    parser.add_argument(
        "--beam",
        type=int,
        help=f"束宽（默认: {DEFAULT_BEAM_WIDTH}；环境变量 SGTB_BEAM）",
    )
    parser.add_argument(
        "--bibsg-rounds",
        type=int,
        help=f"双向搜索的轮数（默认: {DEFAULT_BIBSG_ROUNDS}）",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="sgtb", description="结构化梯度树提升的实体消歧工具")
    common = _common_options()
    commands = parser.add_subparsers(dest="command", metavar="{gen,train,predict,eval}")
    commands.required = True

    gen = commands.add_parser("gen", parents=[common], help="生成带标注的合成语料")
    gen.add_argument("--out-dir", required=True, help="输出目录")
    gen.add_argument("--n-docs", type=int, help="训练集文档数（默认: 500）")
    gen.add_argument("--n-dev", type=int, help="验证集文档数（默认: 100）")
    gen.add_argument("--n-test", type=int, help="测试集文档数（默认: 100）")
    gen.add_argument("--mentions", type=int, help="每篇文档的指称数 T（默认: 8）")
    gen.add_argument("--candidates", type=int, help="每个指称的候选数（默认: 5）")
    gen.add_argument("--d-local", type=int, help="局部特征维度（默认: 3）")
    gen.add_argument("--d-pair", type=int, help="实体对特征维度（默认: 2）")
    gen.add_argument("--local-signal", type=float, help="局部特征可信的指称比例 [0, 1]")
    gen.add_argument("--coherence", type=float, help="正确实体对之间的一致性强度")
    gen.add_argument("--noise-pairs", type=float, help="带噪声向量的非正确实体对比例 [0, 1]")
    gen.add_argument(
        "--future-informative",
        action="store_true",
        default=None,
        help="只有后半段指称带局部信号",
    )
    gen.add_argument("--seed", type=int, help="随机种子（环境变量 SGTB_SEED）")

    train = commands.add_parser("train", parents=[common], help="训练 SGTB 模型")
    train.add_argument("--train", required=True, help="训练语料 JSONL")
    train.add_argument("--dev", required=True, help="验证语料 JSONL")
    train.add_argument("--pairwise", help="实体对特征 JSONL")
    _add_search_options(train)
    train.add_argument("--max-depth", type=int, help=f"回归树最大深度（默认: {DEFAULT_MAX_DEPTH}）")
    train.add_argument("--min-leaf", type=int, help="叶节点最少样本数（默认: 1）")
    train.add_argument("--eta", type=float, help=f"每棵树的步长（默认: {DEFAULT_ETA}）")
    train.add_argument("--epochs", type=int, help=f"最大训练轮数（默认: {DEFAULT_MAX_EPOCHS}）")
    train.add_argument("--eval-every", type=int, help=f"验证间隔轮数（默认: {DEFAULT_EVAL_EVERY}）")
    train.add_argument("--patience", type=int, help="连续多少次验证无提升后提前停止")
    train.add_argument("--workers", type=int, help="梯度收集进程数（默认: 1；环境变量 SGTB_WORKERS）")
    train.add_argument("--memory-limit-mb", type=int, help="内存监控阈值，超过后输出警告")
    train.add_argument("--seed", type=int, help="随机种子（环境变量 SGTB_SEED）")
    train.add_argument("--model-out", help=f"模型输出路径（默认: {DEFAULT_MODEL_PATH}）")
    train.add_argument("--report-out", help=f"训练报告输出路径（默认: {DEFAULT_REPORT_PATH}）")

    predict = commands.add_parser("predict", parents=[common], help="用训练好的模型解码语料")
    predict.add_argument("--model", required=True, help="模型文件")
    predict.add_argument("--input", required=True, help="待预测语料 JSONL")
    predict.add_argument("--output", required=True, help="预测结果 JSONL")
    predict.add_argument("--pairwise", help="实体对特征 JSONL")
    _add_search_options(predict)
    predict.add_argument(
        "--exact",
        action="store_true",
        help="用精确枚举求 argmax（受 SGTB_EXACT_MAX_SEQUENCES 限制）",
    )
    predict.add_argument("--exact-max-sequences", type=int, help="精确枚举的序列数上限")

    evaluate = commands.add_parser("eval", parents=[common], help="计算预测文件的准确率")
    evaluate.add_argument("--predictions", required=True, help="预测结果 JSONL")
    return parser


def _run(args: argparse.Namespace) -> int:
    settings = AppSettings.from_cli_args(args)
    configure(settings.log_level, settings.log_file)
    workflow = SGTBWorkflow(settings, ServiceContainer(settings))

    if args.command == "gen":
        paths = workflow.generate()
        for split, path in paths.items():
            print(f"{split}: {path}")
    elif args.command == "train":
        outcome = workflow.train()
        print(f"model: {outcome.model_path}")
        print(f"report: {outcome.report_path}")
    elif args.command == "predict":
        outcome = workflow.predict()
        print(f"predictions: {outcome.output_path}")
    else:
        summary = workflow.evaluate()
        print(json.dumps(summary.to_dict()))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        return _run(args)
    except (
        UsageError,
        ConfigValidationError,
        FileNotFoundError,
        OSError,
        KeyError,
        ValueError,
    ) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover - CLI entry
    raise SystemExit(main())
