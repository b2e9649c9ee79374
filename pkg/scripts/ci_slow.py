"""Run the slow lane: end-to-end CLI runs and the synthetic-corpus acceptance checks."""
from __future__ import annotations

import argparse
import logging
import subprocess
import sys
import time
from pathlib import Path

from utils.logging import configure

logger = logging.getLogger("sgtb.ci")

REPO_ROOT = Path(__file__).resolve().parents[1]


def _parse(argv: list[str]) -> tuple[argparse.Namespace, list[str]]:
    parser = argparse.ArgumentParser(description="运行标记为 slow 的测试")
    parser.add_argument("--acceptance-only", action="store_true", help="只运行 tests/acceptance")
    return parser.parse_known_args(argv)


def main(argv: list[str] | None = None) -> int:
    options, passthrough = _parse(list(sys.argv[1:] if argv is None else argv))
    configure("INFO")
    targets = ["tests/acceptance"] if options.acceptance_only else []
    command = [sys.executable, "-m", "pytest", "-m", "slow", *targets, *passthrough]
    started = time.perf_counter()
    result = subprocess.run(command, cwd=REPO_ROOT)
    logger.info("慢速测试结束: 返回码 %d, 用时 %.1fs", result.returncode, time.perf_counter() - started)
    return result.returncode


if __name__ == "__main__":  # pragma: no cover - CLI helper
    raise SystemExit(main())
