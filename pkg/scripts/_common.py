"""Shared helpers for the experiment scripts."""
import argparse
import sys
from pathlib import Path

from gsvdnoma.cli import main as cli_main

ROOT = Path(__file__).resolve().parent.parent


def parser(doc: str, trials: int) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=doc)
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="output root (default results/<script>)")
    return p


def run(name: str, argv: list[str], args) -> int:
    out = Path(args.out) if args.out else ROOT / "results" / name
    full = argv + ["--trials", str(args.trials), "--seed", str(args.seed),
                   "--workers", str(args.workers), "--out", str(out)]
    print("gsvdnoma " + " ".join(full), file=sys.stderr)
    code = cli_main(full)
    print(f"-> {out} (exit {code})", file=sys.stderr)
    return code
