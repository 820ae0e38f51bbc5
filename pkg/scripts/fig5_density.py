"""Limiting GSV density against a Monte Carlo histogram, (20,30,20) zero-mean channels."""
import sys

from _common import parser, run

if __name__ == "__main__":
    a = parser(__doc__, 10_000).parse_args()
    sys.exit(run("fig5", ["spectrum", "--dims", "20,30,20", "--grid", "0.01,6,120"], a))
