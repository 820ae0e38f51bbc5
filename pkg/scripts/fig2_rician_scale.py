"""Rician rates vs proportionality coefficient mu for pattern (3mu, 4mu, 5mu), all-ones means."""
import sys

from _common import parser, run

if __name__ == "__main__":
    a = parser(__doc__, 1000).parse_args()
    sys.exit(run("fig2", ["sweep-scale", "--pattern", "3,4,5", "--values", "1,2,4,6,8", "--means", "ones",
                          "--P", "40", "--l1", "0.05", "--methods", "monte-carlo,freedet"], a))
