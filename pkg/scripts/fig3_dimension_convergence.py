"""Convergence in dimension: pattern (2mu, 2mu, 3mu), all-ones means, mu up to 20."""
import sys

from _common import parser, run

if __name__ == "__main__":
    a = parser(__doc__, 500).parse_args()
    sys.exit(run("fig3", ["sweep-scale", "--pattern", "2,2,3", "--values", "1,2,5,10,20", "--means", "ones",
                          "--P", "40", "--l1", "0.05", "--methods", "monte-carlo,freedet"], a))
