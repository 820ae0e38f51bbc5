"""Sensitivity of the deterministic equivalent to the augmentation epsilon, (24,24,36)."""
import sys

from _common import parser, run

if __name__ == "__main__":
    a = parser(__doc__, 10_000).parse_args()
    sys.exit(run("fig4", ["sweep-epsilon", "--dims", "24,24,36", "--means", "gaussian", "--P", "40",
                          "--l1", "0.05", "--values", "10,1,0.25,0.01,0.001",
                          "--methods", "monte-carlo,freedet"], a))
