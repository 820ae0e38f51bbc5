"""NOMA vs time-division OMA sum rate over transmit power, (24,24,36), l1 = 0.9."""
import sys

from _common import parser, run

if __name__ == "__main__":
    a = parser(__doc__, 1000).parse_args()
    sys.exit(run("fig1", ["sweep-snr", "--dims", "24,24,36", "--l1", "0.9", "--means", "gaussian",
                          "--values", "0,10,20,30,40", "--methods", "monte-carlo,freedet,oma"], a))
