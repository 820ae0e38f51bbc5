"""Method comparison at Rayleigh fading: closed form, deterministic equivalent and Monte Carlo."""
import sys

from _common import parser, run

if __name__ == "__main__":
    a = parser(__doc__, 10_000).parse_args()
    code = 0
    for dims in ("24,24,12", "48,48,60"):
        sub = a.out
        a.out = None if sub is None else f"{sub}/{dims.replace(',', 'x')}"
        code |= run(f"fig6/{dims.replace(',', 'x')}", ["compare", "--dims", dims, "--P", "40", "--l1", "0.05",
                                                         "--methods", "monte-carlo,freedet,rayleigh-closed"], a)
        a.out = sub
    sys.exit(code)
