from __future__ import annotations

import math
from dataclasses import dataclass, field

METHODS = ("monte-carlo", "freedet", "rayleigh-closed", "oma")


@dataclass(frozen=True)
class RateReport:
    """Average user rates in nats.

    ``R1``/``R2`` are totals over the S subchannels. ``se1``/``se2`` are
    Monte Carlo standard errors (zero for deterministic methods).
    """

    R1: float
    R2: float
    method: str
    se1: float = 0.0
    se2: float = 0.0
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        for v in (self.R1, self.R2):
            if not math.isfinite(v):
                raise ValueError("rates must be finite")
        # quadrature noise may leave tiny negatives
        if self.R1 < -1e-9 or self.R2 < -1e-9:
            raise ValueError(f"negative rate ({self.R1}, {self.R2})")

    @property
    def sum(self) -> float:
        return self.R1 + self.R2

    @property
    def se_sum(self) -> float:
        return self.metadata.get("se_sum", math.hypot(self.se1, self.se2))

    def in_bits(self) -> "RateReport":
        k = 1.0 / math.log(2.0)
        md = dict(self.metadata, units="bits")
        if "se_sum" in md:
            md["se_sum"] *= k
        return RateReport(self.R1 * k, self.R2 * k, self.method, self.se1 * k, self.se2 * k, md)
