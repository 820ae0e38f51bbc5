"""Average user rates from a Cauchy-transform provider or an empirical CDF.

The integral forms give the expected rate of one subchannel; totals are
``S`` times that, matching the Monte Carlo sums over subchannels.
"""
from __future__ import annotations

import math
import time
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import ConfigError, QuadratureFailure
from .freedet import FixedPointOptions, FreeDeterministicEquivalent
from .model import Regime, SystemConfig
from .rayleigh import Dims, closed_cauchy_omega
from .report import RateReport
from .sampler import EmpiricalSpectrum, user1_rate_terms, user2_rate_terms

__all__ = ["RateReport", "rate_user1", "rate_user2", "rates_from_cauchy", "freedet_rates",
           "closed_quadrature_rates", "rates_from_cdf"]

QUAD_TOL = 1e-9
QUAD_LIMIT = 10_000


def _quad(f, a, b, tol):
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err, info = quad(f, a, b, epsabs=tol, epsrel=0.0, limit=QUAD_LIMIT, full_output=1)[:3]
        except IntegrationWarning as exc:
            raise QuadratureFailure(str(exc)) from exc
    if not math.isfinite(val):
        raise QuadratureFailure("non-finite integral")
    return val, err


def rate_user1(g_omega, config: SystemConfig, scale: float = 1.0, tol: float = QUAD_TOL,
               return_error: bool = False):
    """``log(1+a) + int_0^a G(-1/(1+y)) / (1+y)^2 dy`` times ``scale``, a = l1 * snr1."""
    a = config.l1 * config.snr1
    if a < 0:
        raise ConfigError("a must be >= 0")
    if a == 0:
        return (0.0, 0.0) if return_error else 0.0
    val, err = _quad(lambda y: np.real(g_omega(-1.0 / (1.0 + y))) / (1.0 + y) ** 2, 0.0, a,
                     tol / max(scale, 1.0))
    r = scale * (math.log1p(a) + val)
    return (r, scale * err) if return_error else r


def rate_user2(g_omega, config: SystemConfig, scale: float = 1.0, tol: float = QUAD_TOL,
               return_error: bool = False):
    """``int_0^b [-G(-(1+y)) + l1 G(-(1+l1 y))] dy`` times ``scale``, b = snr2."""
    b, l1 = config.snr2, config.l1
    if b == 0 or l1 == 1:
        return (0.0, 0.0) if return_error else 0.0

    def f(y):
        return -np.real(g_omega(-(1.0 + y))) + l1 * np.real(g_omega(-(1.0 + l1 * y)))

    val, err = _quad(f, 0.0, b, tol / max(scale, 1.0))
    return (scale * val, scale * err) if return_error else scale * val


def rates_from_cauchy(g_omega, config: SystemConfig, method: str, tol: float = QUAD_TOL,
                      metadata: dict | None = None) -> RateReport:
    """Total rates (S times the per-subchannel integrals) for any G_omega evaluator."""
    if config.regime is Regime.DEGENERATE:
        raise ConfigError("rates need M1 + M2 > N")
    S = config.S
    t0 = time.perf_counter()
    R1, e1 = rate_user1(g_omega, config, S, tol, return_error=True)
    R2, e2 = rate_user2(g_omega, config, S, tol, return_error=True)
    md = {"config": config.digest(), "tol": tol, "quad_err": (e1, e2),
          "runtime_ms": 1e3 * (time.perf_counter() - t0)}
    md.update(metadata or {})
    # clamp quadrature noise around zero
    return RateReport(max(R1, 0.0), max(R2, 0.0), method, metadata=md)


def freedet_rates(config: SystemConfig, means, options: FixedPointOptions | None = None,
                  tol: float = QUAD_TOL, provider: FreeDeterministicEquivalent | None = None) -> RateReport:
    """Rician rates from the deterministic-equivalent fixed point."""
    if provider is None:
        provider = FreeDeterministicEquivalent(*means, epsilon=config.epsilon, options=options)
    return rates_from_cauchy(provider.cauchy_omega, config, "freedet", tol, {"epsilon": provider.epsilon})


def closed_quadrature_rates(config: SystemConfig, tol: float = QUAD_TOL) -> RateReport:
    """Quadrature of the zero-mean closed-form transform (cross-check of the closed rates)."""
    dims = Dims.of(config)
    return rates_from_cauchy(lambda z: closed_cauchy_omega(z, dims), config, "rayleigh-closed", tol)


def rates_from_cdf(spectrum: EmpiricalSpectrum, config: SystemConfig) -> RateReport:
    """Stieltjes sums of the per-subchannel rates against the ECDF jumps."""
    x = np.asarray(spectrum.samples, dtype=float)
    if x.size == 0:
        raise ValueError("empty spectrum")
    atoms, counts = np.unique(x, return_counts=True)
    jumps = counts / x.size
    S = spectrum.subchannels
    R1 = S * float(np.sum(user1_rate_terms(atoms, config) * jumps))
    R2 = S * float(np.sum(user2_rate_terms(atoms, config) * jumps))
    return RateReport(R1, R2, "monte-carlo", metadata={"config": config.digest(), "samples": int(x.size)})
