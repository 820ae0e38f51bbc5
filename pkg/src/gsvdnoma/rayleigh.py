"""Closed forms for zero-mean (Rayleigh) channels.

Everything here is a pure function of ``(z, dims)``. Dimensions are taken
as given; for ``M1 > M2`` the GSV-level functions go through the swapped
problem and the reciprocal map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, DomainCrossesSupport, OnSupport
from .model import Regime, SystemConfig, classify_regime, subchannel_count
from .report import RateReport
from .transforms import cauchy_omega, reciprocal_cauchy

# |z + 1| below this uses the dedicated z = -1 value
Z_MINUS_ONE_BAND = 1e-9


@dataclass(frozen=True)
class Dims:
    M1: int
    M2: int
    N: int

    def __post_init__(self):
        if min(self.M1, self.M2, self.N) < 1:
            raise ConfigError("antenna counts must be >= 1")
        if self.M1 + self.M2 <= self.N:
            raise ConfigError(f"degenerate dims {self.M1, self.M2, self.N}: need M1 + M2 > N")

    @classmethod
    def of(cls, config: SystemConfig) -> "Dims":
        return cls(config.M1, config.M2, config.N)

    @property
    def S(self) -> int:
        return subchannel_count(self.M1, self.M2, self.N)

    @property
    def Q(self) -> int:
        M1, M2, N = self.M1, self.M2, self.N
        return N * M1 + N * M2 + M1 * M2 - N * N

    @property
    def Q1(self) -> int:
        M1, M2, N = self.M1, self.M2, self.N
        return M1 * M1 + M1 * M2 + N * M2 - N * M1

    @property
    def Q2(self) -> int:
        M1, M2, N = self.M1, self.M2, self.N
        return M2 * M2 + M1 * M2 + N * M1 - N * M2

    @property
    def regime(self) -> Regime:
        return classify_regime(self.M1, self.M2, self.N)

    @property
    def swapped(self) -> "Dims":
        return Dims(self.M2, self.M1, self.N)

    def delta(self, z):
        return (self.M1 - self.N) ** 2 - 2 * self.Q * z + (self.M2 - self.N) ** 2 * z * z

    @cached_property
    def support_edges(self) -> tuple[float, float]:
        """Edges ``(x1, x2)`` of the GSV density; ``x2 = inf`` when ``M2 == N``."""
        if self.regime is Regime.SWAPPED:
            lo, hi = self.swapped.support_edges
            return 1.0 / hi, (1.0 / lo if lo > 0 else math.inf)
        M1, M2, N, Q = self.M1, self.M2, self.N, self.Q
        if M2 == N:
            return (M1 - N) ** 2 / (2 * Q), math.inf
        r = 2.0 * math.sqrt(M1 * M2 * (N * M1 + N * M2 - N * N))
        k = (M2 - N) ** 2
        return (Q - r) / k, (Q + r) / k


def _require_oriented(dims: Dims):
    if dims.M1 > dims.M2:
        raise ConfigError("L-level closed forms need M1 <= M2; use the omega-level functions for swapped dims")


def _sqrt_delta(z, dims: Dims):
    # Analytic off the support, positive on the negative real axis.
    if dims.M2 == dims.N:
        return np.sqrt(dims.delta(z))
    x1, x2 = dims.support_edges
    return -abs(dims.M2 - dims.N) * np.sqrt(z - x1) * np.sqrt(z - x2)


def _check_off_support(z, dims: Dims):
    x1, x2 = dims.support_edges
    on = (z.imag == 0) & (z.real >= x1) & (z.real <= x2)
    if np.any(on):
        raise OnSupport(f"z on the real support [{x1}, {x2}]")


def closed_cauchy_L(z, dims: Dims):
    """Cauchy transform of the eigenvalues of L for zero-mean channels.

    Accepts scalars or arrays. Real ``z`` inside the support raises
    :class:`OnSupport`.
    """
    _require_oriented(dims)
    zz = np.asarray(z, dtype=complex)
    _check_off_support(zz, dims)
    M1, M2, N = dims.M1, dims.M2, dims.N
    near = np.abs(zz + 1) < Z_MINUS_ONE_BAND
    zs = np.where(near, -2.0, zz)
    num = M1 - N + (2 * M1 + M2 - N) * zs + _sqrt_delta(zs, dims)
    g = num / (2 * M1 * zs * (zs + 1))
    g = np.where(near, -(M1 + M2 - N) / (M1 + M2), g)
    return complex(g) if g.ndim == 0 else g


def closed_cauchy_omega(z, dims: Dims):
    """Cauchy transform of the GSV distribution (any orientation)."""
    if dims.regime is Regime.SWAPPED:
        sw = dims.swapped
        g = reciprocal_cauchy(lambda u: closed_cauchy_omega(u, sw), np.asarray(z, dtype=complex))
        return complex(g) if np.ndim(g) == 0 else g
    g = closed_cauchy_L(z, dims)
    return cauchy_omega(g, z, dims.M1, dims.S, dims.regime)


def _check_negative_interval(a, b):
    if not (a < 0 and b < 0):
        raise DomainCrossesSupport(f"[{a}, {b}] must lie on the negative real axis")


def integral_I(a: float, b: float, dims: Dims) -> float:
    """``int_a^b G_L(z) dz`` in closed form, for ``a, b < 0``."""
    _require_oriented(dims)
    _check_negative_interval(a, b)
    if a == b:
        return 0.0
    M1, M2, N = dims.M1, dims.M2, dims.N
    Q, Q1, Q2 = dims.Q, dims.Q1, dims.Q2
    sa, sb = math.sqrt(dims.delta(a)), math.sqrt(dims.delta(b))
    k1, k2, k3 = abs(M1 - N), abs(M2 - N), M1 + M2
    # zero prefactors drop their terms (the log arguments tend to 1 as well)
    I1 = 0.0
    if k1:
        c = (M1 - N) ** 2
        I1 = -k1 * math.log((a / b) * (c - Q * b + k1 * sb) / (c - Q * a + k1 * sa))
    I2 = 0.0
    if k2:
        c = (M2 - N) ** 2
        I2 = -k2 * math.log((Q - c * b + k2 * sb) / (Q - c * a + k2 * sa))
    I3 = k3 * math.log((Q1 - Q2 * b + k3 * sb) / (Q1 - Q2 * a + k3 * sa))
    return (M1 - N) / (2 * M1) * math.log(b / a) + (I1 + I2 + I3) / (2 * M1)


def omega_integral(a: float, b: float, dims: Dims) -> float:
    """``int_a^b G_omega(z) dz`` for ``a, b < 0``, any orientation."""
    _check_negative_interval(a, b)
    if dims.regime is Regime.SWAPPED:
        # G_w(z) = 1/z - G_w'(1/z)/z^2 with w' the swapped GSVs
        return math.log(b / a) + omega_integral(1.0 / a, 1.0 / b, dims.swapped)
    I = integral_I(a, b, dims)
    M1, S = dims.M1, dims.S
    if dims.regime is Regime.FULL_COLUMN_RANK:
        return (M1 / S) * I - ((M1 - S) / S) * math.log(b / a)
    return (M1 / S) * I


def closed_rates(config: SystemConfig) -> RateReport:
    """Total average rates for zero-mean channels, in nats."""
    dims = Dims.of(config)
    M1, S = dims.M1, dims.S
    A, B, l1 = config.l1 * config.snr1, config.snr2, config.l1
    if dims.regime is Regime.FULL_COLUMN_RANK:
        R1 = M1 * math.log1p(A) + M1 * integral_I(-1.0, -1.0 / (1.0 + A), dims)
        R2 = M1 * integral_I(-1.0 - l1 * B, -1.0 - B, dims) - (M1 - S) * math.log((1.0 + B) / (1.0 + l1 * B))
    elif dims.regime is Regime.AUGMENTED:
        R1 = S * math.log1p(A) + M1 * integral_I(-1.0, -1.0 / (1.0 + A), dims)
        R2 = M1 * integral_I(-1.0 - l1 * B, -1.0 - B, dims)
    else:
        R1 = S * (math.log1p(A) + omega_integral(-1.0, -1.0 / (1.0 + A), dims))
        R2 = S * omega_integral(-1.0 - l1 * B, -1.0 - B, dims)
    return RateReport(max(R1, 0.0), max(R2, 0.0), "rayleigh-closed", metadata={"config": config.digest()})


def pdf_omega(x, dims: Dims):
    """Limiting density of a GSV; zero outside the support."""
    xx = np.asarray(x, dtype=float)
    if dims.regime is Regime.SWAPPED:
        with np.errstate(divide="ignore"):
            inv = np.where(xx > 0, 1.0 / np.where(xx > 0, xx, 1.0), 0.0)
        f = np.where(xx > 0, pdf_omega(inv, dims.swapped) * inv * inv, 0.0)
        return float(f) if f.ndim == 0 else f
    x1, x2 = dims.support_edges
    inside = (xx > x1) & (xx < x2)
    xs = np.where(inside, xx, 1.0)
    f = np.sqrt(np.maximum(-dims.delta(xs), 0.0)) / (2 * np.pi * dims.S * xs * (xs + 1))
    f = np.where(inside, f, 0.0)
    return float(f) if f.ndim == 0 else f


def bin_average_pdf(edges, dims: Dims) -> np.ndarray:
    """Mean of :func:`pdf_omega` over each bin, i.e. bin mass / bin width.

    Adaptive quadrature absorbs the integrable ``x^-1/2`` edge that appears
    when ``x1 = 0``, where point samples of the density are unreliable.
    """
    e = np.asarray(edges, dtype=float)
    x1, x2 = dims.support_edges
    out = np.zeros(e.size - 1)
    for i, (a, b) in enumerate(zip(e[:-1], e[1:])):
        lo, hi = max(a, x1), min(b, x2)
        if hi > lo:
            out[i] = quad(lambda x: pdf_omega(x, dims), lo, hi, limit=200, epsabs=1e-12)[0] / (b - a)
    return out
