"""Deterministic-equivalent solver for the Cauchy transform of Rician GSVs.

The unknowns are three scalar traces ``(tr11, tr12, tr22)``. One sweep
rebuilds the N x N inner matrices ``A1``, ``A2`` from the current traces and
returns the traces of the diagonal blocks they induce. In the augmented
regime (``M2 < N``) the second channel is stacked over ``epsilon * F`` with
``F`` the first ``N - M2`` rows of the identity.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NoConvergence, NotConverged, SingularInnerMatrix
from .model import Regime, classify_regime, subchannel_count
from .rayleigh import Dims, closed_cauchy_L
from .transforms import cauchy_omega, reciprocal_cauchy

__all__ = [
    "FixedPointOptions",
    "FixedPointState",
    "CauchyPoint",
    "FreeDeterministicEquivalent",
    "build_augmented_mean",
    "solve_fixed_point",
    "cauchy_L",
    "cauchy_omega",
]


@dataclass(frozen=True)
class FixedPointOptions:
    tol: float = 1e-10
    damping: float = 0.5
    max_iter: int = 2000
    # "anderson" tries Anderson mixing first and falls back to the damped schedule
    accel: str = "anderson"
    depth: int = 5
    halvings: int = 2
    cond_limit: float = 1e12


@dataclass(frozen=True)
class FixedPointState:
    tr11: complex
    tr12: complex
    tr22: complex
    residual: float
    iterations: int
    converged: bool
    z: complex = 0j

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.tr11, self.tr12, self.tr22], dtype=complex)


@dataclass(frozen=True)
class CauchyPoint:
    z: complex
    G_L: complex
    G_omega: complex
    method: str
    state: FixedPointState | None = None


def build_augmented_mean(H2bar: np.ndarray, epsilon: float) -> np.ndarray:
    """Stack ``epsilon * F`` below the M2 x N mean so the result is N x N."""
    H2bar = np.asarray(H2bar)
    M2, N = H2bar.shape
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be > 0, got {epsilon}")
    if M2 >= N:
        raise ConfigError(f"augmentation needs M2 < N, got {M2}x{N}")
    F = np.eye(N)[: N - M2]
    return np.vstack([H2bar, epsilon * F])


def _inv(A: np.ndarray, name: str, cond_limit: float) -> np.ndarray:
    try:
        Ainv = np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise SingularInnerMatrix(name, str(exc)) from exc
    cond = np.linalg.norm(A, 1) * np.linalg.norm(Ainv, 1)
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularInnerMatrix(name, f"1-norm condition {cond:.3e}")
    return Ainv


class _Sweep:
    """One application of the coupled trace equations, with fixed means."""

    def __init__(self, H1bar, H2bar, z, regime: Regime, epsilon: float, cond_limit: float):
        H1bar = np.asarray(H1bar)
        H2bar = np.asarray(H2bar)
        self.M1, self.N = H1bar.shape
        self.M2 = H2bar.shape[0]
        z = complex(z)
        real = z.imag == 0 and not (np.any(np.imag(H1bar)) or np.any(np.imag(H2bar)))
        dt = float if real else complex
        self.z = z.real if real else z
        self.dtype = dt
        H1 = (H1bar.real if real else H1bar).astype(dt)
        H2 = (H2bar.real if real else H2bar).astype(dt)
        if regime is Regime.AUGMENTED:
            self.k = self.N - self.M2
            H3 = build_augmented_mean(H2, epsilon).astype(dt)
        elif regime is Regime.FULL_COLUMN_RANK:
            self.k = 0
            H3 = H2
        else:
            raise ConfigError(f"fixed point undefined for regime {regime}")
        self.H1, self.H1h = H1, H1.conj().T
        self.H3, self.H3h = H3, H3.conj().T
        self.G1 = self.H1h @ H1
        self.G2 = H2.conj().T @ H2
        self.ff = np.zeros(self.N)
        self.ff[: self.k] = epsilon**2
        self.cond_limit = cond_limit
        self.I_M1 = np.eye(self.M1)
        self.I_N = np.eye(self.N)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        t11, t12, t22 = x
        w = self.z - t12
        c = 1.0 + t12
        s = t11 + t22
        if abs(w) < 1e-14:
            raise SingularInnerMatrix("z - tr12")
        if abs(c) < 1e-14:
            raise SingularInnerMatrix("1 + tr12")
        lim = self.cond_limit
        A1 = self.G2 / c + np.diag(self.ff) - s * self.I_N
        A1inv = _inv(A1, "A1", lim)
        A2 = self.G1 / w + s * self.I_N
        A2inv = _inv(A2, "A2", lim)
        E11 = _inv(w * self.I_M1 - self.H1 @ A1inv @ self.H1h, "E11 block", lim)
        E12 = _inv(A1 - self.G1 / w, "E12 block", lim)
        d = np.ones(self.M2 + self.k, dtype=self.dtype)
        d[: self.M2] = c
        E22 = _inv(self.H3 @ A2inv @ self.H3h - np.diag(d), "E22 block", lim)
        return np.array([np.trace(E11), np.trace(E12), np.trace(E22[: self.M2, : self.M2])])


def _rayleigh_init(z, M1, M2, N):
    try:
        g = closed_cauchy_L(z, Dims(M1, M2, N))
        t11 = M1 * g
        t12 = z - M1 / t11
        x = np.array([t11, t12, -M2 / (1 + t12)], dtype=complex)
        if np.all(np.isfinite(x)):
            return x
    except (ArithmeticError, ValueError):
        pass
    return np.array([M1 / z, -N / z, -M2], dtype=complex)


def _in_bounds(x, z, M1) -> bool:
    """Cauchy-transform sanity check on the real negative axis."""
    g = x[0] / M1
    if not np.all(np.isfinite(x)):
        return False
    if np.imag(z) != 0:
        # Im G has the opposite sign of Im z for a positive measure
        return np.sign(g.imag) != np.sign(np.imag(z)) or g.imag == 0
    z = np.real(z)
    return z < 0 and 1.0 / z - 1e-12 <= g.real <= 1e-12


def _damped(sweep, x, alpha, tol, max_iter):
    res = np.inf
    for it in range(1, max_iter + 1):
        gx = sweep(x)
        res = float(np.max(np.abs(gx - x)))
        x = (1 - alpha) * x + alpha * gx
        if res <= tol:
            return gx, res, it, True
    return x, res, max_iter, False


def _anderson(sweep, x, tol, max_iter, depth):
    xs, fs = [], []
    res = np.inf
    for it in range(1, max_iter + 1):
        gx = sweep(x)
        f = gx - x
        res = float(np.max(np.abs(f)))
        if res <= tol:
            return gx, res, it, True
        xs.append(gx)
        fs.append(f)
        if len(fs) > depth + 1:
            xs.pop(0)
            fs.pop(0)
        if len(fs) > 1:
            dF = np.column_stack([fs[j + 1] - fs[j] for j in range(len(fs) - 1)])
            dG = np.column_stack([xs[j + 1] - xs[j] for j in range(len(xs) - 1)])
            gamma = np.linalg.lstsq(dF, f, rcond=None)[0]
            x = gx - dG @ gamma
        else:
            x = gx
        if not np.all(np.isfinite(x)):
            break
    return x, res, it, False


def solve_fixed_point(
    H1bar,
    H2bar,
    z,
    *,
    regime: Regime | None = None,
    epsilon: float = 1e-5,
    options: FixedPointOptions | None = None,
    init=None,
) -> FixedPointState:
    """Solve the trace equations at one point ``z``.

    ``z`` is either real negative or strictly complex (density scans).

    ``H2bar`` is the M2 x N mean of the second channel; the augmentation is
    built internally when ``M2 < N``. Requires ``M1 <= M2`` (swap first).
    Raises :class:`NoConvergence` after the Anderson attempt and the damped
    schedule (``damping``, then halved ``halvings`` times) all fail.
    """
    opts = options or FixedPointOptions()
    z = complex(z)
    if z.imag == 0 and not z.real < 0:
        raise ValueError(f"real z must be negative, got {z}")
    M1, N = np.shape(H1bar)
    M2 = np.shape(H2bar)[0]
    if np.shape(H2bar)[1] != N:
        raise ConfigError("means must share the column count N")
    if regime is None:
        regime = classify_regime(M1, M2, N)
    if regime not in (Regime.FULL_COLUMN_RANK, Regime.AUGMENTED):
        raise ConfigError(f"fixed point needs FullColumnRank or Augmented, got {regime}")
    sweep = _Sweep(H1bar, H2bar, z, regime, epsilon, opts.cond_limit)
    starts = []
    if init is not None:
        starts.append(np.asarray(init, dtype=complex))
    starts.append(_rayleigh_init(z, M1, M2, N))

    def cast(x):
        return x.real.astype(float) if sweep.dtype is float else x.astype(complex)

    schedules = []
    if opts.accel == "anderson":
        schedules.append(("anderson", None))
    schedules += [("damped", opts.damping / 2**h) for h in range(opts.halvings + 1)]
    total = 0
    last = (np.inf, None)
    for x0 in starts:
        for kind, alpha in schedules:
            try:
                if kind == "anderson":
                    x, res, it, ok = _anderson(sweep, cast(x0), opts.tol, opts.max_iter, opts.depth)
                else:
                    x, res, it, ok = _damped(sweep, cast(x0), alpha, opts.tol, opts.max_iter)
            except SingularInnerMatrix as exc:
                last = (np.inf, exc)
                continue
            total += it
            if ok and _in_bounds(np.asarray(x, dtype=complex), z, M1):
                x = np.asarray(x, dtype=complex)
                return FixedPointState(x[0], x[1], x[2], res, total, True, z)
            if res < last[0] or last[1] is None:
                last = (res, None)
    if isinstance(last[1], SingularInnerMatrix):
        raise last[1]
    raise NoConvergence(opts.max_iter, last[0])


def cauchy_L(state: FixedPointState, M1: int) -> complex:
    if not state.converged:
        raise NotConverged("fixed point state has not converged")
    return state.tr11 / M1


class FreeDeterministicEquivalent:
    """Cauchy-transform provider for a fixed pair of LoS means.

    Handles the ``M1 > M2`` swap, memoizes solved points and warm-starts each
    new ``z`` from the nearest solved one.
    """

    method = "freedet"

    def __init__(self, H1bar, H2bar, epsilon: float = 1e-5, options: FixedPointOptions | None = None):
        H1bar, H2bar = np.asarray(H1bar), np.asarray(H2bar)
        M1, N = H1bar.shape
        M2, N2 = H2bar.shape
        if N != N2:
            raise ConfigError("means must share the column count N")
        if M1 + M2 <= N:
            raise ConfigError("degenerate dimensions (M1 + M2 <= N)")
        self.M1, self.M2, self.N = M1, M2, N
        self.S = subchannel_count(M1, M2, N)
        self.swapped = M1 > M2
        self._H = (H2bar, H1bar) if self.swapped else (H1bar, H2bar)
        self._m1 = min(M1, M2)
        self.regime = classify_regime(self._m1, max(M1, M2), N)
        self.epsilon = epsilon
        self.options = options or FixedPointOptions()
        self._cache: dict[complex, FixedPointState] = {}
        self._lock = threading.Lock()

    def with_epsilon(self, epsilon: float) -> "FreeDeterministicEquivalent":
        H1, H2 = self._H[::-1] if self.swapped else self._H
        return FreeDeterministicEquivalent(H1, H2, epsilon, self.options)

    def state(self, z) -> FixedPointState:
        """Converged traces of the oriented (``M1 <= M2``) problem at ``z``."""
        z = complex(z)
        with self._lock:
            hit = self._cache.get(z)
            near = min(self._cache.values(), key=lambda s: abs(s.z - z), default=None)
        if hit is not None:
            return hit
        init = near.vector if near is not None else None
        st = solve_fixed_point(*self._H, z, regime=self.regime, epsilon=self.epsilon, options=self.options, init=init)
        with self._lock:
            self._cache[z] = st
        return st

    def cauchy_L(self, z) -> complex:
        return cauchy_L(self.state(z), self._m1)

    def _omega_oriented(self, z):
        return cauchy_omega(self.cauchy_L(z), complex(z), self._m1, self.S, self.regime)

    def cauchy_omega(self, z) -> complex:
        if self.swapped:
            return complex(reciprocal_cauchy(self._omega_oriented, complex(z)))
        return self._omega_oriented(z)

    __call__ = cauchy_omega

    def point(self, z) -> CauchyPoint:
        st = self.state(z if not self.swapped else 1.0 / complex(z))
        return CauchyPoint(complex(z), cauchy_L(st, self._m1), self.cauchy_omega(z), self.method, st)

    def density(self, x, eta: float = 1e-3) -> float:
        """Experimental: ``-Im G_omega(x + i eta) / pi``."""
        return float(-np.imag(self.cauchy_omega(complex(x, eta))) / np.pi)
