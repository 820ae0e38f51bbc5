"""Monte Carlo oracle: Rician draws, GSV extraction, empirical spectra and rates."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular, svdvals

from .errors import ConfigError, SingularGram
from .model import Regime, SystemConfig, classify_regime, subchannel_count
from .report import RateReport

# cond(R) above this means cond(Gram) = cond(R)^2 is beyond double precision
R_COND_LIMIT = 1e8


def trial_rng(seed: int, trial_index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one (seed, trial, stream) triple."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(trial_index, stream))
    return np.random.Generator(np.random.Philox(ss))


def sample_channel(Hbar: np.ndarray, trial_index: int, seed: int, stream: int = 0) -> np.ndarray:
    """``Hbar`` plus i.i.d. CN(0, 1) entries (real and imaginary variance 1/2)."""
    rng = trial_rng(seed, trial_index, stream)
    shape = np.shape(Hbar)
    g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return Hbar + g / math.sqrt(2.0)


def _r_factor(H: np.ndarray) -> np.ndarray:
    R = np.linalg.qr(H, mode="r")
    d = np.abs(np.diag(R))
    if d.min() == 0 or d.max() / d.min() > R_COND_LIMIT:
        raise SingularGram(f"Gram matrix of a {H.shape[0]}x{H.shape[1]} channel is numerically singular")
    return R


def _l_eigenvalues(H1: np.ndarray, Hd: np.ndarray) -> np.ndarray:
    # nonzero eigenvalues of H1 (Hd^H Hd)^-1 H1^H as squared singular values of H1 R^-1
    R = _r_factor(Hd)
    X = solve_triangular(R, H1.conj().T, trans="C", lower=False)
    return np.sort(svdvals(X) ** 2)


def gsv_extract(H1: np.ndarray, H2: np.ndarray, regime: Regime | None = None, epsilon: float = 1e-5) -> np.ndarray:
    """Sorted GSVs of ``(H1, H2)`` from the eigenvalues of L.

    With ``M2 < N`` the second channel is augmented by ``epsilon * F`` and
    the ``S`` smallest eigenvalues are kept; the rest diverge as epsilon -> 0.
    """
    M1, N = H1.shape
    M2 = H2.shape[0]
    if regime is None:
        regime = classify_regime(M1, M2, N)
    S = subchannel_count(M1, M2, N)
    if regime is Regime.DEGENERATE:
        raise ConfigError("GSVs are deterministic for M1 + M2 <= N; nothing to sample")
    if regime is Regime.SWAPPED:
        inner = classify_regime(M2, M1, N)
        return np.sort(1.0 / gsv_extract(H2, H1, inner, epsilon))
    if regime is Regime.FULL_COLUMN_RANK:
        return _l_eigenvalues(H1, H2)[-S:]
    if not epsilon > 0:
        raise ConfigError("augmented extraction needs epsilon > 0")
    H3 = np.vstack([H2, epsilon * np.eye(N)[: N - M2]])
    return _l_eigenvalues(H1, H3)[:S]


def gsv_exact(H1: np.ndarray, H2: np.ndarray) -> np.ndarray:
    """Sorted GSVs through the CS decomposition of ``[H1; H2]``, any orientation.

    No augmentation is involved, so this is the epsilon-free reference.
    """
    M1, N = H1.shape
    M2 = H2.shape[0]
    if M1 + M2 <= N:
        raise ConfigError("GSVs are deterministic for M1 + M2 <= N; nothing to sample")
    Q, R = np.linalg.qr(np.vstack([H1, H2]))
    d = np.abs(np.diag(R))
    if d.min() == 0 or d.max() / d.min() > R_COND_LIMIT:
        raise SingularGram("stacked channel matrix is rank deficient")
    Q1, Q2 = Q[:M1], Q[M1:]
    _, V = np.linalg.eigh(Q1.conj().T @ Q1)
    lo, hi = max(N - M1, 0), N - max(N - M2, 0)
    V = V[:, lo:hi]
    c2 = np.sum(np.abs(Q1 @ V) ** 2, axis=0)
    s2 = np.sum(np.abs(Q2 @ V) ** 2, axis=0)
    return np.sort(c2 / s2)


@dataclass
class SpectrumSample:
    """Per-trial GSVs, shape ``(trials, S)``, each row sorted ascending."""

    values: np.ndarray
    seed: int
    regime: Regime
    method: str = "exact"
    epsilon: float | None = None
    resampled: int = 0

    @property
    def trials(self) -> int:
        return self.values.shape[0]

    @property
    def S(self) -> int:
        return self.values.shape[1]

    @property
    def pooled(self) -> np.ndarray:
        return self.values.ravel()


def sample_spectrum(
    config: SystemConfig,
    means: tuple[np.ndarray, np.ndarray],
    *,
    trials: int | None = None,
    seed: int | None = None,
    method: str = "exact",
    epsilon: float | None = None,
    policy: str = "resample",
    workers: int = 1,
    max_attempts: int = 10,
) -> SpectrumSample:
    """Draw ``trials`` channel pairs and extract their GSVs.

    ``method="exact"`` uses :func:`gsv_exact`; ``method="pencil"`` uses
    :func:`gsv_extract` with ``epsilon`` (default ``config.epsilon``).
    Trial ``i`` only depends on ``(seed, i)``, so the output does not depend
    on ``workers``.
    """
    trials = config.trials if trials is None else trials
    seed = config.seed if seed is None else seed
    regime = config.regime
    if regime is Regime.DEGENERATE:
        raise ConfigError("GSVs are deterministic for M1 + M2 <= N; nothing to sample")
    if method not in ("exact", "pencil"):
        raise ValueError(f"unknown GSV method {method!r}")
    if policy not in ("resample", "fail"):
        raise ValueError(f"unknown singular-Gram policy {policy!r}")
    if trials < 1:
        raise ConfigError("need at least one trial")
    eps = config.epsilon if epsilon is None else epsilon
    H1bar, H2bar = means
    S = config.S

    def one(i):
        for attempt in range(max_attempts):
            H1 = sample_channel(H1bar, i, seed, 2 * attempt)
            H2 = sample_channel(H2bar, i, seed, 2 * attempt + 1)
            try:
                w = gsv_exact(H1, H2) if method == "exact" else gsv_extract(H1, H2, regime, eps)
                return w, attempt
            except SingularGram:
                if policy == "fail":
                    raise
        raise SingularGram(f"trial {i}: singular after {max_attempts} draws")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(trials), chunksize=max(1, trials // (4 * workers))))
    else:
        results = [one(i) for i in range(trials)]
    values = np.empty((trials, S))
    resampled = 0
    for i, (w, attempts) in enumerate(results):
        values[i] = w
        resampled += attempts
    return SpectrumSample(values, seed, regime, method, None if method == "exact" else eps, resampled)


def _as_pool(samples) -> np.ndarray:
    return samples.pooled if isinstance(samples, SpectrumSample) else np.asarray(samples, dtype=float).ravel()


def empirical_cauchy(samples, z) -> complex:
    pool = _as_pool(samples)
    if pool.size == 0:
        raise ValueError("empty sample")
    return complex(np.mean(1.0 / (complex(z) - pool)))


def empirical_cauchy_se(sample: SpectrumSample, z) -> tuple[complex, float]:
    """Empirical Cauchy transform and its standard error across trials."""
    per_trial = np.mean(1.0 / (complex(z) - sample.values), axis=1)
    se = float(np.std(per_trial, ddof=1) / math.sqrt(sample.trials)) if sample.trials > 1 else math.inf
    return complex(np.mean(per_trial)), se


def user1_rate_terms(w, config: SystemConfig):
    """Per-subchannel rate of user 1 (SIC side) for GSVs ``w``."""
    w = np.asarray(w, dtype=float)
    return np.log1p(w / (1.0 + w) * config.l1 * config.snr1)


def user2_rate_terms(w, config: SystemConfig):
    w = np.asarray(w, dtype=float)
    return np.log1p(config.l2 / (config.l1 + (1.0 + w) / config.snr2))


def _report(r1: np.ndarray, r2: np.ndarray, method: str, config: SystemConfig, sample: SpectrumSample) -> RateReport:
    # r1, r2: per-trial totals over the S subchannels
    n = r1.size
    se1 = float(np.std(r1, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    se2 = float(np.std(r2, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    sse = float(np.std(r1 + r2, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    md = {"config": config.digest(), "trials": n, "seed": sample.seed, "se_sum": sse,
          "gsv_method": sample.method, "resampled": sample.resampled}
    return RateReport(float(np.mean(r1)), float(np.mean(r2)), method, se1, se2, md)


def empirical_rates(sample: SpectrumSample, config: SystemConfig) -> RateReport:
    """Monte Carlo average rates: S times the mean per-subchannel rate."""
    r1 = np.sum(user1_rate_terms(sample.values, config), axis=1)
    r2 = np.sum(user2_rate_terms(sample.values, config), axis=1)
    return _report(r1, r2, "monte-carlo", config, sample)


def oma_baseline_rates(sample: SpectrumSample, config: SystemConfig) -> RateReport:
    """Time-division baseline: each user gets half the channel uses at full power."""
    w = sample.values
    r1 = 0.5 * np.sum(np.log1p(w / (1.0 + w) * config.snr1), axis=1)
    r2 = 0.5 * np.sum(np.log1p(config.snr2 / (1.0 + w)), axis=1)
    return _report(r1, r2, "oma", config, sample)


@dataclass
class EmpiricalSpectrum:
    samples: np.ndarray  # pooled, sorted ascending
    edges: np.ndarray
    density: np.ndarray
    subchannels: int = field(default=1)

    def ecdf(self, x):
        """Fraction of pooled samples ``<= x``."""
        return np.searchsorted(self.samples, x, side="right") / self.samples.size

    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])


def empirical_spectrum(samples, bin_count: int = 50, range: tuple[float, float] | None = None,
                       edges=None) -> EmpiricalSpectrum:
    """Density histogram and ECDF of the pooled GSVs.

    Densities are normalized by the total sample count, so mass outside an
    explicit ``range`` is not redistributed into the bins.
    """
    pool = np.sort(_as_pool(samples))
    if pool.size == 0:
        raise ValueError("empty sample")
    if edges is None:
        if bin_count < 1:
            raise ValueError("bin_count must be >= 1")
        lo, hi = range if range is not None else (pool[0], pool[-1])
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5
        edges = np.linspace(lo, hi, bin_count + 1)
    edges = np.asarray(edges, dtype=float)
    counts, _ = np.histogram(pool, bins=edges)
    density = counts / (pool.size * np.diff(edges))
    S = samples.S if isinstance(samples, SpectrumSample) else 1
    return EmpiricalSpectrum(pool, edges, density, S)


def diag_quadratic_form_mean(Y: np.ndarray, m: int, trials: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo mean and standard error of ``diag(X Y X^H)`` for X m x n CN(0,1)."""
    y = np.asarray(Y)
    y = np.diag(y) if y.ndim == 2 else y
    n = y.size
    acc = np.empty((trials, m))
    for i in range(trials):
        X = sample_channel(np.zeros((m, n)), i, seed)
        acc[i] = np.real(np.einsum("ij,j,ij->i", X, y, X.conj()))
    return acc.mean(axis=0), acc.std(axis=0, ddof=1) / math.sqrt(trials)
