"""Experiment configuration, antenna regimes and line-of-sight mean matrices."""
from __future__ import annotations

import configparser
import dataclasses
import enum
import hashlib
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, FileDimensionMismatch, FileParseError


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


class Regime(enum.Enum):
    FULL_COLUMN_RANK = "full-column-rank"  # M2 >= N
    AUGMENTED = "augmented"  # M2 < N < M1 + M2
    DEGENERATE = "degenerate"  # M1 + M2 <= N
    SWAPPED = "swapped"  # M1 > M2, handled by exchanging the users


def subchannel_count(M1: int, M2: int, N: int) -> int:
    """Number of GSVD subchannels, ``min(M1,N) + min(M2,N) - min(M1+M2,N)``."""
    S = min(M1, N) + min(M2, N) - min(M1 + M2, N)
    assert 0 <= S <= min(M1, M2, N)
    return S


def classify_regime(M1: int, M2: int, N: int) -> Regime:
    if M1 + M2 <= N:
        return Regime.DEGENERATE
    if M1 > M2:
        return Regime.SWAPPED
    if M2 >= N:
        return Regime.FULL_COLUMN_RANK
    return Regime.AUGMENTED


def oriented(M1: int, M2: int, N: int) -> tuple[int, int, int, bool]:
    """Return dims with ``M1 <= M2`` and whether the users were swapped."""
    if M1 > M2:
        return M2, M1, N, True
    return M1, M2, N, False


def effective_regime(M1: int, M2: int, N: int) -> Regime:
    """Regime of the problem actually solved, i.e. after the swap rule."""
    m1, m2, n, _ = oriented(M1, M2, N)
    return classify_regime(m1, m2, n)


@dataclass(frozen=True)
class SystemConfig:
    """Single source of truth for one experiment.

    Powers are in dBm, distances in meters. ``t`` is the long-term power
    normalization coefficient and defaults to 1. Defaults for the distances,
    path-loss exponent and noise power are the evaluation constants
    (200 m, 2000 m, tau = 2, -20 dBm).
    """

    M1: int
    M2: int
    N: int
    d1: float = 200.0
    d2: float = 2000.0
    tau: float = 2.0
    t: float = 1.0
    P_dBm: float = 40.0
    PN_dBm: float = -20.0
    l1: float = 0.05
    epsilon: float = 1e-5
    seed: int = 0
    trials: int = 1000

    def __post_init__(self):
        for name in ("M1", "M2", "N", "seed", "trials"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ConfigError(f"{name} must be an integer, got {v!r}")
        if min(self.M1, self.M2, self.N) < 1:
            raise ConfigError("antenna counts must be >= 1")
        if not 0 < self.l1 < 1:
            raise ConfigError(f"l1 must lie in (0, 1), got {self.l1}")
        for name in ("d1", "d2", "t", "tau", "epsilon"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {v}")
        if not (math.isfinite(self.P_dBm) and math.isfinite(self.PN_dBm)):
            raise ConfigError("powers must be finite")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if self.trials < 0:
            raise ConfigError("trials must be >= 0")

    @property
    def l2(self) -> float:
        return 1.0 - self.l1

    @property
    def rho(self) -> float:
        return dbm_to_mw(self.P_dBm) / dbm_to_mw(self.PN_dBm)

    @property
    def snr1(self) -> float:
        """Large-scale SNR of user 1, ``rho / (t d1^tau)``."""
        return self.rho / (self.t * self.d1**self.tau)

    @property
    def snr2(self) -> float:
        return self.rho / (self.t * self.d2**self.tau)

    @property
    def S(self) -> int:
        return subchannel_count(self.M1, self.M2, self.N)

    @property
    def regime(self) -> Regime:
        return classify_regime(self.M1, self.M2, self.N)

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


MEAN_KINDS = ("zero", "ones", "gaussian", "file")


@dataclass(frozen=True)
class MeanSpec:
    """Recipe for the deterministic LoS matrices.

    ``kind`` is one of ``zero``, ``ones``, ``gaussian`` (i.i.d. CN(0, scale^2)
    entries drawn from ``seed``) or ``file`` (``path1``/``path2`` in the text
    matrix format, see :func:`read_matrix`).
    """

    kind: str = "zero"
    scale: float = 1.0
    seed: int = 0
    path1: str | None = None
    path2: str | None = None

    def __post_init__(self):
        if self.kind not in MEAN_KINDS:
            raise ConfigError(f"unknown mean kind {self.kind!r}; expected one of {MEAN_KINDS}")
        if not (math.isfinite(self.scale) and self.scale >= 0):
            raise ConfigError("scale must be >= 0")
        if self.kind == "file" and not (self.path1 and self.path2):
            raise ConfigError("file means need path1 and path2")

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind == "gaussian" and self.scale == 0)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def build_mean_matrices(spec: MeanSpec, config: SystemConfig) -> tuple[np.ndarray, np.ndarray]:
    shapes = ((config.M1, config.N), (config.M2, config.N))
    if spec.kind == "zero":
        return tuple(np.zeros(s, dtype=complex) for s in shapes)
    if spec.kind == "ones":
        return tuple(np.ones(s, dtype=complex) for s in shapes)
    if spec.kind == "gaussian":
        rng = np.random.default_rng(spec.seed)
        out = []
        for s in shapes:
            z = rng.standard_normal(s) + 1j * rng.standard_normal(s)
            out.append(spec.scale * z / np.sqrt(2.0))
        return tuple(out)
    mats = []
    for path, s in zip((spec.path1, spec.path2), shapes):
        m = read_matrix(path)
        if m.shape != s:
            raise FileDimensionMismatch(f"{path}: expected {s[0]}x{s[1]}, found {m.shape[0]}x{m.shape[1]}")
        mats.append(m)
    return tuple(mats)


def read_matrix(path) -> np.ndarray:
    """Read a complex matrix: first line ``rows cols``, then row-major ``re im`` pairs."""
    try:
        tokens = Path(path).read_text().split()
    except OSError as exc:
        raise FileParseError(f"{path}: {exc}") from exc
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
        vals = np.array([float(x) for x in tokens[2:]])
    except (IndexError, ValueError) as exc:
        raise FileParseError(f"{path}: malformed matrix file") from exc
    if rows < 1 or cols < 1 or vals.size != 2 * rows * cols:
        raise FileParseError(f"{path}: expected {2 * rows * cols} numbers after header, found {vals.size}")
    return (vals[0::2] + 1j * vals[1::2]).reshape(rows, cols)


def write_matrix(path, m: np.ndarray) -> None:
    m = np.asarray(m, dtype=complex)
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(f"{float(v.real)!r} {float(v.imag)!r}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def check_sic_ordering(config: SystemConfig, H1bar: np.ndarray, H2bar: np.ndarray) -> bool:
    """Warn when user 1 is not the stronger user on average; SIC assumes it is."""
    g1 = (np.linalg.norm(H1bar) ** 2 + config.M1 * config.N) / config.d1**config.tau
    g2 = (np.linalg.norm(H2bar) ** 2 + config.M2 * config.N) / config.d2**config.tau
    if g1 < g2:
        warnings.warn(
            f"average gain of user 1 ({g1:.3e}) is below user 2 ({g2:.3e}); SIC ordering assumption violated",
            stacklevel=2,
        )
        return False
    return True


# Config file: INI with a [system] section (SystemConfig fields) and an
# optional [means] section (MeanSpec fields).
_INT_FIELDS = {"M1", "M2", "N", "seed", "trials"}


def load_config(path) -> tuple[SystemConfig, MeanSpec]:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if "system" not in parser:
        raise ConfigError(f"{path}: missing [system] section")
    return parse_sections(dict(parser["system"]), dict(parser["means"]) if "means" in parser else {})


def parse_sections(system: dict, means: dict) -> tuple[SystemConfig, MeanSpec]:
    known = {f.name for f in dataclasses.fields(SystemConfig)}
    kw = {}
    for key, raw in system.items():
        if key not in known:
            raise ConfigError(f"unknown system key {key!r}")
        try:
            kw[key] = int(raw) if key in _INT_FIELDS else float(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    for key in ("M1", "M2", "N"):
        if key not in kw:
            raise ConfigError(f"missing required key {key!r}")
    mkw = {}
    mknown = {f.name for f in dataclasses.fields(MeanSpec)}
    for key, raw in means.items():
        if key not in mknown:
            raise ConfigError(f"unknown means key {key!r}")
        if key == "scale":
            mkw[key] = float(raw)
        elif key == "seed":
            mkw[key] = int(raw)
        else:
            mkw[key] = raw
    return SystemConfig(**kw), MeanSpec(**mkw)


def dump_config(path, config: SystemConfig, means: MeanSpec) -> None:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    parser["system"] = {k: repr(v) if isinstance(v, float) else str(v) for k, v in config.to_dict().items()}
    parser["means"] = {k: str(v) for k, v in means.to_dict().items() if v is not None}
    with open(path, "w") as fh:
        parser.write(fh)
