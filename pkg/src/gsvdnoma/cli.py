"""Experiment runner: ``gsvdnoma <subcommand> [flags]``.

Every run writes ``results.csv`` (or a subcommand-specific CSV) and
``summary.json`` into ``--out``. Output bytes depend only on the plan and
seed; wall-clock timings are recorded only with ``--timing``.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .errors import ConfigError, GsvdNomaError
from .freedet import FixedPointOptions, FreeDeterministicEquivalent
from .model import MeanSpec, Regime, SystemConfig, build_mean_matrices, load_config
from .rates import QUAD_TOL, freedet_rates
from .rayleigh import Dims, bin_average_pdf, closed_cauchy_omega, closed_rates, pdf_omega
from .report import RateReport
from .sampler import (SpectrumSample, empirical_cauchy_se, empirical_rates, empirical_spectrum,
                      oma_baseline_rates, sample_spectrum)

KINDS = ("rates", "spectrum", "cauchy-scan", "sweep-snr", "sweep-scale", "sweep-epsilon", "compare-methods")
SUBCOMMANDS = {"rates": "rates", "spectrum": "spectrum", "cauchy-scan": "cauchy-scan", "sweep-snr": "sweep-snr",
               "sweep-scale": "sweep-scale", "sweep-epsilon": "sweep-epsilon", "compare": "compare-methods"}
RATE_METHODS = ("monte-carlo", "freedet", "rayleigh-closed", "oma")
CSV_COLUMNS = ("experiment_id", "kind", "method", "M1", "M2", "N", "S", "mu", "P_dBm", "l1", "epsilon",
               "trials", "seed", "R1", "R2", "sum", "status", "runtime_ms")
SWEEPS = {"sweep-snr": "P_dBm", "sweep-epsilon": "epsilon", "sweep-scale": "mu"}


@dataclass
class ExperimentPlan:
    kind: str
    config: SystemConfig
    means: MeanSpec = field(default_factory=MeanSpec)
    values: tuple = ()
    methods: tuple = ("freedet",)
    out: Path = Path("out")
    pattern: tuple[int, int, int] | None = None
    grid: tuple[float, float, int] | None = None
    bins: int = 50
    bits: bool = False
    tol: float = QUAD_TOL
    workers: int = 1
    timing: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if not self.methods:
            raise ConfigError("methods must be nonempty")
        allowed = RATE_METHODS if self.kind != "cauchy-scan" else ("monte-carlo", "freedet", "rayleigh-closed")
        if self.kind != "spectrum":
            bad = [m for m in self.methods if m not in allowed]
            if bad:
                raise ConfigError(f"unknown methods {bad} for {self.kind}")
        v = [float(x) for x in self.values]
        if len(v) > 1:
            d = np.diff(v)
            if not (np.all(d > 0) or np.all(d < 0)):
                raise ConfigError("sweep values must be strictly monotone")
        if self.kind in SWEEPS or self.kind == "cauchy-scan":
            if not v:
                raise ConfigError(f"{self.kind} needs --values")
        if self.kind == "sweep-scale":
            if self.pattern is None or len(self.pattern) != 3:
                raise ConfigError("sweep-scale needs --pattern a,b,c")
            if any(int(x) != x or x < 1 for x in v):
                raise ConfigError("scale factors must be positive integers")
        if self.kind == "cauchy-scan" and any(x >= 0 for x in v):
            raise ConfigError("cauchy-scan points must be negative reals")
        if self.tol <= 0 or self.workers < 1:
            raise ConfigError("tol must be > 0 and workers >= 1")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["config"] = self.config.to_dict()
        d["means"] = self.means.to_dict()
        d["out"] = str(self.out)
        return d


def _fmt(x) -> str:
    # repr round-trips exactly; np.float64 repr would carry a type prefix
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


class _Context:
    """Caches spectra, LoS means and fixed-point providers across the cells of one run."""

    def __init__(self, plan: ExperimentPlan):
        self.plan = plan
        self._means: dict = {}
        self._spectra: dict = {}
        self._providers: dict = {}

    def means(self, cfg: SystemConfig):
        key = (cfg.M1, cfg.M2, cfg.N)
        if key not in self._means:
            self._means[key] = build_mean_matrices(self.plan.means, cfg)
        return self._means[key]

    def spectrum(self, cfg: SystemConfig) -> SpectrumSample:
        # epsilon-free GSVs do not depend on power, l1 or epsilon
        key = (cfg.M1, cfg.M2, cfg.N, cfg.seed, cfg.trials)
        if key not in self._spectra:
            self._spectra[key] = sample_spectrum(cfg, self.means(cfg), workers=self.plan.workers)
        return self._spectra[key]

    def provider(self, cfg: SystemConfig, cell: int = 0) -> FreeDeterministicEquivalent:
        # one provider per cell: warm starts then never depend on pool scheduling
        key = (cfg.M1, cfg.M2, cfg.N, cfg.epsilon, cell)
        if key not in self._providers:
            self._providers[key] = FreeDeterministicEquivalent(*self.means(cfg), epsilon=cfg.epsilon,
                                                               options=FixedPointOptions())
        return self._providers[key]


class NotApplicable(GsvdNomaError):
    pass


def _rate(ctx: _Context, method: str, cfg: SystemConfig, cell: int = 0) -> RateReport:
    if method == "monte-carlo":
        return empirical_rates(ctx.spectrum(cfg), cfg)
    if method == "oma":
        return oma_baseline_rates(ctx.spectrum(cfg), cfg)
    if method == "freedet":
        return freedet_rates(cfg, None, tol=ctx.plan.tol, provider=ctx.provider(cfg, cell))
    if not ctx.plan.means.is_zero:
        raise NotApplicable("closed form needs zero means")
    return closed_rates(cfg)


def _cells(plan: ExperimentPlan):
    """``(mu, config)`` per sweep point."""
    base = plan.config
    if plan.kind == "sweep-snr":
        return [(1, base.replace(P_dBm=float(v))) for v in plan.values]
    if plan.kind == "sweep-epsilon":
        return [(1, base.replace(epsilon=float(v))) for v in plan.values]
    if plan.kind == "sweep-scale":
        a, b, c = plan.pattern
        return [(int(v), base.replace(M1=a * int(v), M2=b * int(v), N=c * int(v))) for v in plan.values]
    return [(1, base)]


def _rate_rows(plan: ExperimentPlan, ctx: _Context):
    cells = _cells(plan)
    jobs = [(i, mu, cfg, m) for i, (mu, cfg) in enumerate(cells) for m in plan.methods]
    # spectra are drawn up front so the cell pool never races on the cache
    for _, _, cfg, m in jobs:
        if m in ("monte-carlo", "oma") and cfg.regime is not Regime.DEGENERATE:
            try:
                ctx.spectrum(cfg)
            except GsvdNomaError:
                pass

    def run_one(job):
        i, mu, cfg, m = job
        t0 = time.perf_counter()
        row = {"experiment_id": f"{plan.kind}-{i:03d}", "kind": plan.kind, "method": m, "M1": cfg.M1,
               "M2": cfg.M2, "N": cfg.N, "S": cfg.S, "mu": mu, "P_dBm": cfg.P_dBm, "l1": cfg.l1,
               "epsilon": cfg.epsilon, "trials": cfg.trials if m in ("monte-carlo", "oma") else 0,
               "seed": cfg.seed}
        try:
            if cfg.regime is Regime.DEGENERATE:
                raise ConfigError("degenerate dimensions (M1 + M2 <= N)")
            rep = _rate(ctx, m, cfg, i)
            if plan.bits:
                rep = rep.in_bits()
            row.update(R1=rep.R1, R2=rep.R2, sum=rep.sum, status="ok")
            extra = {"se1": rep.se1, "se2": rep.se2, "se_sum": rep.se_sum}
        except NotApplicable:
            row.update(R1="", R2="", sum="", status="not-applicable")
            extra = {}
        except GsvdNomaError as exc:
            row.update(R1="", R2="", sum="", status=type(exc).__name__)
            extra = {"error": str(exc)}
        row["runtime_ms"] = round(1e3 * (time.perf_counter() - t0), 3) if plan.timing else 0
        return row, extra

    if plan.workers > 1:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            return list(pool.map(run_one, jobs))
    return [run_one(j) for j in jobs]


def write_csv(path: Path, columns, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    Path(path).write_text(buf.getvalue())


def grid_edges(x: np.ndarray) -> np.ndarray:
    """Bin edges at grid midpoints, extended by half a step at both ends."""
    mid = 0.5 * (x[1:] + x[:-1])
    return np.concatenate([[x[0] - (mid[0] - x[0])], mid, [x[-1] + (x[-1] - mid[-1])]])


def emit_density(dims: Dims, grid, output, trials: int = 0, seed: int = 0, means=None,
                 config: SystemConfig | None = None, workers: int = 1) -> list[dict]:
    """CSV of ``x``, analytic ``pdf`` (zero-mean), its bin average ``pdf_bin``,
    plus ``hist`` when ``trials > 0``.

    Bins are centred on the grid points, with edges at grid midpoints.
    """
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
        raise ConfigError("grid must be strictly increasing with >= 2 points")
    edges = grid_edges(x)
    rows = [{"x": float(v), "pdf": float(f), "pdf_bin": float(b)}
            for v, f, b in zip(x, pdf_omega(x, dims), bin_average_pdf(edges, dims))]
    columns = ["x", "pdf", "pdf_bin"]
    if trials > 0:
        cfg = config or SystemConfig(dims.M1, dims.M2, dims.N)
        cfg = cfg.replace(trials=trials, seed=seed)
        if means is None:
            means = build_mean_matrices(MeanSpec(), cfg)
        sample = sample_spectrum(cfg, means, workers=workers)
        spec = empirical_spectrum(sample, edges=edges)
        for r, h in zip(rows, spec.density):
            r["hist"] = float(h)
        columns.append("hist")
    write_csv(Path(output), columns, rows)
    return rows


def _cauchy_rows(plan: ExperimentPlan, ctx: _Context):
    cfg = plan.config
    rows = []
    for i, z in enumerate(plan.values):
        z = float(z)
        for m in plan.methods:
            row = {"experiment_id": f"cauchy-scan-{i:03d}", "method": m, "z": z, "G_omega": "", "se": "",
                   "status": "ok"}
            try:
                if m == "freedet":
                    g, se = ctx.provider(cfg).cauchy_omega(z).real, 0.0
                elif m == "rayleigh-closed":
                    if not plan.means.is_zero:
                        raise NotApplicable("closed form needs zero means")
                    g, se = closed_cauchy_omega(z, Dims.of(cfg)).real, 0.0
                else:
                    g, se = empirical_cauchy_se(ctx.spectrum(cfg), z)
                    g = g.real
                row.update(G_omega=float(g), se=float(se))
            except NotApplicable:
                row["status"] = "not-applicable"
            except GsvdNomaError as exc:
                row["status"] = type(exc).__name__
            rows.append(row)
    return rows


def _versions() -> dict:
    return {"gsvdnoma": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def run(plan: ExperimentPlan) -> int:
    """Execute ``plan``; returns the process exit status (0 only if every cell succeeded)."""
    out = Path(plan.out)
    out.mkdir(parents=True, exist_ok=True)
    ctx = _Context(plan)
    summary = {"kind": plan.kind, "plan": plan.to_dict(), "config_hash": plan.config.digest(),
               "seed": plan.config.seed, "versions": _versions(), "units": "bits" if plan.bits else "nats"}
    failures = []
    if plan.kind == "spectrum":
        cfg = plan.config
        lo, hi, n = plan.grid if plan.grid else (0.0, _default_grid_hi(cfg), 100)
        grid = np.linspace(lo, hi, int(n))
        try:
            emit_density(Dims.of(cfg), grid, out / "density.csv", cfg.trials, cfg.seed, ctx.means(cfg), cfg,
                         plan.workers)
            if cfg.trials > 0:
                pool = np.sort(ctx.spectrum(cfg).pooled)
                (out / "samples.csv").write_text("omega\n" + "".join(f"{float(v)!r}\n" for v in pool))
            summary["files"] = ["density.csv"] + (["samples.csv"] if cfg.trials > 0 else [])
        except GsvdNomaError as exc:
            failures.append({"error": type(exc).__name__, "message": str(exc)})
    elif plan.kind == "cauchy-scan":
        rows = _cauchy_rows(plan, ctx)
        write_csv(out / "cauchy.csv", ("experiment_id", "method", "z", "G_omega", "se", "status"), rows)
        failures = [r for r in rows if r["status"] not in ("ok", "not-applicable")]
        summary["files"] = ["cauchy.csv"]
    else:
        pairs = _rate_rows(plan, ctx)
        rows = [r for r, _ in pairs]
        write_csv(out / "results.csv", CSV_COLUMNS, rows)
        summary["files"] = ["results.csv"]
        summary["cells"] = [{"experiment_id": r["experiment_id"], "method": r["method"], "status": r["status"],
                             **e} for r, e in pairs]
        failures = [c for c in summary["cells"] if c["status"] not in ("ok", "not-applicable")]
    summary["failures"] = failures
    summary["status"] = "ok" if not failures else "failed"
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True, default=_fmt) + "\n")
    return 0 if not failures else 1


def _default_grid_hi(cfg: SystemConfig) -> float:
    x1, x2 = Dims.of(cfg).support_edges
    return 1.1 * x2 if math.isfinite(x2) else 10.0 * max(x1, 1.0)


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(v) for v in s.split(",") if v.strip())


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(v) for v in s.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gsvdnoma", description="GSV spectra and GSVD-NOMA rates.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="INI file with [system] and optional [means] sections")
        s.add_argument("--dims", type=_ints, help="M1,M2,N")
        s.add_argument("--P", dest="P_dBm", type=float, help="transmit power in dBm")
        s.add_argument("--l1", type=float)
        s.add_argument("--epsilon", type=float)
        s.add_argument("--seed", type=int)
        s.add_argument("--trials", type=int)
        s.add_argument("--means", choices=("zero", "ones", "gaussian"), help="LoS mean kind")
        s.add_argument("--mean-scale", type=float)
        s.add_argument("--mean-seed", type=int)
        s.add_argument("--methods", type=lambda v: tuple(m.strip() for m in v.split(",") if m.strip()))
        s.add_argument("--values", type=_floats, help="comma-separated sweep values")
        s.add_argument("--pattern", type=_ints, help="a,b,c dimension proportions for sweep-scale")
        s.add_argument("--grid", type=_floats, help="lo,hi,n density grid for spectrum")
        s.add_argument("--out", default="out")
        s.add_argument("--bits", action="store_true", help="report rates in bits")
        s.add_argument("--tol", type=float, default=QUAD_TOL)
        s.add_argument("--workers", type=int, default=1)
        s.add_argument("--timing", action="store_true", help="record wall-clock runtime_ms")
    return p


def plan_from_args(args) -> ExperimentPlan:
    if args.config:
        config, means = load_config(args.config)
    else:
        config, means = SystemConfig(24, 24, 36), MeanSpec()
    over = {}
    if args.dims:
        if len(args.dims) != 3:
            raise ConfigError("--dims takes M1,M2,N")
        over.update(M1=args.dims[0], M2=args.dims[1], N=args.dims[2])
    for k in ("P_dBm", "l1", "epsilon", "seed", "trials"):
        if getattr(args, k) is not None:
            over[k] = getattr(args, k)
    config = config.replace(**over)
    mover = {}
    if args.means:
        mover["kind"] = args.means
    if args.mean_scale is not None:
        mover["scale"] = args.mean_scale
    if args.mean_seed is not None:
        mover["seed"] = args.mean_seed
    means = dataclasses.replace(means, **mover)
    kind = SUBCOMMANDS[args.command]
    if args.methods:
        methods = args.methods
    elif kind == "compare-methods":
        methods = ("monte-carlo", "freedet") + (("rayleigh-closed",) if means.is_zero else ())
    elif kind == "spectrum":
        methods = ("rayleigh-closed",)
    else:
        methods = ("freedet",)
    grid = None
    if args.grid:
        if len(args.grid) != 3:
            raise ConfigError("--grid takes lo,hi,n")
        grid = (args.grid[0], args.grid[1], int(args.grid[2]))
    return ExperimentPlan(kind=kind, config=config, means=means, values=args.values or (), methods=methods,
                          out=Path(args.out), pattern=args.pattern, grid=grid, bits=args.bits, tol=args.tol,
                          workers=args.workers, timing=args.timing)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        plan = plan_from_args(args)
    except (GsvdNomaError, ValueError) as exc:
        json.dump({"status": "error", "error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    return run(plan)


if __name__ == "__main__":
    sys.exit(main())
