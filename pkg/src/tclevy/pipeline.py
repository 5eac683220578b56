"""Three-stage batch run: copula MLE on trade counts, moment fit of returns, simulation.

Time unit convention: intensities are per bin, and a run over H retained
bins is simulated on [0, 1] with lam_k -> lam_k * H.  Replication k uses
seed ``seed + k``.
"""
from __future__ import annotations

import contextlib
import dataclasses
import json
import logging
import math
import os
import shutil
import tempfile
import typing
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .copula import ClaytonCopula
from .empirics import IncrementPanel, copula_surface_grid, tail_transform, write_surface_csv
from .errors import ConfigError, DataError, NumericalError, TCLevyError
from .estimation import classify_jumps, mle_fit, mom_fit
from .ingest import align, ingest, stats_report, write_stats_csv
from .series import BivModelParams, replicate, simulate_model_paths
from .subordinator import ExpCppParams

log = logging.getLogger(__name__)

PARAM_KEYS = ("lambda1", "lambda2", "theta1", "theta2", "delta",
              "mu1", "mu2", "sigma2_1", "sigma2_2", "loglik", "converged")
PATH_HEADER = ("s", "T1", "T2", "Z1", "Z2", "X1", "X2")


@dataclass
class RunConfig:
    input1: str | None = None
    input2: str | None = None
    bin_minutes: float = 30.0
    threshold: float | None = None
    threshold_percentile: float = 10.0
    truncation_r: float | None = None
    seed: int | None = None
    replications: int = 1
    workers: int = 1
    output_dir: str = "out"
    params: str | None = None
    surface_points: int = 10
    day_gap_hours: float = 4.0

    def validate(self) -> "RunConfig":
        if not (self.bin_minutes > 0):
            raise ConfigError("bin_minutes must be positive")
        if self.replications < 1:
            raise ConfigError("replications must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.surface_points < 1:
            raise ConfigError("surface_points must be at least 1")
        if not (0 < self.threshold_percentile < 100):
            raise ConfigError("threshold_percentile must lie in (0, 100)")
        if self.truncation_r is not None and not (self.truncation_r > 0):
            raise ConfigError("truncation_r must be positive")
        return self


def _field_types():
    hints = typing.get_type_hints(RunConfig)
    out = {}
    for f in dataclasses.fields(RunConfig):
        args = [a for a in typing.get_args(hints[f.name]) if a is not type(None)]
        out[f.name] = args[0] if args else hints[f.name]
    return out


def _coerce(key: str, raw: str):
    kind = _field_types()[key]
    text = raw.strip()
    if text.lower() in ("", "none", "null"):
        return None
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind.__name__}") from None
    return text


def parse_config(text: str, source: str = "<config>") -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; unknown keys are errors."""
    known = _field_types()
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def load_config(path, **overrides) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    values = parse_config(text, str(path))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values).validate()


@contextlib.contextmanager
def stage(name: str):
    """Re-raise package errors with the failing stage named in the message."""
    try:
        yield
    except TCLevyError as exc:
        raise type(exc)(f"[{name}] {exc}") from exc
    except (ValueError, ArithmeticError) as exc:
        raise NumericalError(f"[{name}] {exc}") from exc


# ---------------------------------------------------------------- params.json

def fit_params(counts1, counts2, returns1, returns2, horizon: int, threshold=None,
               percentile: float = 10.0) -> dict:
    """Stages 1 and 2 on aligned per-bin series; returns the params.json mapping."""
    with stage("fit"):
        data = classify_jumps(counts1, counts2, horizon, threshold, threshold, percentile)
        fit = mle_fit(data)
        log.info("MLE %s loglik=%.6g converged=%s", tuple(fit.params), fit.loglik, fit.converged)
        if fit.degenerate:
            raise NumericalError("degenerate jump data: all jumps identical")
        if not fit.converged:
            raise NumericalError(f"MLE did not converge after {fit.iterations} iterations")
    lam1, lam2, th1, th2, delta = fit.params
    with stage("moments"):
        m1 = mom_fit(returns1, ExpCppParams(lam1, th1), 1.0)
        m2 = mom_fit(returns2, ExpCppParams(lam2, th2), 1.0)
    return {
        "lambda1": float(lam1), "lambda2": float(lam2), "theta1": float(th1), "theta2": float(th2),
        "delta": float(delta), "mu1": m1.mu, "mu2": m2.mu, "sigma2_1": m1.sigma2, "sigma2_2": m2.sigma2,
        "sigma1": math.sqrt(m1.sigma2) if m1.sigma2 >= 0 else None,
        "sigma2": math.sqrt(m2.sigma2) if m2.sigma2 >= 0 else None,
        "loglik": float(fit.loglik), "converged": bool(fit.converged),
        "horizon_bins": int(horizon),
        "n_joint": data.n_joint, "n_solo1": len(data.solo1), "n_solo2": len(data.solo2),
    }


def write_params(path, params: dict) -> None:
    Path(path).write_text(json.dumps(params, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_params(path) -> dict:
    try:
        params = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read params file {path}: {exc}") from None
    missing = [k for k in PARAM_KEYS if k not in params]
    if missing:
        raise ConfigError(f"{path}: missing keys {missing}")
    return params


def model_from_params(params: dict) -> tuple[BivModelParams, int]:
    """Per-bin model from params.json and its horizon in bins."""
    for key in ("sigma2_1", "sigma2_2"):
        if not (params[key] > 0):
            raise NumericalError(f"{key} = {params[key]!r} is not a usable variance")
    model = BivModelParams(
        ExpCppParams(params["lambda1"], params["theta1"]),
        ExpCppParams(params["lambda2"], params["theta2"]),
        ClaytonCopula(params["delta"]),
        params["mu1"], params["mu2"],
        math.sqrt(params["sigma2_1"]), math.sqrt(params["sigma2_2"]),
    )
    return model, int(params.get("horizon_bins", 1))


# ------------------------------------------------------------------ simulation

def write_path_csv(path, t, z, x) -> None:
    cols = (t.grid, t.values1, t.values2, z.values1, z.values2, x.values1, x.values2)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(PATH_HEADER) + "\n")
        for row in zip(*cols):
            fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")


def simulate_replications(model: BivModelParams, horizon: int, seed: int, replications: int,
                          truncation_r=None, workers: int = 1):
    """(T, Z, X) on jump marks and X on the bin grid for seeds seed .. seed+k-1."""
    unit = model.scaled(horizon)
    bin_grid = np.linspace(0.0, 1.0, horizon + 1)

    def one(s):
        t, z, x = simulate_model_paths(unit, truncation_r, s)
        _, _, xb = simulate_model_paths(unit, truncation_r, s, bin_grid)
        return t, z, x, xb

    return replicate(one, [seed + k for k in range(replications)], workers)


def default_surface_grid(panel: IncrementPanel, margin: int, points: int) -> np.ndarray:
    """``points`` levels spread evenly up to the tail mass of positive increments."""
    inc = panel.increments1 if margin == 1 else panel.increments2
    u = tail_transform(panel, margin)[inc > 0]
    if u.size == 0:
        raise DataError(f"margin {margin} has no positive increments for the surface grid")
    top = float(u.max())
    return top * np.arange(1, points + 1) / points


def surface_from_panel(panel: IncrementPanel, points: int):
    g1 = default_surface_grid(panel, 1, points)
    g2 = default_surface_grid(panel, 2, points)
    return g1, g2, copula_surface_grid(panel, g1, g2)


# -------------------------------------------------------------------- pipeline

@dataclass
class PipelineResult:
    output_dir: Path
    files: list
    params: dict


def pipeline_run(config: RunConfig) -> PipelineResult:
    config.validate()
    if config.seed is None:
        raise ConfigError("a seed is required")
    if config.params is None and (config.input1 is None or config.input2 is None):
        raise ConfigError("two input files are required unless params is given")
    out_dir = Path(config.output_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".tclevy-", dir=out_dir.parent))
    try:
        written = _run_into(config, staging)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name in written:
            os.replace(staging / name, out_dir / name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    params = json.loads((out_dir / "params.json").read_text(encoding="utf-8"))
    return PipelineResult(out_dir, [out_dir / n for n in written], params)


def _run_into(config: RunConfig, out: Path) -> list:
    written = []
    stats_rows = {}
    observed = None
    if config.input1 is not None and config.input2 is not None:
        with stage("ingest"):
            s1 = ingest(config.input1, config.bin_minutes, config.day_gap_hours)
            s2 = ingest(config.input2, config.bin_minutes, config.day_gap_hours)
            _, r1, r2, c1, c2 = align(s1, s2)
        observed = (r1, r2, c1, c2)
        cleaning = {
            "input1": dataclasses.asdict(s1.report), "input2": dataclasses.asdict(s2.report),
            "aligned_bins": int(len(r1)),
        }
        (out / "cleaning.json").write_text(json.dumps(cleaning, indent=2, sort_keys=True) + "\n",
                                           encoding="utf-8")
        written.append("cleaning.json")
        with stage("stats"):
            stats_rows.update({
                "returns1": stats_report(r1), "returns2": stats_report(r2),
                "trades1": stats_report(c1), "trades2": stats_report(c2),
            })

    if config.params is not None:
        params = read_params(config.params)
    else:
        r1, r2, c1, c2 = observed
        params = fit_params(c1, c2, r1, r2, len(r1), config.threshold, config.threshold_percentile)
    write_params(out / "params.json", params)
    written.append("params.json")

    with stage("simulate"):
        model, horizon = model_from_params(params)
        results = simulate_replications(model, horizon, config.seed, config.replications,
                                        config.truncation_r, config.workers)
        bin_increments = []
        for k, (t, z, x, xb) in enumerate(results):
            name = f"paths_{k:04d}.csv"
            write_path_csv(out / name, t, z, x)
            written.append(name)
            bin_increments.append((np.diff(xb.values1), np.diff(xb.values2)))

    with stage("surface"):
        panel = IncrementPanel(1.0, np.concatenate([a for a, _ in bin_increments]),
                               np.concatenate([b for _, b in bin_increments]))
        g1, g2, m = surface_from_panel(panel, config.surface_points)
        write_surface_csv(out / "surface.csv", g1, g2, m)
        written.append("surface.csv")
        stats_rows["sim_returns1"] = stats_report(panel.increments1)
        stats_rows["sim_returns2"] = stats_report(panel.increments2)

    write_stats_csv(out / "stats.csv", stats_rows)
    written.append("stats.csv")
    return written
