"""Per-point computation and artifact emission for the command line."""

from __future__ import annotations

import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dephasing, dissipation
from .config import MODEL_KEYS, RunConfig, sweep_grid
from .errors import ConfigError, ContractViolation, NumericalFailure
from .qmat2 import DensityMatrix, from_bloch, named_state
from .report import IrrevReport, build_report

CSV_HEADER = "t,s_ir,lb,ub,gap,dev_l,dev_u,heat,s_re,s_tot,bloch_x,bloch_y,bloch_z,gamma"
SIG_DIGITS = 12
RELAXATION_TIMES = 10.0

# config spelling -> dataclass field
_FIELD = {"T": "temp"}


def fmt(v) -> str:
    """12 significant digits; empty for missing values."""
    if v is None:
        return ""
    v = float(v)
    if v == 0.0:
        return "0"
    return f"{v:.{SIG_DIGITS}g}"


def round_sig(v):
    if v is None:
        return None
    return float(fmt(v))


def make_params(channel: str, point: dict[str, float]):
    kwargs = {_FIELD.get(k, k): v for k, v in point.items()}
    try:
        if channel == "dissipation":
            return dissipation.DissipationParams(**kwargs)
        return dephasing.DephasingParams(**kwargs)
    except ContractViolation as exc:
        field, rest = str(exc).split(" ", 1)
        key = {v: k for k, v in _FIELD.items()}.get(field, field)
        raise ConfigError(key, rest) from None


def describe_point(point: dict[str, float]) -> str:
    if not point:
        return "point (defaults)"
    return "point (" + ", ".join(f"{k}={v:g}" for k, v in point.items()) + ")"


def resolved_params(channel: str, params) -> dict[str, float]:
    """All model parameters of a point, spelled as config keys."""
    return {k: float(getattr(params, _FIELD.get(k, k))) for k in MODEL_KEYS[channel]}


def initial_state(config: RunConfig) -> DensityMatrix:
    if isinstance(config.initial, str):
        return named_state(config.initial)
    return from_bloch(config.initial)


def relaxation_rate(channel: str, params, rho0: DensityMatrix) -> float:
    if channel == "dissipation":
        return dissipation.relaxation_rate(params, rho0)
    return dephasing.relaxation_rate(params)


def auto_t_max(channel: str, params, rho0: DensityMatrix) -> float:
    return RELAXATION_TIMES / relaxation_rate(channel, params, rho0)


def time_grid(t_max: float, n_samples: int) -> np.ndarray:
    return np.linspace(0.0, t_max, n_samples)


@dataclass(frozen=True)
class PointResult:
    index: int
    params: dict[str, float]
    t_max: float
    csv: str
    summary: dict
    times: np.ndarray
    s_ir: np.ndarray


def compute_report(config: RunConfig, params, rho0: DensityMatrix, t: np.ndarray) -> IrrevReport:
    if config.channel == "dissipation":
        traj = dissipation.evolve(params, rho0, t)
    else:
        traj = dephasing.evolve(params, rho0, t, mode=config.mode)
    return build_report(traj, rho0, params.omega0, params.temp, config.epsilon_eq)


def report_csv(rep: IrrevReport) -> str:
    cols = [rep.times, rep.s_ir, rep.lb, rep.ub, rep.gap, rep.dev_l, rep.dev_u, rep.heat, rep.s_re, rep.s_tot]
    bloch = rep.bloch
    lines = [CSV_HEADER]
    for i in range(len(rep.times)):
        row = [fmt(c[i]) for c in cols]
        row += [fmt(bloch[i, 0]), fmt(bloch[i, 1]), fmt(bloch[i, 2])]
        row.append("" if rep.gamma is None else fmt(rep.gamma[i]))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def point_summary(rep: IrrevReport, params: dict[str, float], t_max: float) -> dict:
    return {
        "params": {k: round_sig(v) for k, v in params.items()},
        "t_max": round_sig(t_max),
        "epsilon": round_sig(rep.epsilon),
        "t_eq_iep": round_sig(rep.t_eq_iep),
        "t_eq_lb": round_sig(rep.t_eq_lb),
        "t_eq_ub": round_sig(rep.t_eq_ub),
        "asymptotics": {k: round_sig(v) for k, v in rep.asymptotics().items()},
    }


def compute_point(config: RunConfig, index: int, point: dict[str, float]) -> PointResult:
    """Evolve and report one resolved parameter point; pure and picklable."""
    params = make_params(config.channel, point)
    rho0 = initial_state(config)
    t_max = config.t_max if config.t_max is not None else auto_t_max(config.channel, params, rho0)
    rep = compute_report(config, params, rho0, time_grid(t_max, config.n_samples))
    resolved = resolved_params(config.channel, params)
    return PointResult(
        index=index,
        params=resolved,
        t_max=t_max,
        csv=report_csv(rep),
        summary=point_summary(rep, resolved, t_max),
        times=rep.times,
        s_ir=rep.s_ir,
    )


def _worker(args):
    config, index, point = args
    try:
        return "ok", compute_point(config, index, point)
    except NumericalFailure as exc:
        return "numerical", (index, point, str(exc))


def map_points(fn, tasks: list, jobs: int | None):
    """Run ``fn`` over ``tasks`` in order, on a process pool when it pays off."""
    jobs = jobs or os.cpu_count() or 1
    if jobs == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def compute_all(config: RunConfig) -> list[PointResult]:
    """All sweep points in sweep order.

    Raises:
        NumericalFailure: naming the first failing parameter point.
    """
    points = sweep_grid(config)
    # resolve parameters up front so bad values surface as config errors
    for p in points:
        make_params(config.channel, p)
    tasks = [(config, i, p) for i, p in enumerate(points)]
    results = []
    for status, payload in map_points(_worker, tasks, config.jobs):
        if status != "ok":
            index, point, msg = payload
            raise NumericalFailure(f"{describe_point(point)} [index {index}]: {msg}")
        results.append(payload)
    return results


def csv_name(config: RunConfig, index: int) -> str:
    return f"{config.channel}_{index:03d}.csv"


def summary_json(config: RunConfig, results: list[PointResult]) -> str:
    doc = {
        "channel": config.channel,
        "mode": config.mode if config.channel == "dephasing" else None,
        "initial": config.initial if isinstance(config.initial, str) else [round_sig(v) for v in config.initial],
        "n_samples": config.n_samples,
        "sweep": [{"name": n, "values": [round_sig(v) for v in vals]} for n, vals in config.sweep],
        "points": [dict(csv=csv_name(config, r.index), **r.summary) for r in results],
    }
    return json.dumps(doc, indent=2) + "\n"


def combined_csv(config: RunConfig, results: list[PointResult]) -> str:
    """Long format ``t,<sweep params>,s_ir`` for heat-map plotting."""
    names = [n for n, _ in config.sweep]
    lines = [",".join(["t", *names, "s_ir"])]
    for r in results:
        prefix = [fmt(r.params[n]) for n in names]
        for t, v in zip(r.times, r.s_ir):
            lines.append(",".join([fmt(t), *prefix, fmt(v)]))
    return "\n".join(lines) + "\n"


def stdout_csv(config: RunConfig, results: list[PointResult]) -> str:
    """Single point: the plain CSV. Sweeps: every point, prefixed by its sweep parameters."""
    if not config.sweep:
        return results[0].csv
    names = [n for n, _ in config.sweep]
    lines = [",".join([*names, CSV_HEADER])]
    for r in results:
        prefix = ",".join(fmt(r.params[n]) for n in names)
        lines += [f"{prefix},{row}" for row in r.csv.splitlines()[1:]]
    return "\n".join(lines) + "\n"


def write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def emit(config: RunConfig, results: list[PointResult]) -> list[Path]:
    """Write artifacts from the coordinating process; returns the files written."""
    if config.output == "-":
        text = summary_json(config, results) if config.format == "json" else stdout_csv(config, results)
        sys.stdout.write(text)
        sys.stdout.flush()
        return []
    out = Path(config.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError("output", f"cannot create {out}: {exc.strerror}") from None
    written = []
    for r in results:
        written.append(out / csv_name(config, r.index))
        write_text(written[-1], r.csv)
    written.append(out / "summary.json")
    write_text(written[-1], summary_json(config, results))
    if config.sweep:
        written.append(out / "combined.csv")
        write_text(written[-1], combined_csv(config, results))
    return written


COMPARE_HEADER = "t,gamma_closed,gamma_integral,rel_err_ln_gamma"


def compare_modes_csv(params: dephasing.DephasingParams, t: np.ndarray) -> str:
    """Closed-form and quadrature decoherence factors with the relative error on ``ln Gamma``."""
    lines = [COMPARE_HEADER]
    kappa = dephasing.decay_rate(params)
    for ti in t:
        ln_closed = -kappa * float(ti)
        ln_int = -dephasing.exponent_integral(params, float(ti))[0]
        rel = abs(ln_int - ln_closed) / abs(ln_closed) if ln_closed != 0.0 else None
        lines.append(",".join([fmt(ti), fmt(math.exp(ln_closed)), fmt(math.exp(ln_int)), fmt(rel)]))
    return "\n".join(lines) + "\n"
