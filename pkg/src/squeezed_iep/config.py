"""Run configuration: flat ``key = value`` files, overrides and sweep grids."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .qmat2 import NAMED_STATES

CHANNELS = ("dissipation", "dephasing")

# model parameters per channel, keyed by their config spelling
MODEL_KEYS = {
    "dissipation": ("omega0", "gamma", "T", "s", "phi"),
    "dephasing": ("omega0", "eta", "T", "s", "dphi", "cutoff"),
}
ALIASES = {"temp": "T", "delta_phi": "dphi", "epsilon": "epsilon_eq"}
RUN_KEYS = ("channel", "initial", "t_max", "n_samples", "sweep", "mode", "epsilon_eq", "output", "format", "jobs")
MAX_SWEEP_DIMS = 2

_PI_EXPR = re.compile(r"^([-+])?\s*((?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?$")
_LINSPACE = re.compile(r"^linspace\(([^,]+),([^,]+),([^,]+)\)$")


def parse_float(key: str, text: str) -> float:
    """Parse a float, also accepting ``pi``, ``pi/4``, ``2*pi`` style values."""
    t = text.strip()
    m = _PI_EXPR.match(t)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        k = float(m.group(2)) if m.group(2) else 1.0
        d = float(m.group(3)) if m.group(3) else 1.0
        val = sign * k * math.pi / d
    else:
        try:
            val = float(t)
        except ValueError:
            raise ConfigError(key, f"not a number: {text!r}") from None
    if not math.isfinite(val):
        raise ConfigError(key, f"value must be finite, got {text!r}")
    return val


def parse_kv_lines(text: str, origin: str = "config") -> dict[str, str]:
    """Parse flat ``key = value`` text; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{n}", f"expected 'key = value', got {raw.strip()!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def load_config_file(path: str | Path) -> dict[str, str]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {p}: {exc.strerror}") from None
    return parse_kv_lines(text, origin=str(p))


def parse_assignment(item: str) -> tuple[str, str]:
    if "=" not in item:
        raise ConfigError(item, "expected key=value")
    k, v = item.split("=", 1)
    return k.strip(), v.strip()


def _parse_sweep_values(key: str, text: str) -> list[float]:
    t = text.strip()
    m = _LINSPACE.match(t.replace(" ", ""))
    if m:
        start, stop = parse_float(key, m.group(1)), parse_float(key, m.group(2))
        try:
            num = int(m.group(3))
        except ValueError:
            raise ConfigError(key, f"linspace count must be an integer, got {m.group(3)!r}") from None
        if num < 1:
            raise ConfigError(key, "linspace count must be positive")
        return [float(v) for v in np.linspace(start, stop, num)]
    values = [parse_float(key, v) for v in t.split(",") if v.strip()]
    if not values:
        raise ConfigError(key, "sweep needs at least one value")
    return values


@dataclass(frozen=True)
class RunConfig:
    channel: str = "dissipation"
    params: dict[str, float] = field(default_factory=dict)
    initial: str | tuple[float, float, float] = "plus"
    t_max: float | None = None
    n_samples: int = 1000
    sweep: tuple[tuple[str, tuple[float, ...]], ...] = ()
    mode: str = "closed"
    epsilon_eq: float = 0.01
    output: str = "-"
    format: str = "csv"
    jobs: int | None = None


def build_config(raw: dict[str, str]) -> RunConfig:
    """Validate merged raw settings into a :class:`RunConfig`.

    Raises:
        ConfigError: naming the first offending key.
    """
    raw = {ALIASES.get(k, k): v for k, v in raw.items()}
    channel = raw.get("channel", "dissipation")
    if channel not in CHANNELS:
        raise ConfigError("channel", f"must be one of {CHANNELS}, got {channel!r}")
    model_keys = MODEL_KEYS[channel]
    for k in raw:
        if k not in RUN_KEYS and k not in model_keys:
            other = [c for c in CHANNELS if k in MODEL_KEYS[c]]
            hint = f" (only valid for channel={other[0]})" if other else ""
            raise ConfigError(k, f"unknown key{hint}")

    params = {k: parse_float(k, raw[k]) for k in model_keys if k in raw}

    initial: str | tuple[float, float, float] = raw.get("initial", "plus")
    if initial not in NAMED_STATES:
        parts = initial.split(",")
        if len(parts) != 3:
            raise ConfigError("initial", f"expected one of {sorted(NAMED_STATES)} or 'x,y,z', got {initial!r}")
        vec = tuple(parse_float("initial", v) for v in parts)
        if math.sqrt(sum(v * v for v in vec)) > 1.0 + 1e-12:
            raise ConfigError("initial", "Bloch vector norm exceeds 1")
        initial = vec

    t_max = None
    if raw.get("t_max", "auto") != "auto":
        t_max = parse_float("t_max", raw["t_max"])
        if not t_max > 0:
            raise ConfigError("t_max", "must be positive")

    try:
        n_samples = int(raw.get("n_samples", "1000"))
    except ValueError:
        raise ConfigError("n_samples", f"not an integer: {raw['n_samples']!r}") from None
    if n_samples < 2:
        raise ConfigError("n_samples", "must be at least 2")

    sweep: list[tuple[str, tuple[float, ...]]] = []
    if raw.get("sweep", "").strip():
        for part in raw["sweep"].split(";"):
            if not part.strip():
                continue
            if ":" not in part:
                raise ConfigError("sweep", f"expected 'name:v1,v2,...', got {part!r}")
            name, values = part.split(":", 1)
            name = ALIASES.get(name.strip(), name.strip())
            if name not in model_keys:
                raise ConfigError("sweep", f"{name!r} is not a {channel} parameter")
            if any(name == n for n, _ in sweep):
                raise ConfigError("sweep", f"{name!r} swept twice")
            sweep.append((name, tuple(_parse_sweep_values("sweep", values))))
        if len(sweep) > MAX_SWEEP_DIMS:
            raise ConfigError("sweep", f"at most {MAX_SWEEP_DIMS} sweep dimensions are supported")

    mode = raw.get("mode", "closed")
    if mode not in ("closed", "integral"):
        raise ConfigError("mode", f"must be 'closed' or 'integral', got {mode!r}")
    if mode == "integral" and channel != "dephasing":
        raise ConfigError("mode", "integral mode only applies to the dephasing channel")

    epsilon_eq = parse_float("epsilon_eq", raw.get("epsilon_eq", "0.01"))
    if not 0 < epsilon_eq < 1:
        raise ConfigError("epsilon_eq", "must lie in (0, 1)")

    fmt = raw.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format", f"must be 'csv' or 'json', got {fmt!r}")

    jobs = None
    if "jobs" in raw:
        try:
            jobs = int(raw["jobs"])
        except ValueError:
            raise ConfigError("jobs", f"not an integer: {raw['jobs']!r}") from None
        if jobs < 1:
            raise ConfigError("jobs", "must be at least 1")

    return RunConfig(
        channel=channel,
        params=params,
        initial=initial,
        t_max=t_max,
        n_samples=n_samples,
        sweep=tuple(sweep),
        mode=mode,
        epsilon_eq=epsilon_eq,
        output=raw.get("output", "-"),
        format=fmt,
        jobs=jobs,
    )


def sweep_grid(config: RunConfig) -> list[dict[str, float]]:
    """Resolved model parameters for every sweep point.

    Cartesian product in declaration order, first dimension outermost.
    """
    if len(config.sweep) > MAX_SWEEP_DIMS:
        raise ConfigError("sweep", f"at most {MAX_SWEEP_DIMS} sweep dimensions are supported")
    if not config.sweep:
        return [dict(config.params)]
    names = [name for name, _ in config.sweep]
    points = []
    for combo in itertools.product(*(values for _, values in config.sweep)):
        point = dict(config.params)
        point.update(zip(names, combo))
        points.append(point)
    return points
