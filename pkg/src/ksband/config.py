"""Run configuration: dataclasses, TOML parsing with strict validation, serialization."""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .field import Grid
from .symbols import FAMILIES, SymbolSpec


@dataclass
class GridConfig:
    d: int = 1
    n: int = 256
    L: float = 2 * math.pi


@dataclass
class SymbolConfig:
    family: str = "KuramotoSivashinsky1D"
    params: dict = field(default_factory=dict)


@dataclass
class IntegratorConfig:
    h: float = 0.01
    T: float = 10.0
    record_every: int = 10
    seed: int = 0
    amplitude: float = 1.0
    mean: float = 0.0
    contour_points: int = 32


@dataclass
class DiagnosticsConfig:
    s_max: float = 0.0  # 0 selects the largest s that stays clear of the truncation
    s_count: int = 41
    fit_s_min: float = 1.0
    fit_s_max: float = 0.0  # 0 means s_max
    weight: float = 3.0
    window_fraction: float = 0.5
    k_min: int = 0  # 0 selects half of the highest resolved shell


@dataclass
class OutputConfig:
    directory: str = "runs/default"
    checkpoint_every: int = 0  # steps; 0 writes only initial and final checkpoints
    formats: list = field(default_factory=lambda: ["csv", "json"])


@dataclass
class SweepConfig:
    gammas: list = field(default_factory=lambda: [1.1, 1.5, 2.0, 3.0, 4.0])
    mu_tilde: float = 2.0


@dataclass
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    symbol: SymbolConfig = field(default_factory=SymbolConfig)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def make_grid(self) -> Grid:
        return Grid(self.grid.d, self.grid.n, self.grid.L)

    def make_symbol(self) -> SymbolSpec:
        return SymbolSpec(self.symbol.family, dict(self.symbol.params), 2 * math.pi / self.grid.L)

    def replace(self, **sections) -> RunConfig:
        """Copy with some sections' fields overridden, e.g. ``replace(integrator={"T": 0})``."""
        out = parse_config(serialize_config(self))
        for name, updates in sections.items():
            setattr(out, name, dataclasses.replace(getattr(out, name), **updates))
        validate(out)
        return out


SECTIONS = {
    "grid": GridConfig,
    "symbol": SymbolConfig,
    "integrator": IntegratorConfig,
    "diagnostics": DiagnosticsConfig,
    "output": OutputConfig,
    "sweep": SweepConfig,
}

_INT_FIELDS = {"d", "n", "record_every", "seed", "contour_points", "s_count", "k_min", "checkpoint_every"}


def _coerce(section, name, value, problems):
    if name in ("family", "directory"):
        if not isinstance(value, str):
            problems.append(f"{section}.{name}: expected a string")
        return value
    if name == "formats":
        if not (isinstance(value, list) and all(v in ("csv", "json") for v in value)):
            problems.append(f"{section}.formats: expected a list drawn from ['csv', 'json']")
        return list(value) if isinstance(value, list) else value
    if name == "gammas":
        if not (isinstance(value, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
            problems.append(f"{section}.gammas: expected a list of numbers")
            return value
        return [float(v) for v in value]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        problems.append(f"{section}.{name}: expected a number, got {value!r}")
        return value
    if name in _INT_FIELDS:
        if isinstance(value, float) and not value.is_integer():
            problems.append(f"{section}.{name}: expected an integer, got {value!r}")
            return value
        return int(value)
    return float(value)


def parse_config(text: str) -> RunConfig:
    """Parse TOML text into a validated :class:`RunConfig`.

    Unknown sections and keys are errors; all problems are reported together.
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    problems = []
    cfg = RunConfig()
    for section, body in raw.items():
        if section not in SECTIONS:
            problems.append(f"unknown section [{section}]")
            continue
        if not isinstance(body, dict):
            problems.append(f"[{section}] must be a table")
            continue
        target = getattr(cfg, section)
        names = {f.name for f in dataclasses.fields(target)}
        for key, value in body.items():
            if key not in names:
                problems.append(f"unknown key {section}.{key}")
            elif key == "params":
                if not isinstance(value, dict):
                    problems.append("symbol.params must be a table")
                else:
                    bad = [k for k, v in value.items() if isinstance(v, bool) or not isinstance(v, (int, float))]
                    problems += [f"symbol.params.{k}: expected a number" for k in bad]
                    target.params = {k: float(v) for k, v in value.items() if k not in bad}
            else:
                before = len(problems)
                value = _coerce(section, key, value, problems)
                if len(problems) == before:  # badly typed values keep the default
                    setattr(target, key, value)
    try:
        validate(cfg)
    except ConfigError as exc:
        problems += exc.problems
    if problems:
        raise ConfigError("; ".join(problems), problems)
    return cfg


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def validate(cfg: RunConfig) -> None:
    problems = []

    def need(ok, msg):
        if not ok:
            problems.append(msg)

    g = cfg.grid
    need(g.d in (1, 2), f"grid.d must be 1 or 2, got {g.d}")
    need(g.n >= 8 and not g.n & (g.n - 1), f"grid.n must be a power of two >= 8, got {g.n}")
    need(math.isfinite(g.L) and g.L > 0, f"grid.L must be positive and finite, got {g.L}")
    fam = cfg.symbol.family
    if fam not in FAMILIES:
        problems.append(f"symbol.family: unknown family {fam!r}; known: {sorted(FAMILIES)}")
    else:
        need(g.d in FAMILIES[fam][0], f"symbol.family {fam} needs grid.d in {FAMILIES[fam][0]}, got {g.d}")
        unknown = set(cfg.symbol.params) - set(FAMILIES[fam][1])
        need(not unknown, f"symbol.params: unknown parameters {sorted(unknown)} for {fam}")
        if not unknown:
            try:
                SymbolSpec(fam, dict(cfg.symbol.params))
            except ConfigError as exc:
                problems += [f"symbol.params: {p}" for p in exc.problems]
    it = cfg.integrator
    need(math.isfinite(it.h) and it.h > 0, f"integrator.h must be > 0 and finite, got {it.h}")
    need(math.isfinite(it.T) and it.T >= 0, f"integrator.T must be >= 0 and finite, got {it.T}")
    need(it.record_every >= 1, f"integrator.record_every must be >= 1, got {it.record_every}")
    need(it.seed >= 0, f"integrator.seed must be >= 0, got {it.seed}")
    need(math.isfinite(it.amplitude) and it.amplitude >= 0, f"integrator.amplitude must be >= 0, got {it.amplitude}")
    need(math.isfinite(it.mean), "integrator.mean must be finite")
    need(it.contour_points >= 8, f"integrator.contour_points must be >= 8, got {it.contour_points}")
    dg = cfg.diagnostics
    need(0 < dg.window_fraction <= 1, f"diagnostics.window_fraction must be in (0, 1], got {dg.window_fraction}")
    need(math.isfinite(dg.s_max) and dg.s_max >= 0, f"diagnostics.s_max must be >= 0, got {dg.s_max}")
    need(dg.s_count >= 2, f"diagnostics.s_count must be >= 2, got {dg.s_count}")
    need(math.isfinite(dg.fit_s_min) and dg.fit_s_min >= 0, "diagnostics.fit_s_min must be >= 0")
    need(math.isfinite(dg.fit_s_max) and dg.fit_s_max >= 0, "diagnostics.fit_s_max must be >= 0")
    need(math.isfinite(dg.weight) and dg.weight >= 0, f"diagnostics.weight must be >= 0, got {dg.weight}")
    need(dg.k_min >= 0, f"diagnostics.k_min must be >= 0, got {dg.k_min}")
    need(cfg.output.checkpoint_every >= 0, "output.checkpoint_every must be >= 0")
    need(all(math.isfinite(v) and v > 0 for v in cfg.sweep.gammas), "sweep.gammas must be positive")
    need(math.isfinite(cfg.sweep.mu_tilde) and cfg.sweep.mu_tilde >= 0, "sweep.mu_tilde must be >= 0")
    if problems:
        raise ConfigError("; ".join(problems), problems)


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v) or math.isnan(v):
            raise ConfigError(f"cannot serialize non-finite value {v}")
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, list):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise ConfigError(f"cannot serialize {v!r}")


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for section in SECTIONS:
        obj = getattr(cfg, section)
        lines.append(f"[{section}]")
        nested = []
        for f in dataclasses.fields(obj):
            v = getattr(obj, f.name)
            if isinstance(v, dict):
                nested.append((f.name, v))
            else:
                lines.append(f"{f.name} = {_toml_value(v)}")
        for name, table in nested:
            lines.append(f"[{section}.{name}]")
            lines += [f"{k} = {_toml_value(float(table[k]))}" for k in sorted(table)]
        lines.append("")
    return "\n".join(lines)


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()
