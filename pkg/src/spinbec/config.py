"""Run configuration: parse and serialize the ``[problem] / [solver] / [output]`` TOML file.

Example::

    [problem]
    preset = "spin2-1d-case2"
    M = 0.5

    [solver]
    retraction = "orthogonal"

    [output]
    dir = "runs/case2"

Any problem key can be given explicitly and then overrides the preset value.
Unknown sections or keys are rejected.
"""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .energy import REGIMES, PotentialSpec
from .errors import ConfigurationError
from .presets import get_preset
from .solver.config import SolverConfig
from .solver.problem import GroundStateProblem
from .spectral_grid import Grid
from .spin_model import InteractionParams

PROBLEM_KEYS = ("preset", "F", "bounds", "n", "M", "beta", "p", "q", "harmonic",
                "lattice_amplitude", "lattice_period", "regime", "seed")
OUTPUT_KEYS = ("dir", "plane")
SOLVER_KEYS = tuple(f.name for f in fields(SolverConfig))


@dataclass
class RunConfig:
    F: int
    bounds: tuple
    n: tuple
    M: float
    beta: tuple
    potential: PotentialSpec
    p: float = 0.0
    q: float = 0.0
    regime: str = "auto"
    seed: int = 42
    solver: SolverConfig = field(default_factory=SolverConfig)
    out_dir: str = "out"
    plane: bool = False
    preset: Optional[str] = None

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def grid(self) -> Grid:
        return Grid(self.bounds, self.n)

    @property
    def params(self) -> InteractionParams:
        b = tuple(self.beta) + (0.0,) * (4 - len(self.beta))
        return InteractionParams(*b, p=self.p, q=self.q, M=self.M)

    def validate(self) -> "RunConfig":
        if self.F not in (1, 2, 3):
            raise ConfigurationError(f"F must be 1, 2 or 3, got {self.F!r}")
        if len(self.beta) != self.F + 1:
            raise ConfigurationError(f"beta needs {self.F + 1} entries for F={self.F}, got {len(self.beta)}")
        grid = self.grid
        for name in ("harmonic", "amplitude", "period"):
            if len(getattr(self.potential, name)) != grid.d:
                raise ConfigurationError(f"potential {name} needs {grid.d} entries")
        if self.regime not in REGIMES:
            raise ConfigurationError(f"regime must be one of {REGIMES}, got {self.regime!r}")
        self.params.validate(self.F)
        self.solver.validate()
        return self

    def problem(self) -> GroundStateProblem:
        return GroundStateProblem(self.F, self.grid, self.params, self.potential,
                                  self.regime, self.seed)

    def with_magnetization(self, M: float) -> "RunConfig":
        return replace(self, M=float(M)).validate()


def _as_float(key, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigurationError(f"{key} must be a number, got {v!r}")
    return float(v)


def _as_int(key, v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigurationError(f"{key} must be an integer, got {v!r}")
    return v


def _float_list(key, v):
    if not isinstance(v, list):
        raise ConfigurationError(f"{key} must be a list of numbers")
    return tuple(_as_float(key, x) for x in v)


def _per_axis(key, v, d):
    """A scalar applies to every axis; a list must have one entry per axis."""
    vals = _float_list(key, list(v)) if isinstance(v, (list, tuple)) else (_as_float(key, v),) * d
    if len(vals) != d:
        raise ConfigurationError(f"{key} needs {d} entries, got {len(vals)}")
    return vals


def _check_keys(section, table, allowed):
    if not isinstance(table, dict):
        raise ConfigurationError(f"[{section}] must be a table")
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise ConfigurationError(f"unknown key(s) in [{section}]: {', '.join(unknown)}")


def config_from_dict(data: dict) -> RunConfig:
    _check_keys("top level", data, ("problem", "solver", "output"))
    prob = data.get("problem")
    if prob is None:
        raise ConfigurationError("missing [problem] section")
    _check_keys("problem", prob, PROBLEM_KEYS)
    solver = data.get("solver", {})
    _check_keys("solver", solver, SOLVER_KEYS)
    output = data.get("output", {})
    _check_keys("output", output, OUTPUT_KEYS)

    base = {}
    if "preset" in prob:
        pre = get_preset(prob["preset"])
        base = dict(F=pre.F, bounds=pre.bounds, n=pre.n, beta=pre.betas,
                    harmonic=pre.potential.harmonic, lattice_amplitude=pre.potential.amplitude,
                    lattice_period=pre.potential.period)

    def get(key):
        if key in prob:
            return prob[key]
        if key in base:
            return base[key]
        raise ConfigurationError(f"missing required key '{key}' in [problem]")

    F = _as_int("F", get("F"))
    raw_bounds = get("bounds")
    if "bounds" in prob:
        if not isinstance(raw_bounds, list) or not all(isinstance(b, list) and len(b) == 2 for b in raw_bounds):
            raise ConfigurationError("bounds must be a list of [a, b] pairs")
        bounds = tuple((_as_float("bounds", a), _as_float("bounds", b)) for a, b in raw_bounds)
    else:
        bounds = tuple(raw_bounds)
    d = len(bounds)
    raw_n = get("n")
    if isinstance(raw_n, (list, tuple)):
        n = tuple(_as_int("n", k) for k in raw_n)
    else:
        n = (_as_int("n", raw_n),) * d
    if len(n) != d:
        raise ConfigurationError(f"n needs {d} entries, got {len(n)}")
    beta = _float_list("beta", list(get("beta")))
    pot = PotentialSpec(_per_axis("harmonic", prob.get("harmonic", base.get("harmonic", [1.0] * d)), d),
                        _per_axis("lattice_amplitude", prob.get("lattice_amplitude", base.get("lattice_amplitude", [0.0] * d)), d),
                        _per_axis("lattice_period", prob.get("lattice_period", base.get("lattice_period", [0.0] * d)), d))
    regime = prob.get("regime", "auto")
    if not isinstance(regime, str):
        raise ConfigurationError("regime must be a string")

    overrides = {}
    defaults = SolverConfig()
    for key, v in solver.items():
        ref = getattr(defaults, key)
        if isinstance(ref, str):
            if not isinstance(v, str):
                raise ConfigurationError(f"solver.{key} must be a string")
            overrides[key] = v
        elif isinstance(ref, int):
            overrides[key] = _as_int(f"solver.{key}", v)
        else:
            overrides[key] = _as_float(f"solver.{key}", v)
    out_dir = output.get("dir", "out")
    plane = output.get("plane", False)
    if not isinstance(out_dir, str) or not isinstance(plane, bool):
        raise ConfigurationError("output.dir must be a string and output.plane a boolean")

    cfg = RunConfig(F=F, bounds=bounds, n=n, M=_as_float("M", get("M")), beta=beta,
                    potential=pot, p=_as_float("p", prob.get("p", 0.0)),
                    q=_as_float("q", prob.get("q", 0.0)), regime=regime,
                    seed=_as_int("seed", prob.get("seed", 42)),
                    solver=defaults.replace(**overrides), out_dir=out_dir, plane=plane,
                    preset=prob.get("preset"))
    return cfg.validate()


def parse_config(text: str) -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise ConfigurationError(f"config is not valid TOML: {err}") from None
    return config_from_dict(data)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def serialize_config(cfg: RunConfig) -> str:
    """TOML text that :func:`parse_config` maps back to an equal :class:`RunConfig`."""
    prob = {}
    if cfg.preset is not None:
        prob["preset"] = cfg.preset
    prob.update(F=cfg.F, bounds=[list(b) for b in cfg.bounds], n=list(cfg.n), M=cfg.M,
                beta=list(cfg.beta), p=cfg.p, q=cfg.q, harmonic=list(cfg.potential.harmonic),
                lattice_amplitude=list(cfg.potential.amplitude),
                lattice_period=list(cfg.potential.period), regime=cfg.regime, seed=cfg.seed)
    lines = ["[problem]"]
    lines += [f"{k} = {_toml_value(v)}" for k, v in prob.items()]
    lines += ["", "[solver]"]
    lines += [f"{k} = {_toml_value(v)}" for k, v in asdict(cfg.solver).items()]
    lines += ["", "[output]", f"dir = {_toml_value(cfg.out_dir)}", f"plane = {_toml_value(cfg.plane)}"]
    return "\n".join(lines) + "\n"
