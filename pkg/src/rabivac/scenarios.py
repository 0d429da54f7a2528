"""Scenario configuration, figure presets, engine runs and CSV/JSON output."""
from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from . import __version__
from .jc import jc_excited_probability
from .model import AtomState, InvalidParameterError, InvalidStateError, ModelParams, evaluate_coefficients, make_atom_state
from .oracle import DEFAULT_NMAX, oracle_excited_population
from .propagator import default_dt, propagate_direct, propagate_factored, time_grid

ENGINES = ("factored", "direct", "jc", "oracle")
TRACE_WARN_TOL = 1e-8

COLUMNS = (
    "t", "g_t", "delta_t", "pe_factored", "pe_direct", "pe_jc", "pe_oracle",
    "l_raw", "m_raw", "gamma_k", "trace_err", "herm_err", "trace_warning",
)

# (omega0 / g, delta / omega0) for every figure regime.
FIGURE_REGIMES = {
    "fig1": (10.0, 0.0),
    "fig2": (20.0, 0.1),
    "fig3": (50.0, 0.1),
    "fig4a": (10.0, 0.2),
    "fig4b": (10.0, 0.6),
    "fig5": (20.0, 0.5),
}


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the offending field."""


@dataclass(frozen=True)
class ScenarioConfig:
    omega0: float
    delta: Optional[float] = None
    omega: Optional[float] = None
    g: float = 1.0
    init: str = "excited"
    rho: Optional[tuple] = None  # (rho11, rho00, Re rho10, Im rho10) for init="custom"
    t_max: float = 6.0
    dt: Optional[float] = None
    engines: tuple = ("factored", "jc")
    n_max: int = DEFAULT_NMAX
    fallback: bool = True
    label: str = "simulate"

    def __post_init__(self):
        if self.omega is not None and not self.omega > 0:
            raise ConfigError(f"omega must be > 0, got {self.omega}")
        if (self.delta is None) == (self.omega is None):
            raise ConfigError("exactly one of delta or omega must be given")
        for name in ("omega0", "g", "t_max"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if not self.t_max > 0:
            raise ConfigError(f"tmax must be > 0, got {self.t_max}")
        if self.dt is not None and not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if not self.engines:
            raise ConfigError("engines must be a nonempty subset of " + ",".join(ENGINES))
        bad = [e for e in self.engines if e not in ENGINES]
        if bad:
            raise ConfigError(f"engines: unknown engine(s) {','.join(bad)}; choose from {','.join(ENGINES)}")
        if self.init not in ("excited", "ground", "custom"):
            raise ConfigError(f"init must be excited, ground or custom, got {self.init!r}")
        if self.init == "custom":
            if self.rho is None:
                raise ConfigError("init=custom requires rho")
            unsupported = [e for e in self.engines if e in ("jc", "oracle")]
            if unsupported:
                raise ConfigError(f"engines: {','.join(unsupported)} support only excited/ground init")
        if self.n_max < 1:
            raise ConfigError(f"nmax must be >= 1, got {self.n_max}")
        try:
            self.params
            self.initial_state
        except (InvalidParameterError, InvalidStateError) as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def params(self) -> ModelParams:
        if self.delta is not None:
            return ModelParams.from_detuning(self.omega0, self.delta, self.g)
        return ModelParams(self.omega0, self.omega, self.g)

    @property
    def initial_state(self) -> AtomState:
        if self.init != "custom":
            return make_atom_state(self.init)
        r11, r00, re10, im10 = self.rho
        c = complex(re10, im10)
        return make_atom_state("custom", [[r11, c], [c.conjugate(), r00]])

    def step(self) -> float:
        return default_dt(self.params) if self.dt is None else self.dt


def figure_configs(number: int, **overrides) -> list[ScenarioConfig]:
    """Preset scenarios for figures 1-5 (g = 1, so t is g t)."""
    engines = overrides.pop("engines", ("factored", "jc", "oracle"))
    if number == 1:
        cfgs = [ScenarioConfig(omega0=10.0, delta=0.0, t_max=6.0, label="fig1")]
    elif number in (2, 3):
        w0 = 20.0 if number == 2 else 50.0
        d = 0.1 * w0
        cfgs = [ScenarioConfig(omega0=w0, delta=d, t_max=25.0 / d, label=f"fig{number}")]
    elif number == 4:
        cfgs = [ScenarioConfig(omega0=10.0, delta=r * 10.0, t_max=12.0, label=f"fig4_delta{r}")
                for r in (0.2, 0.6)]
    elif number == 5:
        cfgs = [ScenarioConfig(omega0=20.0, delta=10.0, init="ground", t_max=6.0, label="fig5")]
    else:
        raise ConfigError(f"figure must be 1..5, got {number}")
    return [replace(c, engines=tuple(engines), **overrides) for c in cfgs]


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    times: np.ndarray
    columns: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def rows(self):
        for i in range(len(self.times)):
            yield {name: (None if self.columns.get(name) is None else self.columns[name][i])
                   for name in COLUMNS}


def _run_engine(engine: str, cfg: ScenarioConfig, times: np.ndarray):
    params, rho0 = cfg.params, cfg.initial_state
    step = float(times[1] - times[0])
    if engine == "factored":
        return propagate_factored(rho0, params, cfg.t_max, dt=step, fallback=cfg.fallback)
    if engine == "direct":
        return propagate_direct(rho0, params, cfg.t_max, dt=step)
    if engine == "jc":
        return jc_excited_probability(params, times, cfg.init).p_excited
    return oracle_excited_population(params, times, cfg.n_max, "full", cfg.init)


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Run every requested engine on one shared grid."""
    params = cfg.params
    times = time_grid(cfg.t_max, cfg.step())
    with ThreadPoolExecutor(max_workers=len(cfg.engines)) as pool:
        futures = {e: pool.submit(_run_engine, e, cfg, times) for e in cfg.engines}
        outputs = {e: f.result() for e, f in futures.items()}

    cols = {
        "t": times,
        "g_t": params.g * times,
        "delta_t": params.delta * times,
        "gamma_k": evaluate_coefficients(params, times).gamma_k,
    }
    meta = {}
    trace_errs, herm_errs = [], []
    for engine in ("factored", "direct"):
        traj = outputs.get(engine)
        if traj is None:
            continue
        cols[f"pe_{engine}"] = traj.pe
        trace_errs.append(traj.trace_error)
        herm_errs.append(traj.hermiticity_error)
        meta[engine] = {k: v for k, v in traj.metadata.items() if k != "backend"}
        if engine == "factored" and traj.maps is not None:
            cols["l_raw"] = np.real(traj.maps.l)
            cols["m_raw"] = np.real(traj.maps.m)
    for engine in ("jc", "oracle"):
        if engine in outputs:
            cols[f"pe_{engine}"] = np.asarray(outputs[engine], dtype=float)
    if trace_errs:
        cols["trace_err"] = np.max(trace_errs, axis=0)
        cols["herm_err"] = np.max(herm_errs, axis=0)
        cols["trace_warning"] = (cols["trace_err"] > TRACE_WARN_TOL).astype(int)
    return ScenarioResult(cfg, times, cols, meta)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % value


def to_csv(result: ScenarioResult) -> str:
    buf = io.StringIO()
    buf.write(",".join(COLUMNS) + "\n")
    for row in result.rows():
        buf.write(",".join(_fmt(row[c]) for c in COLUMNS) + "\n")
    return buf.getvalue()


def _json_value(value):
    if value is None:
        return None
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def to_json(result: ScenarioResult) -> str:
    cfg = asdict(result.config)
    cfg["engines"] = list(cfg["engines"])
    times = result.times
    doc = {
        "metadata": {
            "config": cfg,
            "version": __version__,
            "grid": {"t0": 0.0, "t_max": float(times[-1]), "dt": float(times[1] - times[0]),
                     "samples": len(times)},
            "engines": result.metadata,
        },
        "samples": [{k: _json_value(v) for k, v in row.items()} for row in result.rows()],
    }
    return json.dumps(doc, indent=1) + "\n"
