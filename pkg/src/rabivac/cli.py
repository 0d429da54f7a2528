"""Command-line front end: ``rabivac simulate|figure|check|sweep``.

Frequencies are in units of the coupling (``--g`` defaults to 1), so
``--tmax 6`` means g t = 6. Exit codes: 0 success, 1 runtime or check
failure, 2 usage error. ``RABI_LOG`` sets the log level.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
from pathlib import Path

from .analysis import counter_rotating_window, envelope_check, find_extrema
from .checks import SUITES, run_suite
from .oracle import DEFAULT_NMAX
from .propagator import RiccatiDivergence, propagate_factored
from .scenarios import ConfigError, ScenarioConfig, figure_configs, run_scenario, to_csv, to_json

logger = logging.getLogger("rabivac")

# Keys accepted in a --config file (key=value lines); flags override them.
CONFIG_KEYS = ("omega0", "omega", "delta", "g", "init", "rho", "tmax", "dt", "engines", "nmax", "format", "out")


class UsageError(Exception):
    pass


def _add_output_flags(p):
    p.add_argument("--format", choices=("csv", "json"), default=None, help="output format (default csv)")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def _add_run_flags(p):
    p.add_argument("--dt", type=float, default=None, help="RK4 step (default: 400 steps per fastest period)")
    p.add_argument("--engines", default=None, help="comma-separated subset of factored,direct,jc,oracle")
    p.add_argument("--nmax", type=int, default=None, help=f"Fock truncation for the oracle (default {DEFAULT_NMAX})")
    p.add_argument("--no-fallback", action="store_true",
                   help="fail instead of switching to direct integration on Riccati blow-up")
    p.add_argument("--seed-free", action="store_true", help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rabivac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run engines for one parameter set")
    sim.add_argument("--config", default=None, help="key=value file; flags override it")
    sim.add_argument("--omega0", type=float, default=None)
    sim.add_argument("--omega", type=float, default=None)
    sim.add_argument("--delta", type=float, default=None)
    sim.add_argument("--g", type=float, default=None)
    sim.add_argument("--init", choices=("excited", "ground", "custom"), default=None)
    sim.add_argument("--rho", default=None, help="rho11,rho00,Re rho10,Im rho10 for --init custom")
    sim.add_argument("--tmax", type=float, default=None)
    _add_run_flags(sim)
    _add_output_flags(sim)

    fig = sub.add_parser("figure", help="figure presets 1-5")
    fig.add_argument("number", type=int, choices=range(1, 6))
    _add_run_flags(fig)
    _add_output_flags(fig)

    chk = sub.add_parser("check", help="run invariant / oracle / claim checks")
    chk.add_argument("suite", choices=SUITES)
    chk.add_argument("--nmax", type=int, default=DEFAULT_NMAX)

    sw = sub.add_parser("sweep", help="summary rows over a grid of delta/omega0 and g/omega0")
    sw.add_argument("--delta-ratios", default="0,0.1,0.2,0.5", help="comma-separated delta/omega0")
    sw.add_argument("--coupling-ratios", default="0.02,0.05,0.1", help="comma-separated g/omega0")
    sw.add_argument("--init", choices=("excited", "ground"), default="excited")
    sw.add_argument("--tmax", type=float, default=6.0, help="g t horizon")
    sw.add_argument("--dt", type=float, default=None)
    sw.add_argument("--seed-free", action="store_true", help=argparse.SUPPRESS)
    _add_output_flags(sw)
    return parser


def read_config_file(path) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _floats(text: str, name: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated numbers, got {text!r}") from None


def _engines(text):
    if text is None:
        return None
    return tuple(e.strip() for e in text.split(",") if e.strip())


def _simulate_config(args) -> ScenarioConfig:
    merged = read_config_file(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag

    def num(key, default=None):
        value = merged.get(key, default)
        if value is None:
            return None
        try:
            return float(value)
        except ValueError:
            raise UsageError(f"{key}: expected a number, got {value!r}") from None

    if num("omega0") is None:
        raise UsageError("omega0 is required")
    rho = None
    if merged.get("rho") is not None:
        rho = tuple(_floats(str(merged["rho"]), "rho"))
        if len(rho) != 4:
            raise UsageError("rho: expected rho11,rho00,Re rho10,Im rho10")
    args.format = merged.get("format", args.format)
    args.out = merged.get("out", args.out)
    return ScenarioConfig(
        omega0=num("omega0"), delta=num("delta"), omega=num("omega"), g=num("g", 1.0),
        init=merged.get("init", "excited"), rho=rho, t_max=num("tmax", 6.0), dt=num("dt"),
        engines=_engines(merged.get("engines")) or ("factored", "jc"),
        n_max=int(num("nmax", DEFAULT_NMAX)), fallback=not args.no_fallback,
    )


def _write(text: str, out, stdout):
    if out is None:
        stdout.write(text)
    else:
        Path(out).write_text(text)
        logger.info("wrote %s", out)


def _emit(results, fmt, out, stdout):
    render = to_json if fmt == "json" else to_csv
    if len(results) == 1:
        _write(render(results[0]), out, stdout)
        return
    if out is None:
        if fmt == "json":
            stdout.write("[\n" + ",\n".join(render(r).rstrip("\n") for r in results) + "\n]\n")
        else:
            stdout.write("\n".join(render(r) for r in results))
        return
    path = Path(out)
    for r in results:
        _write(render(r), path.with_name(f"{path.stem}_{r.config.label}{path.suffix}"), stdout)


def cmd_simulate(args, stdout) -> int:
    cfg = _simulate_config(args)
    _emit([run_scenario(cfg)], args.format or "csv", args.out, stdout)
    return 0


def cmd_figure(args, stdout) -> int:
    overrides = {"fallback": not args.no_fallback}
    if args.engines is not None:
        overrides["engines"] = _engines(args.engines)
    if args.dt is not None:
        overrides["dt"] = args.dt
    if args.nmax is not None:
        overrides["n_max"] = args.nmax
    results = [run_scenario(cfg) for cfg in figure_configs(args.number, **overrides)]
    _emit(results, args.format or "csv", args.out, stdout)
    return 0


def cmd_check(args, stdout) -> int:
    results = run_suite(args.suite, n_max=args.nmax)
    for r in results:
        stdout.write(r.line() + "\n")
    failed = [r for r in results if not r.passed]
    stdout.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
    return 1 if failed else 0


SWEEP_COLUMNS = ("delta_ratio", "coupling_ratio", "omega0", "delta", "max_pe",
                 "dominant_period", "period_uncertainty", "envelope_dev")


def cmd_sweep(args, stdout) -> int:
    from .model import ModelParams, make_atom_state

    rows = []
    for c_ratio in _floats(args.coupling_ratios, "coupling-ratios"):
        for d_ratio in _floats(args.delta_ratios, "delta-ratios"):
            if c_ratio <= 0 or not 0 <= d_ratio < 1:
                raise UsageError(f"need g/omega0 > 0 and 0 <= delta/omega0 < 1, got {c_ratio}, {d_ratio}")
            omega0 = 1.0 / c_ratio
            params = ModelParams.from_detuning(omega0, d_ratio * omega0, 1.0)
            traj = propagate_factored(make_atom_state(args.init), params, args.tmax, dt=args.dt)
            summary = find_extrema(traj.times, traj.pe, counter_rotating_window(params, traj.dt))
            rows.append({
                "delta_ratio": d_ratio, "coupling_ratio": c_ratio, "omega0": omega0,
                "delta": params.delta, "max_pe": float(traj.pe.max()),
                "dominant_period": summary.dominant_period,
                "period_uncertainty": summary.period_uncertainty,
                "envelope_dev": envelope_check(traj.times, traj.pe, "gaussian", params.g),
            })
    if args.format == "json":
        text = json.dumps({"metadata": vars_for_json(args), "rows": rows}, indent=1) + "\n"
    else:
        buf = io.StringIO()
        buf.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in rows:
            buf.write(",".join("" if row[k] is None else "%.17g" % row[k] for k in SWEEP_COLUMNS) + "\n")
        text = buf.getvalue()
    _write(text, args.out, stdout)
    return 0


def vars_for_json(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("out",)}


COMMANDS = {"simulate": cmd_simulate, "figure": cmd_figure, "check": cmd_check, "sweep": cmd_sweep}


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    level = os.environ.get("RABI_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "seed_free", False):
        parser.print_usage(sys.stderr)
        sys.stderr.write("rabivac: error: --seed-free is reserved (no randomness is used anywhere)\n")
        return 2
    try:
        return COMMANDS[args.command](args, stdout)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"rabivac: error: {exc}\n")
        return 2
    except RiccatiDivergence as exc:
        sys.stderr.write(f"rabivac: {exc}\n")
        return 1
    except BrokenPipeError:  # e.g. piped into head
        sys.stderr.close()
        return 0


if __name__ == "__main__":
    sys.exit(main())
