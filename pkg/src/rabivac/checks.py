"""Invariant, oracle and figure-claim check suites behind ``rabivac check``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .analysis import counter_rotating_window, envelope_check, find_extrema
from .jc import jc_excited_probability
from .model import AtomState, ModelParams, evaluate_coefficients, make_atom_state
from .oracle import (
    DEFAULT_NMAX,
    build_hamiltonian,
    evolve_amplitudes,
    excited_probability_rate,
    initial_joint_state,
    oracle_excited_population,
    parity_diagonal,
    truncation_check,
)
from .propagator import default_dt, propagate_direct, propagate_factored, time_grid
from .scenarios import FIGURE_REGIMES

SUITES = ("invariants", "oracle", "claims", "all")

# Superposition with a complex coherence, so both the J and K blocks are exercised.
COHERENT_RHO = ((0.7, 0.3 - 0.2j), (0.3 + 0.2j, 0.3))
HORIZON = 6.0  # g t


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    relation: str = "<="
    informational: bool = False

    def line(self) -> str:
        status = "INFO" if self.informational else ("PASS" if self.passed else "FAIL")
        return f"{status}  {self.name}: measured {self.measured:.4g} ({self.relation} {self.tolerance:.4g})"


def _le(name, measured, tol):
    return CheckResult(name, bool(measured <= tol), float(measured), float(tol), "<=")


def _ge(name, measured, tol):
    return CheckResult(name, bool(measured >= tol), float(measured), float(tol), ">=")


def regime_params(key: str, g: float = 1.0) -> ModelParams:
    w0, ratio = FIGURE_REGIMES[key]
    return ModelParams.from_detuning(w0 * g, ratio * w0 * g, g)


def _initial(init: str) -> AtomState:
    if init == "coherent":
        return make_atom_state("custom", COHERENT_RHO)
    return make_atom_state(init)


@lru_cache(maxsize=64)
def _trajectory(method: str, key: str, init: str, t_max: float, refine: int = 1):
    params = regime_params(key)
    dt = default_dt(params) / refine
    prop = propagate_factored if method == "factored" else propagate_direct
    return prop(_initial(init), params, t_max, dt=dt)


def invariant_checks() -> list[CheckResult]:
    out = []
    for key in FIGURE_REGIMES:
        for init in ("excited", "coherent"):
            fac = _trajectory("factored", key, init, HORIZON)
            dire = _trajectory("direct", key, init, HORIZON)
            rho0 = _initial(init).matrix
            origin = max(np.max(np.abs(fac.rho[0] - rho0)), np.max(np.abs(dire.rho[0] - rho0)))
            out.append(_le(f"{key}/{init}: rho(0) == rho0", origin, 0.0))
            out.append(_le(f"{key}/{init}: max trace error, factored", fac.trace_error.max(), 1e-8))
            out.append(_le(f"{key}/{init}: max trace error, direct", dire.trace_error.max(), 1e-8))
            out.append(_le(f"{key}/{init}: max hermiticity error, factored", fac.hermiticity_error.max(), 1e-8))
            out.append(_le(f"{key}/{init}: max hermiticity error, direct", dire.hermiticity_error.max(), 1e-8))
            out.append(_le(f"{key}/{init}: factored vs direct", np.max(np.abs(fac.rho - dire.rho)), 1e-6))
            imag = max(np.max(np.abs(t.rho[:, i, i].imag)) for t in (fac, dire) for i in (0, 1))
            out.append(_le(f"{key}/{init}: Im of populations", imag, 1e-12))

    coarse = np.max(np.abs(_trajectory("factored", "fig2", "coherent", HORIZON).rho
                           - _trajectory("direct", "fig2", "coherent", HORIZON).rho))
    fine = np.max(np.abs(_trajectory("factored", "fig2", "coherent", HORIZON, 2).rho
                         - _trajectory("direct", "fig2", "coherent", HORIZON, 2).rho))
    out.append(_ge("fig2: discrepancy ratio dt -> dt/2", coarse / fine, 11.0))

    for key in FIGURE_REGIMES:
        out.append(_le(f"{key}: Gamma_k closed form vs quadrature", gamma_quadrature_error(regime_params(key)), 1e-9))
    return out


def gamma_quadrature_error(params: ModelParams, t_max: float = HORIZON) -> float:
    """max |Gamma_k - cumulative Simpson of dGamma_k/dt| / (1 + |Gamma_k|) on the trajectory grid."""
    times = time_grid(t_max, default_dt(params))
    half = np.linspace(0.0, t_max, 2 * len(times) - 1)
    rate = evaluate_coefficients(params, half).gamma_k_dot
    h = times[1] - times[0]
    panels = h / 6.0 * (rate[:-2:2] + 4.0 * rate[1:-1:2] + rate[2::2])
    quad = np.concatenate([[0.0], np.cumsum(panels)])
    exact = evaluate_coefficients(params, times).gamma_k
    return float(np.max(np.abs(quad - exact) / (1.0 + np.abs(exact))))


def oracle_period(params: ModelParams, t_max: float, mode: str = "rwa", n_max: int = DEFAULT_NMAX) -> float:
    """Mean spacing of the maxima of the oracle P_e, each located by bisection on dP_e/dt."""
    grid = np.linspace(0.0, t_max, 4001)
    rate = excited_probability_rate(params, grid, n_max, mode)
    peaks = []
    for i in np.flatnonzero((rate[:-1] > 0) & (rate[1:] <= 0)):
        lo, hi = grid[i], grid[i + 1]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if excited_probability_rate(params, [mid], n_max, mode)[0] > 0:
                lo = mid
            else:
                hi = mid
        peaks.append(0.5 * (lo + hi))
    if len(peaks) < 2:
        return math.nan
    return float(np.mean(np.diff(peaks)))


def oracle_checks(n_max: int = DEFAULT_NMAX) -> list[CheckResult]:
    out = []
    times = np.linspace(0.0, 10.0, 2001)
    for delta in (0.0, 2.0):
        params = ModelParams.from_detuning(10.0, delta, 1.0)
        rwa = oracle_excited_population(params, times, n_max, "rwa")
        jc = jc_excited_probability(params, times).p_excited
        out.append(_le(f"rwa oracle vs J-C, delta={delta:g}g", np.max(np.abs(rwa - jc)), 1e-8))
        period = oracle_period(params, 10.0, "rwa", n_max)
        out.append(_le(f"J-C period vs 2pi/Omega, delta={delta:g}g",
                       abs(period - 2 * math.pi / params.rabi_frequency), 1e-6))

    for key in FIGURE_REGIMES:
        params = regime_params(key)
        grid = time_grid(HORIZON, 0.01)
        H = build_hamiltonian(params, n_max, "full")
        amps = evolve_amplitudes(initial_joint_state("excited", n_max), H, grid)
        norm_err = np.max(np.abs(np.linalg.norm(amps, axis=1) - 1.0))
        parity = np.real(np.sum(np.conj(amps) * parity_diagonal(n_max) * amps, axis=1))
        out.append(_le(f"{key}: oracle norm drift", norm_err, 1e-12))
        out.append(_le(f"{key}: oracle parity drift", np.max(np.abs(parity + 1.0)), 1e-10))
        if n_max >= 8:
            report = truncation_check(params, n_max // 2, grid)
            label = f"{key}: truncation n_max {n_max // 2}->{n_max}"
        else:
            report = truncation_check(params, n_max, grid)
            label = f"{key}: truncation n_max {n_max}->{2 * n_max}"
        out.append(_le(label, report.max_difference, 1e-6))

    params = regime_params("fig2")
    fac = propagate_factored(make_atom_state("excited"), params, HORIZON)
    pe_oracle = oracle_excited_population(params, fac.times, n_max)
    short = fac.times <= 0.3
    out.append(_le("fig2: |P_e factored - P_e oracle|, g t <= 0.3",
                   np.max(np.abs(fac.pe - pe_oracle)[short]), 5e-3))
    gap = float(np.max(np.abs(fac.pe - pe_oracle)))
    out.append(CheckResult("fig2: master equation vs oracle gap, g t <= 6 (reported)",
                           True, gap, math.inf, "reported;", informational=True))
    return out


def claim_checks() -> list[CheckResult]:
    out = []
    # Fig. 1: damped oscillation at resonance.
    fac = _trajectory("factored", "fig1", "excited", HORIZON)
    summary = find_extrema(fac.times, fac.pe)
    peaks = np.array([v for _, v in summary.local_maxima])
    rise = float(np.max(np.diff(peaks))) if len(peaks) > 1 else 0.0
    out.append(_le("fig1: largest rise between successive P_e maxima", rise, 0.0))
    early = fac.times <= 3.0
    out.append(_le("fig1: |l - exp(-g^2 t^2/2)|, g t <= 3",
                   envelope_check(fac.times[early], np.real(fac.maps.l)[early], "gaussian_half", 1.0), 0.05))
    out.append(_le("fig1: |P_e - exp(-g^2 t^2)|, g t <= 3",
                   envelope_check(fac.times[early], fac.pe[early], "gaussian", 1.0), 0.05))

    # Figs. 2/3: oscillation period set by the detuning alone.
    for key in ("fig2", "fig3"):
        params = regime_params(key)
        t_max = 25.0 / params.delta
        traj = _trajectory("factored", key, "excited", t_max)
        s = find_extrema(traj.times, traj.pe, counter_rotating_window(params, traj.dt))
        target = 2 * math.pi / params.delta
        out.append(_le(f"{key}: |period - 2pi/delta| / (2pi/delta)", abs(s.dominant_period - target) / target, 0.10))
        jc = jc_excited_probability(params, traj.times).p_excited
        s_jc = find_extrema(traj.times, jc)
        out.append(_le(f"{key}: |J-C period - 2pi/Omega| in grid steps",
                       abs(s_jc.dominant_period - 2 * math.pi / params.rabi_frequency) / traj.dt, 2.0))

    # Fig. 4: larger detuning gives smaller amplitude and shorter period.
    stats = {}
    for key in ("fig4a", "fig4b"):
        params = regime_params(key)
        traj = _trajectory("factored", key, "excited", 12.0)
        stats[key] = find_extrema(traj.times, traj.pe, counter_rotating_window(params, traj.dt))
    out.append(_ge("fig4: peak-to-trough(0.2 w0) - peak-to-trough(0.6 w0)",
                   stats["fig4a"].peak_to_trough - stats["fig4b"].peak_to_trough, math.ulp(1.0)))
    out.append(_ge("fig4: period(0.2 w0) - period(0.6 w0)",
                   stats["fig4a"].dominant_period - stats["fig4b"].dominant_period, math.ulp(1.0)))

    # Fig. 5: excitation of an initially unexcited atom.
    fac5 = _trajectory("factored", "fig5", "ground", HORIZON)
    dir5 = _trajectory("direct", "fig5", "ground", HORIZON)
    threshold = 0.5 * float(dir5.pe.max())
    out.append(_ge("fig5: threshold (half the direct max P_e) vs 4g^2/D^2 / 4",
                   threshold, 0.25 * 4.0 / regime_params("fig5").bigdelta ** 2))
    out.append(_ge("fig5: max P_e factored minus threshold", fac5.pe.max() - threshold, math.ulp(1.0)))
    jc5 = jc_excited_probability(regime_params("fig5"), fac5.times, "ground").p_excited
    out.append(_le("fig5: max J-C P_e", float(np.max(np.abs(jc5))), 0.0))
    strong = propagate_factored(make_atom_state("ground"), ModelParams.from_detuning(10.0, 5.0, 1.0), HORIZON)
    out.append(_ge("fig5: max P_e(w0=10g) - max P_e(w0=20g)", strong.pe.max() - fac5.pe.max(), math.ulp(1.0)))
    return out


def run_suite(suite: str, n_max: int = DEFAULT_NMAX) -> list[CheckResult]:
    if suite not in SUITES:
        raise ValueError(f"suite must be one of {', '.join(SUITES)}")
    results = []
    if suite in ("invariants", "all"):
        results += invariant_checks()
    if suite in ("oracle", "all"):
        results += oracle_checks(n_max)
    if suite in ("claims", "all"):
        results += claim_checks()
    return results
