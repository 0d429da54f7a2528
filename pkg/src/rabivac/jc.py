"""Closed-form Jaynes-Cummings (rotating-wave) baseline for a vacuum cavity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import InitialState, ModelParams


@dataclass(frozen=True)
class JcResult:
    omega_rabi: float
    p_excited: float | np.ndarray


def jc_excited_probability(params: ModelParams, t, init="excited") -> JcResult:
    """Excited population of the RWA model with the field initially in vacuum.

    For an excited start this is ``1 - (2 g sin(Omega t / 2) / Omega)^2`` with
    ``Omega = sqrt(delta^2 + 4 g^2)``. A ground-state atom in vacuum is an
    eigenstate of the RWA Hamiltonian, so the result is exactly zero.
    ``t`` may be a scalar or an array.
    """
    init = InitialState(init)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time values must be >= 0")
    omega_rabi = params.rabi_frequency
    if init is InitialState.GROUND:
        p = np.zeros_like(t)
    elif init is InitialState.EXCITED:
        if omega_rabi == 0.0:  # g = 0 at resonance
            p = np.ones_like(t)
        else:
            p = 1.0 - (2.0 * params.g * np.sin(0.5 * omega_rabi * t) / omega_rabi) ** 2
    else:
        raise ValueError("the closed form covers only excited or ground initial atoms")
    return JcResult(omega_rabi=omega_rabi, p_excited=p[()] if p.ndim == 0 else p)
