"""Brute-force reference: the Rabi Hamiltonian in a truncated Fock basis.

Joint states are indexed as ``level * (n_max + 1) + n`` with level 0 the
excited atom and level 1 the ground atom, i.e. ``kron(atom, field)`` with the
atom basis ordered (excited, ground).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import AtomState, ModelParams

DEFAULT_NMAX = 16
NORM_TOL = 1e-12


class CouplingMode(str, Enum):
    FULL = "full"
    RWA = "rwa"


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class JointState:
    amplitudes: np.ndarray
    n_max: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2 * (self.n_max + 1),):
            raise ValueError(f"expected {2 * (self.n_max + 1)} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, level: str, n: int, n_max: int) -> "JointState":
        """Product state |level, n> with level ``"e"`` or ``"g"``."""
        amps = np.zeros(2 * (n_max + 1), dtype=complex)
        amps[_index(level, n, n_max)] = 1.0
        return cls(amps, n_max)

    @classmethod
    def superposition(cls, terms, n_max: int) -> "JointState":
        """Normalized sum of ``(coefficient, level, n)`` terms."""
        amps = np.zeros(2 * (n_max + 1), dtype=complex)
        for coeff, level, n in terms:
            amps[_index(level, n, n_max)] += coeff
        return cls(amps / np.linalg.norm(amps), n_max)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _index(level: str, n: int, n_max: int) -> int:
    if level not in ("e", "g"):
        raise ValueError(f"level must be 'e' or 'g', got {level!r}")
    if not 0 <= n <= n_max:
        raise ValueError(f"photon number {n} outside [0, {n_max}]")
    return (0 if level == "e" else n_max + 1) + n


@dataclass(frozen=True)
class RabiHamiltonian:
    matrix: np.ndarray
    mode: CouplingMode
    n_max: int
    params: ModelParams


def build_hamiltonian(params: ModelParams, n_max: int = DEFAULT_NMAX, mode="full") -> RabiHamiltonian:
    """Dense Rabi (``mode="full"``) or Jaynes-Cummings (``mode="rwa"``) Hamiltonian."""
    mode = CouplingMode(mode)
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    dim = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    sigma_plus = np.array([[0.0, 1.0], [0.0, 0.0]])
    sigma_z = np.diag([1.0, -1.0])
    eye_f = np.eye(dim)

    h = 0.5 * params.omega0 * np.kron(sigma_z, eye_f)
    h += params.omega * np.kron(np.eye(2), a.T @ a)
    if mode is CouplingMode.FULL:
        h += params.g * np.kron(sigma_plus + sigma_plus.T, a + a.T)
    else:
        h += params.g * (np.kron(sigma_plus, a) + np.kron(sigma_plus.T, a.T))
    return RabiHamiltonian(h.astype(complex), mode, n_max, params)


def evolve_amplitudes(psi0: JointState, H: RabiHamiltonian, times) -> np.ndarray:
    """exp(-i H t) psi0 for every t, as a ``(len(times), dim)`` array."""
    if psi0.n_max != H.n_max:
        raise ValueError(f"state truncation {psi0.n_max} does not match Hamiltonian {H.n_max}")
    if not np.all(np.isfinite(H.matrix)):
        raise OracleError("Hamiltonian has non-finite entries")
    try:
        energies, vecs = np.linalg.eigh(H.matrix)
    except np.linalg.LinAlgError as exc:
        raise OracleError(f"eigendecomposition failed: {exc}") from exc
    times = np.asarray(times, dtype=float)
    coeffs = vecs.conj().T @ psi0.amplitudes
    phases = np.exp(-1j * np.outer(times, energies))
    return (phases * coeffs) @ vecs.T


def evolve(psi0: JointState, H: RabiHamiltonian, times) -> list[JointState]:
    """Exact evolution at each sample time from a single eigendecomposition."""
    amps = evolve_amplitudes(psi0, H, times)
    return [JointState(row, psi0.n_max) for row in amps]


def excited_probabilities(amps: np.ndarray, n_max: int) -> np.ndarray:
    """Excited-atom probability for one state vector or a stack of them."""
    amps = np.asarray(amps)
    return np.sum(np.abs(amps[..., : n_max + 1]) ** 2, axis=-1)


def reduced_atom_state(psi: JointState) -> AtomState:
    """Partial trace over the cavity mode."""
    dim = psi.n_max + 1
    e, g = psi.amplitudes[:dim], psi.amplitudes[dim:]
    rho10 = np.sum(e * np.conj(g))
    return AtomState([[np.vdot(e, e).real, rho10], [np.conj(rho10), np.vdot(g, g).real]])


def parity_diagonal(n_max: int) -> np.ndarray:
    """Diagonal of exp(i pi (a^dag a + sigma_+ sigma_-)) in the joint basis."""
    n = np.arange(n_max + 1)
    return np.concatenate([(-1.0) ** (n + 1), (-1.0) ** n])


def parity_expectation(psi: JointState) -> float:
    return float(np.real(np.vdot(psi.amplitudes, parity_diagonal(psi.n_max) * psi.amplitudes)))


def initial_joint_state(init: str, n_max: int) -> JointState:
    """Atom in ``"excited"`` or ``"ground"``, cavity in vacuum."""
    if init == "excited":
        return JointState.basis("e", 0, n_max)
    if init == "ground":
        return JointState.basis("g", 0, n_max)
    raise ValueError(f"oracle supports excited or ground initial atoms, got {init!r}")


def oracle_excited_population(params: ModelParams, times, n_max: int = DEFAULT_NMAX,
                              mode="full", init="excited") -> np.ndarray:
    """P_e(t) of the atom from exact joint evolution with the cavity in vacuum."""
    H = build_hamiltonian(params, n_max, mode)
    amps = evolve_amplitudes(initial_joint_state(init, n_max), H, times)
    return excited_probabilities(amps, n_max)


def excited_probability_rate(params: ModelParams, times, n_max: int = DEFAULT_NMAX,
                             mode="full", init="excited") -> np.ndarray:
    """Exact dP_e/dt = 2 Re <psi| P_e (-i H) |psi> along the joint evolution."""
    H = build_hamiltonian(params, n_max, mode)
    amps = evolve_amplitudes(initial_joint_state(init, n_max), H, times)
    h_psi = amps @ H.matrix.T
    dim = n_max + 1
    return 2.0 * np.real(np.sum(np.conj(amps[..., :dim]) * (-1j) * h_psi[..., :dim], axis=-1))


@dataclass(frozen=True)
class TruncationReport:
    n_max: int
    n_ref: int
    max_difference: float
    t_of_max: float


def truncation_check(params: ModelParams, n_max: int, times, mode="full",
                     init="excited") -> TruncationReport:
    """Compare P_e at truncation ``n_max`` against ``2 * n_max``."""
    times = np.asarray(times, dtype=float)
    low = oracle_excited_population(params, times, n_max, mode, init)
    high = oracle_excited_population(params, times, 2 * n_max, mode, init)
    diff = np.abs(low - high)
    i = int(np.argmax(diff))
    return TruncationReport(n_max, 2 * n_max, float(diff[i]), float(times[i]))
