"""Model parameters, atom states and the closed-form memory kernels.

Frequencies are angular and measured in any consistent unit (hbar = 1). The
CLI fixes ``g = 1`` so that everything is a multiple of the coupling.

The atom basis is ordered (excited, ground) throughout, so ``matrix[0, 0]``
is the excited population and ``matrix[0, 1]`` the coherence rho^{10}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

# |x| below this switches the kernels to their Taylor series; the truncation
# error of the 4-term series is then below 1e-16 relative.
SERIES_THRESHOLD = 1e-4

NORMALIZATION_TOL = 1e-12

ArrayLike = Union[float, np.ndarray]


class InvalidParameterError(ValueError):
    """Raised for non-physical or non-finite model parameters."""


class InvalidStateError(ValueError):
    """Raised when a density matrix violates Hermiticity or normalization."""


@dataclass(frozen=True)
class ModelParams:
    """Atom frequency ``omega0``, cavity frequency ``omega`` and coupling ``g``."""

    omega0: float
    omega: float
    g: float

    def __post_init__(self):
        for name in ("omega0", "omega", "g"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value!r}")
        if self.omega0 <= 0:
            raise InvalidParameterError(f"omega0 must be > 0, got {self.omega0!r}")
        if self.omega <= 0:
            raise InvalidParameterError(f"omega must be > 0, got {self.omega!r}")
        if self.g < 0:
            raise InvalidParameterError(f"g must be >= 0, got {self.g!r}")

    @classmethod
    def from_detuning(cls, omega0: float, delta: float, g: float) -> "ModelParams":
        """Build parameters from the detuning ``delta = omega0 - omega``."""
        return cls(omega0=float(omega0), omega=float(omega0) - float(delta), g=float(g))

    @property
    def delta(self) -> float:
        """Detuning omega0 - omega."""
        return self.omega0 - self.omega

    @property
    def bigdelta(self) -> float:
        """Sum frequency omega0 + omega of the counter-rotating processes."""
        return self.omega0 + self.omega

    @property
    def rabi_frequency(self) -> float:
        return math.sqrt(self.delta**2 + 4.0 * self.g**2)


class AtomState:
    """Immutable 2x2 atomic density matrix in the (excited, ground) basis."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix, tol: float = NORMALIZATION_TOL):
        m = np.array(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidStateError(f"density matrix must be 2x2, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidStateError("density matrix has non-finite entries")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > tol:
            raise InvalidStateError(f"density matrix is not Hermitian (max |rho - rho^H| = {herm:.3g})")
        trace_err = abs(m[0, 0].real + m[1, 1].real - 1.0)
        if trace_err > tol:
            raise InvalidStateError(f"density matrix does not have unit trace (|tr - 1| = {trace_err:.3g})")
        # Store the exactly Hermitian part.
        m[0, 0] = m[0, 0].real
        m[1, 1] = m[1, 1].real
        m[1, 0] = np.conj(m[0, 1])
        m.setflags(write=False)
        self._matrix = m

    @classmethod
    def excited(cls) -> "AtomState":
        return cls([[1.0, 0.0], [0.0, 0.0]])

    @classmethod
    def ground(cls) -> "AtomState":
        return cls([[0.0, 0.0], [0.0, 1.0]])

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def rho11(self) -> float:
        return float(self._matrix[0, 0].real)

    @property
    def rho00(self) -> float:
        return float(self._matrix[1, 1].real)

    @property
    def rho10(self) -> complex:
        return complex(self._matrix[0, 1])

    @property
    def rho01(self) -> complex:
        return complex(self._matrix[1, 0])

    def __eq__(self, other):
        if not isinstance(other, AtomState):
            return NotImplemented
        return bool(np.array_equal(self._matrix, other._matrix))

    def __hash__(self):
        return hash(self._matrix.tobytes())

    def __repr__(self):
        return f"AtomState(rho11={self.rho11:.6g}, rho00={self.rho00:.6g}, rho10={self.rho10:.6g})"


class InitialState(str, Enum):
    EXCITED = "excited"
    GROUND = "ground"
    CUSTOM = "custom"


def make_atom_state(kind, rho=None) -> AtomState:
    """Return the named initial atom state, or validate a custom matrix.

    ``kind`` is ``"excited"``, ``"ground"`` or ``"custom"``; the latter
    requires ``rho``.
    """
    kind = InitialState(kind)
    if kind is InitialState.EXCITED:
        return AtomState.excited()
    if kind is InitialState.GROUND:
        return AtomState.ground()
    if rho is None:
        raise InvalidStateError("custom initial state requires a density matrix")
    return AtomState(rho)


@dataclass(frozen=True)
class CoefficientSet:
    """Time-dependent scalars of the reduced master equation.

    Each field is a scalar or an array matching the shape of the time
    argument passed to :func:`evaluate_coefficients`.
    """

    alpha: ArrayLike
    f: ArrayLike
    alpha_tilde: ArrayLike
    F_int: ArrayLike
    eps0: ArrayLike
    eps_plus: ArrayLike
    eps_minus: ArrayLike
    nu0: ArrayLike
    nu_plus: ArrayLike
    nu_minus: ArrayLike
    gamma_k: ArrayLike
    gamma_k_dot: ArrayLike


def _memory_kernel(w: float, t: np.ndarray) -> np.ndarray:
    """(exp(i w t) - 1) / (i w), written without cancellation."""
    x = w * t
    small = np.abs(x) < SERIES_THRESHOLD
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = (np.sin(x) + 2j * np.sin(0.5 * x) ** 2) / w
    series = t * (1.0 + 0.5j * x - x**2 / 6.0 - 1j * x**3 / 24.0)
    return np.where(small, series, closed)


def _memory_kernel_integral(w: float, t: np.ndarray) -> np.ndarray:
    """Integral over [0, t] of the memory kernel: (1 + i w t - exp(i w t)) / w^2."""
    x = w * t
    small = np.abs(x) < SERIES_THRESHOLD
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = (2.0 * np.sin(0.5 * x) ** 2 + 1j * (x - np.sin(x))) / (w * w)
    series = t * t * (0.5 + 1j * x / 6.0 - x**2 / 24.0 - 1j * x**3 / 120.0)
    return np.where(small, series, closed)


def evaluate_coefficients(params: ModelParams, t) -> CoefficientSet:
    """Evaluate every master-equation coefficient at time(s) ``t``.

    The counter-rotating kernel ``alpha`` depends only on the sum frequency
    and the rotating kernel ``f`` only on the detuning. Near resonance the
    Taylor series of ``f`` and its integral are used, so ``delta = 0`` is
    handled exactly.
    """
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise InvalidParameterError("time values must be finite")
    if np.any(t < 0):
        raise InvalidParameterError("time values must be >= 0")

    g2 = params.g**2
    # alpha = (1 - exp(-i D t)) / (i D) is the rotating kernel at frequency -D.
    alpha = _memory_kernel(-params.bigdelta, t)
    f = _memory_kernel(params.delta, t)
    alpha_tilde = _memory_kernel_integral(-params.bigdelta, t)
    F_int = _memory_kernel_integral(params.delta, t)

    eps0 = -2j * (params.omega0 - g2 * alpha.imag + g2 * f.imag)
    eps_plus = g2 * (alpha + np.conj(f))
    eps_minus = np.conj(eps_plus)
    nu0 = 2.0 * g2 * (alpha.real - f.real)
    nu_plus = 2.0 * g2 * alpha.real
    nu_minus = 2.0 * g2 * f.real
    gamma_k = g2 * (alpha_tilde.real + F_int.real)
    gamma_k_dot = g2 * (alpha.real + f.real)

    fields = dict(
        alpha=alpha, f=f, alpha_tilde=alpha_tilde, F_int=F_int,
        eps0=eps0, eps_plus=eps_plus, eps_minus=eps_minus,
        nu0=nu0, nu_plus=nu_plus, nu_minus=nu_minus,
        gamma_k=gamma_k, gamma_k_dot=gamma_k_dot,
    )
    if scalar:
        fields = {k: np.asarray(v)[()] for k, v in fields.items()}
    return CoefficientSet(**fields)
