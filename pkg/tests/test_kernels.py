import os
import subprocess
import sys

import numpy as np
import pytest

from rabivac import _kernels
from rabivac._kernels import _rk4_py
from rabivac.model import evaluate_coefficients
from rabivac.propagator import OVERFLOW_GUARD, _half_step_coefficients, apply_generator, time_grid

from conftest import regime

try:
    from rabivac._kernels import _rk4 as _rk4_ext
except ImportError:  # extension not built
    _rk4_ext = None

needs_ext = pytest.mark.skipif(_rk4_ext is None, reason="compiled kernels not built")


def _coeffs(name="fig2", t_max=2.0, dt=0.005):
    params = regime(name)
    times = time_grid(t_max, dt)
    return params, times, _half_step_coefficients(params, times)


def _tan_system(n):
    # X+' = 1 + X+^2 from 0 is tan(t), which blows up at pi / 2.
    size = 2 * n + 1
    return np.zeros(size, complex), np.ones(size, complex), -np.ones(size, complex)


def test_backend_is_reported():
    assert _kernels.BACKEND in ("cython", "python")


@needs_ext
def test_riccati_backends_agree():
    _, times, c = _coeffs()
    args = (c.eps0, c.eps_plus, c.eps_minus, float(times[1]), OVERFLOW_GUARD)
    a, fa = _rk4_ext.riccati_rk4(*args)
    b, fb = _rk4_py.riccati_rk4(*args)
    assert fa == fb == -1
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)


@needs_ext
def test_direct_backends_agree():
    _, times, c = _coeffs()
    y0 = np.array([0.7, 0.3 - 0.2j, 0.3 + 0.2j, 0.3])
    args = (c.eps0, c.eps_plus, c.eps_minus, c.nu0, c.nu_plus, c.nu_minus, c.gamma_k_dot, y0, float(times[1]))
    np.testing.assert_allclose(_rk4_ext.direct_rk4(*args), _rk4_py.direct_rk4(*args), rtol=0, atol=1e-13)


def test_riccati_tangent_matches_closed_form():
    n, dt = 100, 0.01
    out, failed = _kernels.riccati_rk4(*_tan_system(n), dt, OVERFLOW_GUARD)
    assert failed == -1
    t = np.arange(n + 1) * dt
    np.testing.assert_allclose(out[:, 0].real, np.tan(t), atol=1e-9)


@pytest.mark.parametrize("impl", ["active", "python"])
def test_riccati_blow_up_is_flagged(impl):
    kern = _kernels if impl == "active" else _rk4_py
    n, dt = 400, 0.005  # runs to t = 2 > pi / 2
    _, failed = kern.riccati_rk4(*_tan_system(n), dt, 1e6)
    assert failed > 0
    assert abs(failed * dt - np.pi / 2) < 0.05


def test_direct_kernel_derivative_matches_literal_generator():
    params = regime("fig4a")
    t, dt = 0.8, 1e-4
    c = evaluate_coefficients(params, np.array([t, t + dt / 2, t + dt]))
    rho = np.array([[0.6, 0.1 + 0.3j], [0.1 - 0.3j, 0.4]])
    y0 = np.array([rho[0, 0], rho[0, 1], rho[1, 0], rho[1, 1]])
    out = _kernels.direct_rk4(c.eps0, c.eps_plus, c.eps_minus, c.nu0, c.nu_plus,
                              c.nu_minus, c.gamma_k_dot, y0, dt)
    rate = (out[1] - out[0]) / dt
    mid = evaluate_coefficients(params, t + dt / 2)
    expected = apply_generator(rho + 0.5 * dt * apply_generator(rho, mid, params.g), mid, params.g)
    np.testing.assert_allclose(rate, [expected[0, 0], expected[0, 1], expected[1, 0], expected[1, 1]],
                               rtol=1e-6, atol=1e-8)


@pytest.mark.parametrize("setting,expected", [
    ("python", "python"),
    ("", "python" if _rk4_ext is None else "cython"),
])
def test_environment_selects_backend(setting, expected):
    env = dict(os.environ, RABIVAC_KERNEL=setting)
    out = subprocess.run([sys.executable, "-c", "import rabivac; print(rabivac.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    assert out == expected
