import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from rabivac.model import (
    SERIES_THRESHOLD,
    AtomState,
    InvalidParameterError,
    InvalidStateError,
    ModelParams,
    evaluate_coefficients,
    make_atom_state,
)

from conftest import REGIMES, regime

FIELDS = ("alpha", "f", "alpha_tilde", "F_int", "eps0", "eps_plus", "eps_minus",
          "nu0", "nu_plus", "nu_minus", "gamma_k", "gamma_k_dot")

freq = st.floats(min_value=0.1, max_value=100.0)
times = st.floats(min_value=0.0, max_value=20.0)


class TestModelParams:
    def test_derived_frequencies(self):
        p = ModelParams(omega0=10.0, omega=8.0, g=1.0)
        assert p.delta == 2.0
        assert p.bigdelta == 18.0
        assert p.rabi_frequency == pytest.approx(math.sqrt(8.0))

    def test_from_detuning(self):
        p = ModelParams.from_detuning(20.0, 2.0, 1.0)
        assert p.omega == 18.0

    @pytest.mark.parametrize("kwargs", [
        dict(omega0=0.0, omega=1.0, g=1.0),
        dict(omega0=1.0, omega=-1.0, g=1.0),
        dict(omega0=1.0, omega=1.0, g=-0.1),
        dict(omega0=math.nan, omega=1.0, g=1.0),
        dict(omega0=1.0, omega=math.inf, g=1.0),
    ])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(InvalidParameterError):
            ModelParams(**kwargs)

    def test_resonance_allowed(self):
        assert ModelParams.from_detuning(10.0, 0.0, 1.0).delta == 0.0


class TestAtomState:
    def test_excited(self):
        assert np.array_equal(make_atom_state("excited").matrix, np.diag([1.0, 0.0]))

    def test_ground(self):
        assert np.array_equal(make_atom_state("ground").matrix, np.diag([0.0, 1.0]))

    def test_custom_superposition(self):
        s = make_atom_state("custom", [[0.5, 0.5], [0.5, 0.5]])
        assert s.rho11 == 0.5 and s.rho10 == 0.5 and s.rho01 == 0.5

    def test_non_hermitian_rejected(self):
        with pytest.raises(InvalidStateError, match="Hermitian"):
            make_atom_state("custom", [[0.5, 0.5], [0.1, 0.5]])

    def test_non_unit_trace_rejected(self):
        with pytest.raises(InvalidStateError, match="trace"):
            make_atom_state("custom", [[0.6, 0.0], [0.0, 0.6]])

    def test_custom_requires_matrix(self):
        with pytest.raises(InvalidStateError):
            make_atom_state("custom")

    def test_immutable(self):
        s = AtomState.excited()
        with pytest.raises(ValueError):
            s.matrix[0, 0] = 0.0


class TestCoefficients:
    def test_all_zero_at_origin(self, fig2):
        c = evaluate_coefficients(fig2, 0.0)
        for name in FIELDS:
            if name != "eps0":
                assert getattr(c, name) == 0, name
        # eps0 carries the bare atomic frequency and is -2i omega0 at t = 0.
        assert c.eps0 == -2j * fig2.omega0

    def test_resonance_limit(self, fig1):
        tau = 0.7
        c = evaluate_coefficients(fig1, tau)
        assert c.f == pytest.approx(tau, abs=1e-15)
        assert c.F_int.real == pytest.approx(tau**2 / 2, abs=1e-15)
        expected = fig1.g**2 * (c.alpha_tilde.real + tau**2 / 2)
        assert c.gamma_k == pytest.approx(expected, rel=1e-15)

    def test_full_counter_rotating_period(self, fig2):
        t = 2 * math.pi / fig2.bigdelta
        c = evaluate_coefficients(fig2, t)
        assert abs(c.alpha) < 1e-15
        assert abs(c.alpha_tilde.real) < 1e-18
        assert c.alpha_tilde.imag == pytest.approx(-2 * math.pi / fig2.bigdelta**2, rel=1e-14)

    def test_kernel_integrals_match_quadrature(self, fig2):
        t = 1.3
        c = evaluate_coefficients(fig2, t)
        ker = lambda s, part: getattr(evaluate_coefficients(fig2, s).alpha, part)
        fk = lambda s, part: getattr(evaluate_coefficients(fig2, s).f, part)
        assert quad(ker, 0, t, args=("real",), epsabs=1e-14, limit=200)[0] == pytest.approx(c.alpha_tilde.real, abs=1e-13)
        assert quad(ker, 0, t, args=("imag",), epsabs=1e-14, limit=200)[0] == pytest.approx(c.alpha_tilde.imag, abs=1e-13)
        assert quad(fk, 0, t, args=("real",), epsabs=1e-14)[0] == pytest.approx(c.F_int.real, abs=1e-13)
        assert quad(fk, 0, t, args=("imag",), epsabs=1e-14)[0] == pytest.approx(c.F_int.imag, abs=1e-13)

    def test_matches_exponential_closed_forms(self, fig2):
        t = np.linspace(0.5, 5.0, 7)
        D, d = fig2.bigdelta, fig2.delta
        c = evaluate_coefficients(fig2, t)
        np.testing.assert_allclose(c.alpha, (1 - np.exp(-1j * D * t)) / (1j * D), rtol=1e-12)
        np.testing.assert_allclose(c.f, (np.exp(1j * d * t) - 1) / (1j * d), rtol=1e-12)
        np.testing.assert_allclose(c.alpha_tilde, (1 - np.exp(-1j * D * t) - 1j * D * t) / D**2, rtol=1e-10)
        np.testing.assert_allclose(c.F_int, (1 + 1j * d * t - np.exp(1j * d * t)) / d**2, rtol=1e-10)
        g2 = fig2.g**2
        np.testing.assert_allclose(c.eps0, -2j * (fig2.omega0 - g2 * c.alpha.imag + g2 * c.f.imag))
        np.testing.assert_allclose(c.eps_plus, g2 * (c.alpha + np.conj(c.f)))
        np.testing.assert_allclose(c.nu0, 2 * g2 * (c.alpha.real - c.f.real))
        np.testing.assert_allclose(c.nu_plus, 2 * g2 * c.alpha.real)
        np.testing.assert_allclose(c.nu_minus, 2 * g2 * c.f.real)

    def test_array_and_scalar_agree(self, fig2):
        t = np.array([0.0, 0.3, 2.0])
        arr = evaluate_coefficients(fig2, t)
        for i, ti in enumerate(t):
            sc = evaluate_coefficients(fig2, ti)
            for name in FIELDS:
                assert getattr(sc, name) == getattr(arr, name)[i]

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -1.0])
    def test_rejects_bad_time(self, fig2, bad):
        with pytest.raises(InvalidParameterError):
            evaluate_coefficients(fig2, bad)

    @pytest.mark.parametrize("delta", [1e-3, 0.5, 7.0])
    def test_series_closed_form_splice(self, delta):
        p = ModelParams.from_detuning(10.0, delta, 1.0)
        t_edge = SERIES_THRESHOLD / delta
        below = evaluate_coefficients(p, t_edge * (1 - 1e-12))
        above = evaluate_coefficients(p, t_edge * (1 + 1e-12))
        # The two sides sit 2e-12 apart in t; compare after removing that drift.
        for name, scale in (("f", 1), ("F_int", 2)):
            a, b = getattr(below, name), getattr(above, name)
            assert abs(a - b) / abs(b) < 1e-12 + scale * 2e-12, name

    @settings(max_examples=60, deadline=None)
    @given(freq, freq, st.floats(min_value=0.0, max_value=1.0), times)
    def test_conjugation_invariants(self, w0, w, g, t):
        c = evaluate_coefficients(ModelParams(w0, w, g), t)
        assert c.eps_minus == np.conj(c.eps_plus)
        assert c.eps0.real == 0.0
        for name in ("nu0", "nu_plus", "nu_minus", "gamma_k", "gamma_k_dot"):
            assert np.isrealobj(getattr(c, name))

    # Dyadic frequencies keep omega0 + omega and omega0 - omega exact in floating point.
    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 4000), st.integers(1, 3999), st.integers(1, 3999), times)
    def test_alpha_depends_only_on_sum_frequency(self, total, a0, b0, t):
        a0, b0 = min(a0, total - 1), min(b0, total - 1)
        a = ModelParams(a0 / 64, (total - a0) / 64, 1.0)
        b = ModelParams(b0 / 64, (total - b0) / 64, 0.25)
        assert a.bigdelta == b.bigdelta
        ca, cb = evaluate_coefficients(a, t), evaluate_coefficients(b, t)
        assert ca.alpha == cb.alpha
        assert ca.alpha_tilde == cb.alpha_tilde

    @settings(max_examples=60, deadline=None)
    @given(st.integers(-300, 300), st.integers(400, 4000), st.integers(400, 4000), times)
    def test_f_depends_only_on_detuning(self, d, w0a, w0b, t):
        a = ModelParams(w0a / 64, (w0a - d) / 64, 1.0)
        b = ModelParams(w0b / 64, (w0b - d) / 64, 0.5)
        assert a.delta == b.delta
        ca, cb = evaluate_coefficients(a, t), evaluate_coefficients(b, t)
        assert ca.f == cb.f
        assert ca.F_int == cb.F_int

    @pytest.mark.parametrize("name", sorted(REGIMES))
    def test_gamma_quadrature_consistency(self, name):
        # Cumulative Simpson of dGamma/dt with the RK4 half-step nodes.
        from rabivac.propagator import default_dt, time_grid

        p = regime(name)
        grid = time_grid(6.0, default_dt(p))
        half = np.linspace(0.0, 6.0, 2 * len(grid) - 1)
        rate = evaluate_coefficients(p, half).gamma_k_dot
        h = grid[1] - grid[0]
        quad_vals = np.concatenate([[0.0], np.cumsum(h / 6 * (rate[:-2:2] + 4 * rate[1:-1:2] + rate[2::2]))])
        exact = evaluate_coefficients(p, grid).gamma_k
        assert np.max(np.abs(quad_vals - exact) / (1 + np.abs(exact))) <= 1e-9
