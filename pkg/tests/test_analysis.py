import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rabivac.analysis import (
    SeriesError,
    compare_series,
    counter_rotating_window,
    envelope,
    envelope_check,
    find_extrema,
    moving_average,
)
from rabivac.jc import jc_excited_probability
from rabivac.model import make_atom_state
from rabivac.oracle import oracle_excited_population
from rabivac.propagator import propagate_factored


def test_sinusoid_period_within_one_step():
    t = np.linspace(0, 20, 4001)
    s = find_extrema(t, np.sin(2 * math.pi * t / 3.0))
    assert abs(s.dominant_period - 3.0) <= t[1]
    assert s.period_uncertainty <= t[1]


def test_damped_maxima_strictly_decrease():
    t = np.linspace(0, 3, 3001)
    s = find_extrema(t, np.exp(-t**2) * np.cos(t) ** 2)
    values = [v for _, v in s.local_maxima]
    assert len(values) >= 1
    assert all(b < a for a, b in zip(values, values[1:]))


def test_extrema_alternate():
    t = np.linspace(0, 10, 2001)
    s = find_extrema(t, np.sin(3 * t) * np.exp(-0.1 * t))
    events = sorted([(tt, "max") for tt, _ in s.local_maxima] + [(tt, "min") for tt, _ in s.local_minima])
    kinds = [k for _, k in events]
    assert all(a != b for a, b in zip(kinds, kinds[1:]))


def test_constant_series_has_no_extrema():
    t = np.linspace(0, 1, 50)
    s = find_extrema(t, np.full(50, 0.3))
    assert s.local_maxima == s.local_minima == []
    assert s.dominant_period is None and s.peak_to_trough == 0.0


@pytest.mark.parametrize("n", [0, 5, 15])
def test_short_series_rejected(n):
    with pytest.raises(SeriesError):
        find_extrema(np.arange(n, dtype=float), np.zeros(n))


def test_non_uniform_grid_rejected():
    t = np.linspace(0, 1, 40) ** 2
    with pytest.raises(SeriesError):
        find_extrema(t, np.sin(t))


def test_bad_window_rejected():
    t = np.linspace(0, 1, 40)
    with pytest.raises(SeriesError):
        find_extrema(t, np.sin(t), smoothing_window=0)
    with pytest.raises(SeriesError):
        find_extrema(t, np.sin(t), smoothing_window=39)


def test_moving_average_keeps_covered_samples():
    t = np.arange(10.0)
    tc, yc = moving_average(t, t**2, 3)
    np.testing.assert_allclose(tc, np.arange(1.0, 9.0))
    assert yc[0] == pytest.approx(5 / 3)


def test_fig2_period_is_detuning_period(fig2):
    traj = propagate_factored(make_atom_state("excited"), fig2, 25 / fig2.delta)
    s = find_extrema(traj.times, traj.pe, counter_rotating_window(fig2, traj.dt))
    assert abs(s.dominant_period - 2 * math.pi / fig2.delta) <= 0.1 * 2 * math.pi / fig2.delta


def test_envelope_exact_series(fig1):
    t = np.linspace(0, 3, 100)
    assert envelope_check(t, np.exp(-(t**2) / 2), "gaussian_half", 1.0) == 0.0
    assert envelope_check(t, envelope(t, "gaussian", 2.0), "gaussian", 2.0) == 0.0


def test_fig1_population_follows_gaussian(fig1):
    traj = propagate_factored(make_atom_state("excited"), fig1, 3.0)
    assert envelope_check(traj.times, traj.pe, "gaussian", fig1.g) <= 0.05


def test_compare_identical_is_zero():
    t = np.linspace(0, 1, 20)
    c = compare_series(t, np.sin(t), t, np.sin(t))
    assert c.max_abs_diff == c.rms_diff == 0.0


def test_compare_reports_location():
    t = np.linspace(0, 1, 21)
    b = np.zeros(21)
    b[7] = 0.4
    c = compare_series(t, np.zeros(21), t, b)
    assert c.max_abs_diff == 0.4 and c.t_of_max == t[7]
    assert c.rms_diff == pytest.approx(0.4 / math.sqrt(21))


def test_compare_rejects_grid_mismatch():
    with pytest.raises(SeriesError):
        compare_series(np.linspace(0, 1, 20), np.zeros(20), np.linspace(0, 2, 20), np.zeros(20))


def test_jc_against_rwa_oracle(fig2):
    t = np.linspace(0, 10, 501)
    c = compare_series(t, jc_excited_probability(fig2, t).p_excited,
                       t, oracle_excited_population(fig2, t, 8, "rwa"))
    assert c.max_abs_diff <= 1e-8


def test_exact_model_departs_from_jc(fig2):
    traj = propagate_factored(make_atom_state("excited"), fig2, 6.0)
    c = compare_series(traj.times, traj.pe, traj.times, jc_excited_probability(fig2, traj.times).p_excited)
    assert c.max_abs_diff > 0.1


signals = st.tuples(st.floats(0.5, 4.0), st.floats(0.0, 0.3), st.floats(0.0, 2 * math.pi))


@settings(max_examples=50, deadline=None)
@given(signals)
def test_negation_swaps_extrema(sig):
    w, damp, phase = sig
    t = np.linspace(0, 12, 1201)
    y = np.exp(-damp * t) * np.sin(w * t + phase)
    a, b = find_extrema(t, y), find_extrema(t, -y)
    assert [tt for tt, _ in a.local_maxima] == [tt for tt, _ in b.local_minima]
    assert [tt for tt, _ in a.local_minima] == [tt for tt, _ in b.local_maxima]


@settings(max_examples=50, deadline=None)
@given(signals, st.sampled_from([0.5, 2.0, 8.0]), st.floats(-3.0, 3.0))
def test_period_invariant_under_affine_rescaling(sig, scale, offset):
    w, damp, phase = sig
    t = np.linspace(0, 12, 1201)
    y = np.exp(-damp * t) * np.sin(w * t + phase)
    a, b = find_extrema(t, y), find_extrema(t, scale * y + offset)
    assert a.dominant_period == b.dominant_period
