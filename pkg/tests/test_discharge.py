import numpy as np
import pytest
from scipy.linalg import expm

from qutrit_battery import (
    TRANSMON_SPECTRUM,
    InputError,
    NoiseRates,
    Spectrum,
    discharge_curve,
    dm_pure,
    ergotropy_closed_form,
    evolve,
    populations_closed_form,
)
from qutrit_battery.experiments import gap_spectrum

# frozen from the cascade rate matrix exponentiated with scipy.linalg.expm
P2_T1 = 0.4650883158696585
P3_T1 = 0.13533528323661304
C_T1 = 0.7289921181810539
P2_DEGENERATE_T1 = 0.3678794411714423
NORMALIZED_T1 = {0.5: 0.445394160483052, 0.95: 0.37384211188772, 2.0: 0.29036472185983253}

RATES = NoiseRates(gamma21=1.0, gamma32=2.0)


def rate_oracle(g21, g32, t, p0):
    m = np.array([[0, g21, 0], [0, -g21, g32], [0, 0, -g32]], float)
    return expm(m * t) @ np.asarray(p0, float)


def test_fully_charged_populations():
    p2, p3 = populations_closed_form(RATES, 1.0)
    assert p2 == pytest.approx(P2_T1, abs=1e-14)
    assert p3 == pytest.approx(P3_T1, abs=1e-14)
    assert p2 == pytest.approx(2 * (np.exp(-1) - np.exp(-2)))


def test_initial_condition_returned_at_zero():
    assert populations_closed_form(RATES, 0.0, (0.3, 0.5)) == pytest.approx((0.3, 0.5), abs=1e-15)
    assert populations_closed_form(NoiseRates(gamma21=1, gamma32=1), 0.0, (0.3, 0.5)) == (0.3, 0.5)


def test_general_initial_condition_against_oracle(rng):
    for _ in range(20):
        g21, g32 = rng.uniform(0.1, 3, size=2)
        p2c, p3c = rng.dirichlet([1, 1, 1])[1:]
        t = rng.uniform(0, 4)
        ref = rate_oracle(g21, g32, t, (1 - p2c - p3c, p2c, p3c))
        got = populations_closed_form(NoiseRates(gamma21=g21, gamma32=g32), t, (p2c, p3c))
        assert got == pytest.approx(ref[1:], abs=1e-12)


def test_degenerate_rates():
    p2, p3 = populations_closed_form(NoiseRates(gamma21=1, gamma32=1), 1.0)
    assert p2 == pytest.approx(P2_DEGENERATE_T1, abs=1e-15)
    for eps in (-1e-5, 1e-5):
        near, _ = populations_closed_form(NoiseRates(gamma21=1, gamma32=1 + eps), 1.0)
        assert near == pytest.approx(P2_DEGENERATE_T1, abs=1e-5)


def test_ergotropy_examples():
    assert ergotropy_closed_form(TRANSMON_SPECTRUM, RATES, 0.0) == pytest.approx(1.95, abs=1e-14)
    c = ergotropy_closed_form(TRANSMON_SPECTRUM, RATES, 1.0)
    assert c == pytest.approx(C_T1, abs=1e-14)
    assert c == pytest.approx(2 * np.exp(-1) + (0.95 - 1) * np.exp(-2))
    assert ergotropy_closed_form(TRANSMON_SPECTRUM, RATES, 200.0) == pytest.approx(0, abs=1e-40)


def test_ergotropy_matches_weighted_populations(rng):
    for _ in range(20):
        s = Spectrum(*np.sort(rng.uniform(-1, 3, size=3)))
        rates = NoiseRates(gamma21=rng.uniform(0.1, 2), gamma32=rng.uniform(0.1, 2))
        t = rng.uniform(0, 5)
        p2, p3 = populations_closed_form(rates, t)
        assert ergotropy_closed_form(s, rates, t) == pytest.approx(s.gap21 * p2 + s.gap31 * p3, abs=1e-12)


def test_degenerate_continuity():
    t = np.linspace(0, 10, 201)
    limit = ergotropy_closed_form(TRANSMON_SPECTRUM, NoiseRates(gamma21=1, gamma32=1), t)
    near = ergotropy_closed_form(TRANSMON_SPECTRUM, NoiseRates(gamma21=1, gamma32=1 + 1e-8), t)
    above = ergotropy_closed_form(TRANSMON_SPECTRUM, NoiseRates(gamma21=1, gamma32=1 + 1e-5), t)
    assert np.max(np.abs(near - limit)) < 1e-6
    assert np.max(np.abs(above - limit)) < 1e-4


def test_not_single_exponential():
    c = ergotropy_closed_form(TRANSMON_SPECTRUM, RATES, np.array([0.5, 1.0, 1.5]))
    second_diff = np.log(c[0]) - 2 * np.log(c[1]) + np.log(c[2])
    assert abs(second_diff) > 1e-3


def test_curve_structure():
    cv = discharge_curve(TRANSMON_SPECTRUM, NoiseRates(gamma21=0.5, gamma32=1.0), 4.0, 41)
    assert cv.gamma21_t[-1] == 4.0 and cv.t[-1] == 8.0
    assert cv.normalized_ergotropy[0] == pytest.approx(1.0)
    assert cv.ergotropy[0] == pytest.approx(1.95)
    assert np.all(np.diff(cv.ergotropy) <= 0)
    assert np.all((cv.p2 >= 0) & (cv.p2 <= 1) & (cv.p3 >= 0) & (cv.p3 <= 1))
    assert np.all(1 - cv.p2 - cv.p3 >= -1e-15)
    i = np.argmin(np.abs(cv.gamma21_t - 1.0))
    assert cv.normalized_ergotropy[i] == pytest.approx(NORMALIZED_T1[0.95], abs=1e-12)


def test_gap_ratio_ordering():
    values = []
    for g in (0.5, 0.95, 2.0):
        cv = discharge_curve(gap_spectrum(TRANSMON_SPECTRUM, g), RATES, 1.0, 2)
        assert cv.normalized_ergotropy[-1] == pytest.approx(NORMALIZED_T1[g], abs=1e-12)
        values.append(cv.normalized_ergotropy[-1])
    assert values[0] > values[1] > values[2]


def test_ordering_holds_over_ratios():
    ratios = np.linspace(0.2, 3.0, 15)
    vals = [discharge_curve(gap_spectrum(TRANSMON_SPECTRUM, g), RATES, 1.0, 2).normalized_ergotropy[-1] for g in ratios]
    assert np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("g32_over_g21", [2.0, 1.0, 0.5])
def test_curve_matches_free_decay_integration(g32_over_g21):
    rates = NoiseRates(gamma21=1.0, gamma32=g32_over_g21)
    cv = discharge_curve(TRANSMON_SPECTRUM, rates, 5.0, 51)
    trace = evolve(dm_pure(3), None, rates, 5.0, steps=50000, sample_every=1000)
    assert np.allclose(trace.t, cv.t)
    assert np.max(np.abs(trace.populations[:, 1] - cv.p2)) < 1e-6
    assert np.max(np.abs(trace.populations[:, 2] - cv.p3)) < 1e-6


def test_invalid_inputs():
    with pytest.raises(InputError):
        populations_closed_form(NoiseRates(gamma21=0, gamma32=1), 1.0)
    with pytest.raises(InputError):
        ergotropy_closed_form(TRANSMON_SPECTRUM, RATES, -1.0)
    with pytest.raises(InputError):
        discharge_curve(TRANSMON_SPECTRUM, RATES, 1.0, 1)
    with pytest.raises(InputError):
        populations_closed_form(NoiseRates(gamma21=1, gamma32=2, gamma31=0.1), 1.0)
