import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qutrit_battery import (
    TRANSMON_SPECTRUM,
    DegenerateInputError,
    Direction,
    InputError,
    Protocol,
    Spectrum,
    eig3_hermitian,
    eigensystem,
    h0,
    h_int,
    ramp_eval,
)
from qutrit_battery.model import RAMPS

from helpers import same_ray

couplings = st.floats(-5, 5, allow_nan=False).filter(lambda x: abs(x) > 1e-3)


def test_h0():
    assert np.array_equal(h0(TRANSMON_SPECTRUM), np.diag([0, 1, 1.95]))
    assert np.array_equal(h0(Spectrum(0, 1, 2)), np.diag([0, 1, 2]))
    assert np.trace(h0(TRANSMON_SPECTRUM)).real == pytest.approx(2.95)


def test_spectrum_gaps():
    s = TRANSMON_SPECTRUM
    assert (s.gap21, s.gap32, s.gap31) == pytest.approx((1.0, 0.95, 1.95))


@pytest.mark.parametrize("w", [(0, 0, 1), (1, 0, 2), (0, 2, 1)])
def test_spectrum_must_be_strictly_ordered(w):
    with pytest.raises(InputError):
        Spectrum(*w)


def test_stable_linear_ramp():
    p = Protocol(omega0=2.0, tau=10.0, hold=5.0)
    assert ramp_eval(p, 0) == (0.0, 2.0)
    assert ramp_eval(p, 5) == pytest.approx((1.0, 1.0))
    assert ramp_eval(p, 10) == (2.0, 0.0)
    assert ramp_eval(p, 13.7) == (2.0, 0.0)
    assert ramp_eval(p, 15) == (2.0, 0.0)


def test_unstable_is_mirrored():
    p = Protocol(tau=4.0, direction="unstable", hold=1.0)
    assert p.direction is Direction.UNSTABLE
    assert ramp_eval(p, 0) == (1.0, 0.0)
    assert ramp_eval(p, 1) == pytest.approx((0.75, 0.25))
    assert ramp_eval(p, 4) == (0.0, 1.0)
    assert ramp_eval(p, 5) == (0.0, 1.0)


@pytest.mark.parametrize("t", [-0.1, 10.01])
def test_ramp_eval_domain(t):
    with pytest.raises(InputError):
        ramp_eval(Protocol(tau=10.0), t)


@pytest.mark.parametrize("ramp", sorted(RAMPS))
@pytest.mark.parametrize("direction", ["stable", "unstable"])
def test_protocol_boundaries(ramp, direction):
    p = Protocol(omega0=1.3, tau=7.0, ramp=ramp, direction=direction)
    start, end = ramp_eval(p, 0), ramp_eval(p, 7.0)
    if direction == "stable":
        assert start == (0.0, 1.3) and end == (1.3, 0.0)
    else:
        assert start == (1.3, 0.0) and end == (0.0, 1.3)


def test_smoothstep_midpoint():
    assert ramp_eval(Protocol(tau=2.0, ramp="smoothstep"), 1.0) == pytest.approx((0.5, 0.5))


@pytest.mark.parametrize(
    "kwargs", [{"omega0": 0}, {"tau": -1}, {"hold": -1}, {"ramp": "cubic"}, {"direction": "sideways"}]
)
def test_protocol_rejects(kwargs):
    with pytest.raises((InputError, ValueError)):
        Protocol(**kwargs)


def test_h_int_structure():
    assert np.array_equal(h_int(0, 0), np.zeros((3, 3)))
    m = h_int(1, 0)
    assert m[0, 1] == m[1, 0] == 1 and np.count_nonzero(m) == 2
    assert np.allclose(eig3_hermitian(h_int(1, 1))[0], [-np.sqrt(2), 0, np.sqrt(2)])


def test_eigensystem_examples():
    e = eigensystem(0, 1)
    assert np.array_equal(e.dark, [1, 0, 0])
    assert same_ray(eigensystem(1, 0).dark, [0, 0, -1])
    assert np.allclose(eigensystem(1, 0).dark, [0, 0, -1])
    e = eigensystem(1, 1)
    assert e.delta == pytest.approx(np.sqrt(2))
    assert np.allclose(e.dark, np.array([1, 0, -1]) / np.sqrt(2))


def test_eigensystem_degenerate():
    with pytest.raises(DegenerateInputError):
        eigensystem(0, 0)


@settings(max_examples=300, deadline=None)
@given(couplings, couplings)
def test_eigensystem_properties(a, b):
    es = eigensystem(a, b)
    h = h_int(a, b)
    assert es.delta**2 == pytest.approx(a * a + b * b)
    basis = np.column_stack(es.states)
    assert np.allclose(basis.conj().T @ basis, np.eye(3), atol=1e-12)
    assert np.linalg.norm(h @ es.dark) < 1e-12 * max(1, es.delta)
    assert np.linalg.norm(h @ es.plus - es.delta * es.plus) < 1e-12 * max(1, es.delta)
    assert np.linalg.norm(h @ es.minus + es.delta * es.minus) < 1e-12 * max(1, es.delta)
    w, v = eig3_hermitian(h)
    assert np.allclose(w, es.energies, atol=1e-10)
    for k, state in enumerate(es.states):
        assert same_ray(v[:, k], state)
    assert np.trace(h) == 0
