import numpy as np

from qutrit_battery import NoiseRates


def random_density_matrix(rng, rank=3):
    x = rng.normal(size=(3, rank)) + 1j * rng.normal(size=(3, rank))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def random_rates(rng):
    return NoiseRates(*rng.uniform(0.0, 2.0, size=5))


def same_ray(a, b, tol=1e-10):
    """States equal up to a global phase."""
    return abs(abs(np.vdot(a, b)) - 1.0) < tol
