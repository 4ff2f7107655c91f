"""Simulation and analysis of a three-level quantum battery charged adiabatically."""
from .adiabatic import (
    AdiabaticPrediction,
    ergotropy_stable,
    ergotropy_unstable,
    phase_phi,
    predict,
    state_stable,
    state_unstable,
)
from .discharge import DischargeCurve, discharge_curve, ergotropy_closed_form, populations_closed_form
from .errors import (
    ConfigError,
    ConfigParseError,
    DegenerateInputError,
    InputError,
    IntegrationDiverged,
    NumericError,
)
from .linalg import ValidationReport, dm_pure, dm_validate, eig3_hermitian
from .lindblad import (
    NOISELESS,
    EvolutionTrace,
    NoiseRates,
    dissipator_dephasing,
    dissipator_relaxation,
    evolve,
    lindblad_rhs,
    liouvillian_matrix,
    propagate_piecewise_constant,
)
from .model import (
    TRANSMON_SPECTRUM,
    ConstantDrive,
    Direction,
    EigenSystem,
    Protocol,
    Spectrum,
    eigensystem,
    h0,
    h_int,
    ramp_eval,
)
from .observables import ChargeReport, charge_report, energy, ergotropy, p_max, power

__version__ = "0.1.0"
