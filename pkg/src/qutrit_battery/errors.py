"""Exception types raised across the package."""


class InputError(ValueError):
    """An argument is outside the domain an operation accepts."""


class DegenerateInputError(InputError):
    """The requested quantity is undefined at this input (e.g. zero drive)."""


class NumericError(ArithmeticError):
    """A numerical routine failed to converge or produced non-finite values."""


class IntegrationDiverged(NumericError):
    """A sampled state failed validation during time evolution."""

    def __init__(self, t, report):
        self.t = t
        self.report = report
        super().__init__(
            f"state invalid at t={t:.6g}: trace_error={report.trace_error:.3e}, "
            f"hermiticity_error={report.hermiticity_error:.3e}, "
            f"min_eigenvalue={report.min_eigenvalue:.3e}"
        )


class ConfigError(ValueError):
    """Experiment configuration is inconsistent or out of range."""


class ConfigParseError(ConfigError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")
