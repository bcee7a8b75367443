"""Exception hierarchy.

Everything raised on purpose by this package derives from
:class:`OptoSqueezeError`. The two branches map onto the CLI exit codes:
:class:`ConfigError` (bad input, exit 1) and :class:`NumericalError`
(the model or a solver failed, exit 2).
"""


class OptoSqueezeError(Exception):
    pass


class ConfigError(OptoSqueezeError, ValueError):
    pass


class NumericalError(OptoSqueezeError, ArithmeticError):
    pass


class NonPositiveRate(ConfigError):
    pass


class NegativeOccupancy(ConfigError):
    pass


class InvalidConfig(ConfigError):
    pass


class StepTooLarge(ConfigError):
    pass


class InsufficientSpan(ConfigError):
    pass


class NonFiniteState(NumericalError):
    pass


class UnstableDrift(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class SingularResolvent(NumericalError):
    pass


class ToleranceNotMet(NumericalError):
    pass


class NonPositiveVariance(NumericalError):
    pass


class SingularCovariance(NumericalError):
    pass


class IsotropicState(NumericalError):
    pass


class ComplexRoot(NumericalError):
    pass


class NoStablePoints(NumericalError):
    pass
