"""Exception hierarchy shared by all modules."""


class IndicialError(Exception):
    """Base class for every error raised by this package."""


class NumericalFailure(IndicialError):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class NotHermitian(IndicialError, ValueError):
    pass


class ConstructionError(IndicialError, ValueError):
    pass


class InvalidScale(IndicialError, ValueError):
    pass


class SingularPoint(IndicialError, ValueError):
    pass


class DegeneratePencil(IndicialError):
    pass


class WindowError(IndicialError):
    pass


class DegenerateCrossing(IndicialError):
    pass


class NotARoot(IndicialError, ValueError):
    pass


class BoundaryRoot(IndicialError):
    pass


class NotInMaxDomain(IndicialError, ValueError):
    pass


class InvalidLeadingCoefficient(IndicialError, ValueError):
    pass


class ResonantRoots(IndicialError):
    pass


class LagrangianObstruction(IndicialError):
    """No maximal isotropic subspace exists for the boundary form.

    ``signature`` carries sig(a1), the obstruction itself.
    """

    def __init__(self, signature: int):
        super().__init__(f"boundary form has signature {signature}; no Lagrangian subspace")
        self.signature = signature
