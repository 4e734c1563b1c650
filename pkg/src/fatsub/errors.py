"""Exception types raised across the package."""


class FatsubError(Exception):
    """Base class for every error raised by fatsub."""


class InvalidArgument(FatsubError, ValueError):
    pass


class NotASubalgebra(FatsubError, ValueError):
    pass


class DegenerateBasis(FatsubError, ValueError):
    pass


class CatalogMiss(FatsubError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "catalog miss"


class InvalidMetric(FatsubError, ValueError):
    pass


class IntegrationDiverged(FatsubError, RuntimeError):
    pass
