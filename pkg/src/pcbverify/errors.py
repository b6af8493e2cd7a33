from __future__ import annotations


class PcbVerifyError(Exception):
    """Base class for every error raised by this package."""


class FormatError(PcbVerifyError, ValueError):
    """A document failed to load. ``locus`` names the line or field at fault."""

    def __init__(self, message: str, locus: str | None = None):
        self.message = message
        self.locus = locus
        super().__init__(f"{locus}: {message}" if locus else message)


class CircuitError(FormatError):
    pass


class KGError(FormatError):
    pass


class TemplateError(FormatError):
    pass


class DataError(PcbVerifyError):
    """Shipped benchmark data is missing or inconsistent."""


class HarnessError(PcbVerifyError):
    """The generator process could not be run or broke the stdio protocol."""


class DomainError(PcbVerifyError, ValueError):
    """A statistics function was called outside its domain."""
