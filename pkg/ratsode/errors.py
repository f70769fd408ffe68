from __future__ import annotations


class RatsodeError(Exception):
    pass


class ParseError(RatsodeError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class ProblemFormatError(RatsodeError):
    def __init__(self, message: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line


class DegenerateSample(RatsodeError):
    """Specialization dropped the degree or lost squarefreeness; draw another z0."""


class GenusVerdictError(RatsodeError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ReducibleSuspected(GenusVerdictError):
    pass


class InconsistentGenus(GenusVerdictError):
    pass


class ResourceCapError(RatsodeError):
    pass


class BlowupDepthExceeded(ResourceCapError):
    pass


class GenericPositionFailure(ResourceCapError):
    pass


class ClusterCapExceeded(ResourceCapError):
    pass


class NotSupported(RatsodeError):
    pass


class FuchsViolation(RatsodeError):
    pass


class DegenerateSolution(RatsodeError):
    pass


class NotConstantCase(RatsodeError):
    pass
