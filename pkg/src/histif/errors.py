"""Exception hierarchy shared by all engine modules."""


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(EngineError):
    """Unknown relation/attribute or arity mismatch."""


class ExprTypeError(EngineError):
    """Operands of an expression or condition have incompatible types."""


class ParseError(EngineError):
    """Statement DSL syntax error, with position information."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class BindError(EngineError):
    """Statement refers to a relation or attribute that does not exist."""


class CompileError(EngineError):
    """Condition cannot be translated into linear constraints."""


class DomainSizeError(EngineError):
    """Brute-force enumeration domain exceeds the safety cap."""


class WorkloadError(EngineError):
    """Workload specification is inconsistent or infeasible."""
