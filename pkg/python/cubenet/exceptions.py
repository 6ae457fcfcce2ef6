from typing import Any

from .interface import EXIT_CODES, EXIT_VALIDATION, ErrorCode


class _CubenetError(Exception):
    def __init__(self, *args: Any):
        self._error_code = ErrorCode[type(self).__name__]
        super().__init__(*args)

    @property
    def error_code(self) -> ErrorCode:
        return self._error_code

    @property
    def exit_code(self) -> int:
        return EXIT_CODES.get(self._error_code, EXIT_VALIDATION)


class InvalidRational(_CubenetError):
    pass


class DegenerateSegment(_CubenetError):
    pass


class EmptyBoxList(_CubenetError):
    pass


class InvalidLink(_CubenetError):
    pass


class SizeLimitExceeded(_CubenetError):
    def __init__(self, node_count: int, node_cap: int):
        super().__init__(
            f"Network would have {node_count} nodes, "
            f"which exceeds the node cap of {node_cap}."
        )
        self.node_count = node_count
        self.node_cap = node_cap


class PreconditionFailed(_CubenetError):
    pass


class InvalidProblem(_CubenetError):
    def __init__(self, field: str, detail: str = ""):
        message = f"Constraint '{field}' violated"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.field = field


class InvalidAllocation(_CubenetError):
    pass


class InvalidSelector(_CubenetError):
    pass


class SchemaError(_CubenetError):
    pass


class VerificationFailed(_CubenetError):
    pass


class InternalFailure(_CubenetError):
    pass
