import logging
from enum import Enum, auto
from typing import List

LOG = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class _AutoName(Enum):
    @staticmethod
    def _generate_next_value_(
        name: str, _start: int, _count: int, _last_values: List[str]
    ) -> str:
        return name


class LinkKind(str, _AutoName):
    Unit = auto()
    PlanarDiagonal = auto()
    SpatialDiagonal = auto()
    LongPlanarDiagonal = auto()
    LongSpatialDiagonal = auto()
    LongEdge = auto()
    Other = auto()


class SharingMode(str, _AutoName):
    Plane = auto()
    Edge = auto()
    Node = auto()


class CongestionKind(str, _AutoName):
    PointCongestion = auto()
    LineCongestion = auto()
    FullCongestion = auto()


class OutputFormat(str, _AutoName):
    json = auto()
    csv = auto()
    dot = auto()
    obj = auto()


class Verdict(str, _AutoName):
    satisfied = auto()
    violated = auto()


class ErrorCode(str, _AutoName):
    InvalidRational = auto()
    DegenerateSegment = auto()
    EmptyBoxList = auto()
    InvalidLink = auto()
    SizeLimitExceeded = auto()
    PreconditionFailed = auto()
    InvalidProblem = auto()
    InvalidAllocation = auto()
    InvalidSelector = auto()
    SchemaError = auto()
    VerificationFailed = auto()
    InternalFailure = auto()


# exit codes of the command line surface, anything unlisted exits with 1
EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SIZE = 2
EXIT_VERIFICATION = 3

EXIT_CODES = {
    ErrorCode.SizeLimitExceeded: EXIT_SIZE,
    ErrorCode.VerificationFailed: EXIT_VERIFICATION,
}
