"""Cubic lattice delivery networks: exact congestion analysis and best responses."""
import logging

from .congestion import (  # noqa: F401
    CongestionEvent,
    pairwise_congestion,
    paradox_metrics,
)
from .equilibrium import PlayerProblem, best_response, kt_verify  # noqa: F401
from .interface import CongestionKind, LinkKind, SharingMode  # noqa: F401
from .lattice import (  # noqa: F401
    build_cube,
    build_lattice,
    build_linear,
    build_plane,
    build_two_cube,
)

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())
