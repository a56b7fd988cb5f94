"""Moment relaxation assembly and the built-in interior-point solver."""

from .data import (
    Blocks,
    SdpData,
    a_apply,
    a_adjoint,
    assemble,
    rank_one_lift,
    residuals,
)
from .ipm import SdpSolution, SolveStats, solve_sdp

__all__ = [
    "Blocks",
    "SdpData",
    "assemble",
    "a_apply",
    "a_adjoint",
    "rank_one_lift",
    "residuals",
    "SdpSolution",
    "SolveStats",
    "solve_sdp",
]
