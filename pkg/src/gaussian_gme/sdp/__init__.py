"""Self-contained dense semidefinite-programming engine."""

from .hermitian import HermitianEmbedding, embed_hermitian
from .problem import (
    INFEASIBLE,
    MAX_ITERATIONS,
    OPTIMAL,
    UNBOUNDED,
    BlockSpec,
    LmiProblem,
    LmiSolution,
    SdpProblem,
    SdpSolution,
    SolverOptions,
)
from .solver import solve

__all__ = [
    "BlockSpec",
    "HermitianEmbedding",
    "INFEASIBLE",
    "LmiProblem",
    "LmiSolution",
    "MAX_ITERATIONS",
    "OPTIMAL",
    "SdpProblem",
    "SdpSolution",
    "SolverOptions",
    "UNBOUNDED",
    "embed_hermitian",
    "solve",
]
