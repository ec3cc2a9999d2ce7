"""Alternating search for states with separable marginals yet blind-detectable
genuine multipartite entanglement.

Each round solves two programs: the blind witness for the current state, then
a state update minimizing the witness mean over all physical covariance
matrices with every two-mode marginal PPT-separable, no x-p correlations,
bounded diagonal and a floor on the smallest eigenvalue.  The witness mean is
non-increasing along the alternation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .partitions import TreeSpec, validate_tree
from .sdp import INFEASIBLE, OPTIMAL, LmiProblem, SolverOptions, embed_hermitian
from .symplectic import CovarianceMatrix, omega, ppt_table
from .witness import (
    InfeasibleProgram,
    SdpFailure,
    Witness,
    WitnessResult,
    gme_witness,
    random_orthogonal,
)


def random_pure_phase_free(n_modes: int, rng) -> CovarianceMatrix:
    """Random pure state without x-p correlations: interleave(G, G^{-1}).

    G = Q^T D Q with Q Haar orthogonal and D log-uniform in [1/3, 3]; the
    bounded initial squeezing keeps the first witness solve well conditioned.
    All symplectic eigenvalues equal one by construction.
    """
    if n_modes < 1:
        raise ValueError(f"n_modes must be >= 1, got {n_modes}")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    q = random_orthogonal(n_modes, rng)
    d = np.exp(rng.uniform(np.log(1.0 / 3.0), np.log(3.0), n_modes))
    g = q.T @ np.diag(d) @ q
    g_inv = q.T @ np.diag(1.0 / d) @ q
    m = np.zeros((2 * n_modes, 2 * n_modes))
    m[0::2, 0::2] = g
    m[1::2, 1::2] = g_inv
    return CovarianceMatrix(n_modes, m)


@dataclass(frozen=True)
class SearchConfig:
    n_modes: int
    tree: TreeSpec
    iterations: int = 10
    diag_range: tuple[float, float] = (1.0, 10.0)
    min_eig_floor: float = 0.2
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.diag_range
        if lo < 1.0 or hi <= lo:
            raise ValueError(f"diagonal range must satisfy 1 <= lo < hi, got {self.diag_range}")
        if not 0.0 < self.min_eig_floor < 1.0:
            raise ValueError(f"eigenvalue floor must lie in (0, 1), got {self.min_eig_floor}")
        if self.iterations < 1:
            raise ValueError("need at least one iteration")
        if self.tree.n_modes != self.n_modes:
            raise ValueError("tree does not match n_modes")
        ok, reason = validate_tree(self.tree)
        if not ok:
            raise ValueError(f"invalid tree: {reason}")


@dataclass
class SearchRecord:
    witness_value: float
    gamma: CovarianceMatrix
    witness: Witness
    solver_status: str


@dataclass
class SearchTrace:
    config: SearchConfig
    records: list[SearchRecord] = field(default_factory=list)
    status: str = "ok"

    @property
    def final_gamma(self) -> CovarianceMatrix:
        return self.records[-1].gamma

    @property
    def final_witness(self) -> Witness:
        return self.records[-1].witness

    @property
    def final_value(self) -> float:
        return self.records[-1].witness_value

    @property
    def success(self) -> bool:
        if not self.records:
            return False
        eps = ppt_table(self.final_gamma).values()
        return self.final_value < -1e-4 and all(e >= -1e-7 for e in eps)


def _phase_free_entries(n_modes: int) -> list[tuple[int, int]]:
    """Upper-triangular positions of the x and p sectors (x-p entries excluded)."""
    entries = []
    for sector in (0, 1):
        for i in range(n_modes):
            for j in range(i, n_modes):
                entries.append((2 * i + sector, 2 * j + sector))
    return entries


def step2_sdp(
    z: Witness,
    config: SearchConfig,
    options: SolverOptions | None = None,
) -> CovarianceMatrix:
    """State update: minimize Tr[gamma Z] over admissible covariance matrices.

    Constraints: gamma + i Omega >= 0; every partially transposed two-mode
    marginal plus i Omega_2 >= 0; no x-p correlations (those entries are not
    variables); diagonal entries within ``config.diag_range``; and
    gamma >= min_eig_floor * I.
    """
    n = config.n_modes
    if z.n_modes != n:
        raise ValueError("witness does not match n_modes")
    dim = 2 * n
    entries = _phase_free_entries(n)
    nv = len(entries)
    lo, hi = config.diag_range

    def basis(r, c):
        e = np.zeros((dim, dim))
        e[r, c] = 1.0
        e[c, r] = 1.0
        return e

    lmi = LmiProblem(nv)
    g = np.zeros(nv)
    for i, (r, c) in enumerate(entries):
        g[i] = -float(np.sum(basis(r, c) * z.matrix))  # maximize -Tr[gamma Z]
    lmi.set_objective(g)

    emb_full = embed_hermitian(dim)
    lmi.add_lmi_block(
        emb_full.embed(1j * omega(n)),
        {i: emb_full.embed(basis(r, c)) for i, (r, c) in enumerate(entries)},
    )

    emb_pair = embed_hermitian(4)
    pt = np.diag([1.0, -1.0, 1.0, 1.0])
    for j in range(n):
        for k in range(j + 1, n):
            idx = [2 * j, 2 * j + 1, 2 * k, 2 * k + 1]
            terms = {}
            for i, (r, c) in enumerate(entries):
                sub = basis(r, c)[np.ix_(idx, idx)]
                if np.any(sub):
                    terms[i] = emb_pair.embed(pt @ sub @ pt)
            lmi.add_lmi_block(emb_pair.embed(1j * omega(2)), terms)

    lmi.add_lmi_block(
        -config.min_eig_floor * np.eye(dim),
        {i: basis(r, c) for i, (r, c) in enumerate(entries)},
    )

    diag_vars = {d: i for i, (r, c) in enumerate(entries) if r == c for d in [r]}
    for d in range(dim):
        i = diag_vars[d]
        lmi.add_scalar_row(-lo, {i: 1.0})
        lmi.add_scalar_row(hi, {i: -1.0})

    sol = lmi.solve(options)
    if sol.status == INFEASIBLE:
        raise InfeasibleProgram(sol.status, "state constraints are infeasible")
    if sol.status != OPTIMAL:
        raise SdpFailure(sol.status, sol.native.message)

    gamma = np.zeros((dim, dim))
    for i, (r, c) in enumerate(entries):
        gamma[r, c] = sol.y[i]
        gamma[c, r] = sol.y[i]
    return CovarianceMatrix(n, gamma)


def search(config: SearchConfig, options: SolverOptions | None = None) -> SearchTrace:
    """Alternate witness and state updates from a random pure start.

    Stops after ``config.iterations`` rounds or when the witness value moves
    by less than 1e-6; a solver failure ends the run with the partial trace.
    """
    rng = np.random.default_rng(config.seed)
    gamma = random_pure_phase_free(config.n_modes, rng)
    trace = SearchTrace(config=config)
    for it in range(config.iterations):
        try:
            result: WitnessResult = gme_witness(gamma, config.tree, options)
        except SdpFailure as exc:
            trace.status = f"witness solve failed at iteration {it}: {exc}"
            return trace
        trace.records.append(
            SearchRecord(
                witness_value=result.value,
                gamma=gamma,
                witness=result.witness,
                solver_status=result.status,
            )
        )
        if it + 1 >= config.iterations:
            break
        if len(trace.records) >= 2 and abs(
            trace.records[-1].witness_value - trace.records[-2].witness_value
        ) < 1e-6:
            break
        try:
            gamma = step2_sdp(result.witness, config, options)
        except SdpFailure as exc:
            trace.status = f"state update failed at iteration {it}: {exc}"
            return trace
    return trace
