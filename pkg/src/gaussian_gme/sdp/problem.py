"""Problem containers for the dense conic solver.

The native form is

    minimize    <C, X>
    subject to  <A_i, X> = b_i,   i = 1..m,
                X in K,

where K is a product of positive-semidefinite matrix blocks and nonnegative
scalars, and <.,.> is the trace inner product blockwise.  Linear-matrix-
inequality problems (free variables y with F_0 + sum_i y_i F_i >= 0) are the
dual of this form and are posed through :class:`LmiProblem`, which lowers
them onto the same solver and reads the answer off the dual multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
MAX_ITERATIONS = "max-iterations"


@dataclass(frozen=True)
class BlockSpec:
    kind: str  # "psd" | "scalar"
    dim: int

    def __post_init__(self):
        if self.kind not in ("psd", "scalar"):
            raise ValueError(f"unknown block kind {self.kind!r}")
        if self.kind == "scalar" and self.dim != 1:
            raise ValueError("scalar blocks have dim 1")
        if self.dim < 1:
            raise ValueError(f"block dim must be >= 1, got {self.dim}")


@dataclass
class SolverOptions:
    gap_tol: float = 1e-9
    feas_tol: float = 1e-9
    max_iter: int = 200
    step_scale: float = 0.98
    trace_file: str | None = None  # JSON-lines dump of iterates


class SdpProblem:
    """Builder for the native conic form."""

    def __init__(self):
        self.blocks: list[BlockSpec] = []
        self._objective: list = []
        self._eq_coeffs: list[dict[int, np.ndarray | float]] = []
        self._eq_rhs: list[float] = []

    def add_psd_block(self, dim: int) -> int:
        self.blocks.append(BlockSpec("psd", dim))
        self._objective.append(np.zeros((dim, dim)))
        return len(self.blocks) - 1

    def add_scalar_block(self) -> int:
        self.blocks.append(BlockSpec("scalar", 1))
        self._objective.append(0.0)
        return len(self.blocks) - 1

    @property
    def n_equalities(self) -> int:
        return len(self._eq_rhs)

    def set_objective(self, block: int, coeff) -> None:
        self._check_coeff(block, coeff)
        self._objective[block] = self._store(block, coeff)

    def add_equality(self, rhs: float) -> int:
        self._eq_coeffs.append({})
        self._eq_rhs.append(float(rhs))
        return len(self._eq_rhs) - 1

    def set_coefficient(self, equality: int, block: int, coeff) -> None:
        self._check_coeff(block, coeff)
        self._eq_coeffs[equality][block] = self._store(block, coeff)

    def _store(self, block, coeff):
        if self.blocks[block].kind == "scalar":
            return float(coeff)
        c = np.asarray(coeff, dtype=float)
        return 0.5 * (c + c.T)

    def _check_coeff(self, block, coeff) -> None:
        spec = self.blocks[block]
        if spec.kind == "scalar":
            if np.ndim(coeff) != 0:
                raise ValueError("scalar block takes a scalar coefficient")
            return
        c = np.asarray(coeff, dtype=float)
        if c.shape != (spec.dim, spec.dim):
            raise ValueError(
                f"coefficient shape {c.shape} does not match psd block dim {spec.dim}"
            )

    # Dense compilation used by the solver -------------------------------

    def compiled(self):
        """Return (psd_dims, n_scalar, A, b, c) with flat row-major layout."""
        psd_dims = [s.dim for s in self.blocks if s.kind == "psd"]
        n_scalar = sum(1 for s in self.blocks if s.kind == "scalar")
        offsets = {}
        pos = 0
        scalar_pos = sum(d * d for d in psd_dims)
        for i, spec in enumerate(self.blocks):
            if spec.kind == "psd":
                offsets[i] = pos
                pos += spec.dim * spec.dim
            else:
                offsets[i] = scalar_pos
                scalar_pos += 1
        n_total = sum(d * d for d in psd_dims) + n_scalar

        def fill(vec, block, coeff):
            spec = self.blocks[block]
            if spec.kind == "psd":
                vec[offsets[block]: offsets[block] + spec.dim ** 2] = np.ravel(coeff)
            else:
                vec[offsets[block]] = coeff

        c = np.zeros(n_total)
        for i, coeff in enumerate(self._objective):
            fill(c, i, coeff)
        m = len(self._eq_rhs)
        A = np.zeros((m, n_total))
        for r, coeffs in enumerate(self._eq_coeffs):
            for block, coeff in coeffs.items():
                fill(A[r], block, coeff)
        return psd_dims, n_scalar, A, np.array(self._eq_rhs), c


@dataclass
class SdpSolution:
    status: str
    primal_value: float
    dual_value: float
    gap: float
    block_values: list = field(repr=False)
    dual_multipliers: np.ndarray = field(repr=False)
    iterations: int = 0
    message: str = ""

    def value(self, block: int):
        return self.block_values[block]


class LmiProblem:
    """maximize g . y  subject to  F_0^(k) + sum_i y_i F_i^(k) >= 0 blockwise.

    Lowered onto the native form with the LMI as the dual side; the answer is
    read from the dual multipliers.  Scalar LMI rows model interval bounds.
    """

    def __init__(self, n_vars: int):
        self.n_vars = n_vars
        self._objective = np.zeros(n_vars)
        self._blocks: list[tuple[np.ndarray, dict[int, np.ndarray]]] = []
        self._scalar_rows: list[tuple[float, dict[int, float]]] = []

    def set_objective(self, g) -> None:
        g = np.asarray(g, dtype=float)
        if g.shape != (self.n_vars,):
            raise ValueError(f"objective shape {g.shape} != ({self.n_vars},)")
        self._objective = g

    def add_lmi_block(self, f0, terms: dict[int, np.ndarray]) -> None:
        f0 = np.asarray(f0, dtype=float)
        self._blocks.append(
            (0.5 * (f0 + f0.T), {i: 0.5 * (np.asarray(f) + np.asarray(f).T) for i, f in terms.items()})
        )

    def add_scalar_row(self, f0: float, terms: dict[int, float]) -> None:
        self._scalar_rows.append((float(f0), {i: float(v) for i, v in terms.items()}))

    def lowered(self) -> SdpProblem:
        prob = SdpProblem()
        handles = []
        for f0, _ in self._blocks:
            handles.append(prob.add_psd_block(f0.shape[0]))
        scalar_handles = [prob.add_scalar_block() for _ in self._scalar_rows]
        for var in range(self.n_vars):
            eq = prob.add_equality(self._objective[var])
            for h, (_, terms) in zip(handles, self._blocks):
                if var in terms:
                    prob.set_coefficient(eq, h, -terms[var])
            for h, (_, terms) in zip(scalar_handles, self._scalar_rows):
                if var in terms:
                    prob.set_coefficient(eq, h, -terms[var])
        for h, (f0, _) in zip(handles, self._blocks):
            prob.set_objective(h, f0)
        for h, (f0, _) in zip(scalar_handles, self._scalar_rows):
            prob.set_objective(h, f0)
        return prob

    def solve(self, options: SolverOptions | None = None) -> "LmiSolution":
        from .solver import solve

        sol = solve(self.lowered(), options)
        # The native problem is the dual of the LMI, so the status flips.
        status = {
            OPTIMAL: OPTIMAL,
            INFEASIBLE: UNBOUNDED,
            UNBOUNDED: INFEASIBLE,
            MAX_ITERATIONS: MAX_ITERATIONS,
        }[sol.status]
        y = np.array(sol.dual_multipliers)
        value = float(self._objective @ y) if status == OPTIMAL else np.nan
        return LmiSolution(status=status, y=y, objective=value, native=sol)


@dataclass
class LmiSolution:
    status: str
    y: np.ndarray
    objective: float
    native: SdpSolution
