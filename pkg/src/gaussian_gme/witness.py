"""Separability tests and (blind) genuine multipartite entanglement witnesses.

A witness is a real symmetric PSD matrix Z normalized so that
Tr[gamma Z] >= 1 on every (bi)separable covariance matrix; a measured value
below 1 therefore certifies entanglement.  Blind witnesses additionally
carry exact 2x2 zero blocks on the mode pairs outside a marginal tree, so
they read only the tree's two-mode marginals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .partitions import (
    Bipartition,
    TreeSpec,
    blind_pattern,
    enumerate_bipartitions,
    kept_block_pairs,
    validate_tree,
)
from .sdp import (
    OPTIMAL,
    LmiProblem,
    SdpProblem,
    SolverOptions,
    embed_hermitian,
    solve,
)
from .symplectic import CovarianceMatrix, check_physical, omega

ENTANGLEMENT_TOL = 1e-6


class SdpFailure(RuntimeError):
    """A lowered program did not reach an optimal certificate."""

    def __init__(self, status: str, message: str = ""):
        super().__init__(f"solver status {status}: {message}")
        self.status = status


class InfeasibleProgram(SdpFailure):
    pass


@dataclass(frozen=True)
class Witness:
    """Real symmetric PSD 2N x 2N matrix with declared blind mode pairs."""

    n_modes: int
    matrix: np.ndarray = field(repr=False)
    blind_blocks: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (2 * self.n_modes, 2 * self.n_modes):
            raise ValueError(f"matrix shape {m.shape} mismatches N={self.n_modes}")
        m = 0.5 * (m + m.T)
        pairs = frozenset(
            (min(i, j), max(i, j)) for i, j in self.blind_blocks
        )
        for i, j in pairs:
            if i == j or not (0 <= i < self.n_modes and 0 <= j < self.n_modes):
                raise ValueError(f"bad blind pair ({i}, {j})")
            m[2 * i: 2 * i + 2, 2 * j: 2 * j + 2] = 0.0
            m[2 * j: 2 * j + 2, 2 * i: 2 * i + 2] = 0.0
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "blind_blocks", pairs)

    @classmethod
    def from_matrix(cls, matrix, blind_blocks=()) -> "Witness":
        m = np.asarray(matrix, dtype=float)
        return cls(n_modes=m.shape[0] // 2, matrix=m, blind_blocks=frozenset(blind_blocks))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


def evaluate_witness(gamma: CovarianceMatrix, z: Witness) -> float:
    """Tr[gamma Z] - 1, reading gamma only where Z is nonzero."""
    if gamma.n_modes != z.n_modes:
        raise ValueError(
            f"mode mismatch: state has {gamma.n_modes}, witness {z.n_modes}"
        )
    mask = z.matrix != 0.0
    return float(np.sum(gamma.matrix[mask] * z.matrix[mask])) - 1.0


# ---------------------------------------------------------------------------
# Lowering helpers


def _sym_unit(dim: int, r: int, c: int) -> np.ndarray:
    """Symmetric matrix with unit entries at (r, c) and (c, r)."""
    e = np.zeros((dim, dim))
    e[r, c] = 1.0
    e[c, r] = 1.0
    return e


def _entry_data(dim: int, r: int, c: int) -> np.ndarray:
    """Symmetric D with Tr[D X] = X_rc for symmetric X."""
    e = np.zeros((dim, dim))
    if r == c:
        e[r, r] = 1.0
    else:
        e[r, c] = 0.5
        e[c, r] = 0.5
    return e


def _kept_entries(n_modes: int, part: Bipartition) -> list[tuple[int, int]]:
    """Upper-triangular matrix entries inside blocks kept by the projection."""
    out = []
    for m, n in kept_block_pairs(n_modes, part):
        for r in range(2 * m, 2 * m + 2):
            for c in range(2 * n, 2 * n + 2):
                if r <= c:
                    out.append((r, c))
    return out


def _require_physical(gamma: CovarianceMatrix, tol: float = 1e-7) -> None:
    ok, min_eig = check_physical(gamma, tol)
    if not ok:
        raise ValueError(f"state is not physical (min eig {min_eig:.3e})")


def _check_status(sol) -> None:
    if sol.status != OPTIMAL:
        raise SdpFailure(sol.status, sol.message)


# ---------------------------------------------------------------------------
# Separability across one bipartition (primal program and its dual witness)


@dataclass
class SeparabilityResult:
    x_e: float
    separable: bool
    gamma_a: np.ndarray
    gamma_b: np.ndarray


def separability_test(
    gamma: CovarianceMatrix,
    part: Bipartition,
    options: SolverOptions | None = None,
    tol: float = ENTANGLEMENT_TOL,
) -> SeparabilityResult:
    """Decide separability of gamma across ``part``.

    Maximizes x_e subject to gamma - gamma_A (+) gamma_B >= 0 and
    gamma_A (+) gamma_B + (1 + x_e) i Omega >= 0; an optimum x_e >= 0 comes
    with certifying subsystem covariance matrices.
    """
    _require_physical(gamma)
    n = gamma.n_modes
    dim = 2 * n
    w = omega(n)
    emb = embed_hermitian(dim)

    left = sorted(part.index_set)
    right = sorted(part.complement)
    if len(left) + len(right) != n:
        raise ValueError("bipartition does not match the state")

    # Variables: entries of gamma_A and gamma_B (in their original mode
    # slots, upper triangle) followed by x_e.
    entries = []
    for group in (left, right):
        rows = [2 * m + k for m in group for k in range(2)]
        for a in range(len(rows)):
            for b in range(a, len(rows)):
                entries.append((rows[a], rows[b]))
    n_vars = len(entries) + 1
    ix_e = n_vars - 1

    lmi = LmiProblem(n_vars)
    g = np.zeros(n_vars)
    g[ix_e] = 1.0
    lmi.set_objective(g)

    # gamma - gamma_A (+) gamma_B >= 0
    terms1 = {i: -_sym_unit(dim, r, c) for i, (r, c) in enumerate(entries)}
    lmi.add_lmi_block(gamma.matrix, terms1)
    # gamma_A (+) gamma_B + (1 + x_e) i Omega >= 0 (embedded Hermitian)
    terms2 = {i: emb.embed(_sym_unit(dim, r, c)) for i, (r, c) in enumerate(entries)}
    terms2[ix_e] = emb.embed(1j * w)
    lmi.add_lmi_block(emb.embed(1j * w), terms2)

    sol = lmi.solve(options)
    if sol.status != OPTIMAL:
        raise SdpFailure(sol.status, sol.native.message)

    x_e = float(sol.y[ix_e])
    ga = np.zeros((dim, dim))
    for i, (r, c) in enumerate(entries):
        ga[r, c] = sol.y[i]
        ga[c, r] = sol.y[i]
    rows_l = [2 * m + k for m in left for k in range(2)]
    rows_r = [2 * m + k for m in right for k in range(2)]
    return SeparabilityResult(
        x_e=x_e,
        separable=x_e >= -tol,
        gamma_a=ga[np.ix_(rows_l, rows_l)],
        gamma_b=ga[np.ix_(rows_r, rows_r)],
    )


@dataclass
class WitnessResult:
    witness: Witness
    value: float
    status: str = OPTIMAL


def bipartite_witness(
    gamma: CovarianceMatrix,
    part: Bipartition,
    options: SolverOptions | None = None,
) -> WitnessResult:
    """Optimal bipartite witness from the dual separability program.

    Minimizes Tr[gamma X1_re] - 1 over Hermitian PSD X1, X2 with equal real
    block-diagonal parts (w.r.t. ``part``) and Tr[i Omega X2] = -1; the real
    part of X1 is the witness.
    """
    _require_physical(gamma)
    n = gamma.n_modes
    dim = 2 * n
    emb = embed_hermitian(dim)
    w = omega(n)

    prob = SdpProblem()
    b1 = prob.add_psd_block(emb.embedded_dim)
    b2 = prob.add_psd_block(emb.embedded_dim)
    prob.set_objective(b1, 0.5 * emb.real_data(gamma.matrix))

    for r, c in _kept_entries(n, part):
        eq = prob.add_equality(0.0)
        data = emb.real_data(_entry_data(dim, r, c))
        prob.set_coefficient(eq, b1, data)
        prob.set_coefficient(eq, b2, -data)
    eq = prob.add_equality(-1.0)
    prob.set_coefficient(eq, b2, 0.5 * emb.imag_data(w))

    sol = solve(prob, options)
    _check_status(sol)
    z = Witness(n_modes=n, matrix=emb.real_part(sol.value(b1)))
    return WitnessResult(witness=z, value=evaluate_witness(gamma, z), status=sol.status)


def gme_witness(
    gamma: CovarianceMatrix,
    tree: TreeSpec | None = None,
    options: SolverOptions | None = None,
) -> WitnessResult:
    """Optimal genuine-multipartite-entanglement witness, optionally blind.

    Lowers the biseparability dual program: Hermitian PSD blocks X_1..X_{K+1}
    tied by real block-diagonal equality across every bipartition, trace
    couplings Tr[i Omega X_{k+1}] + X_{K+2} - X_{K+3} + X_{K+3+k} = 0 with
    nonnegative scalars, the normalization X_{K+2} - X_{K+3} = 1 and, when a
    tree is given, exact zero blocks of Re X_1 on the tree's complement.
    A negative value certifies genuine N-partite entanglement using only the
    tree's marginals.
    """
    _require_physical(gamma)
    n = gamma.n_modes
    dim = 2 * n
    emb = embed_hermitian(dim)
    w = omega(n)
    parts = enumerate_bipartitions(n)
    kk = len(parts)

    blind: set[tuple[int, int]] = set()
    if tree is not None:
        if tree.n_modes != n:
            raise ValueError("tree does not match the state")
        ok, reason = validate_tree(tree)
        if not ok:
            raise ValueError(f"invalid tree: {reason}")
        blind = blind_pattern(tree)

    prob = SdpProblem()
    x1 = prob.add_psd_block(emb.embedded_dim)
    xk = [prob.add_psd_block(emb.embedded_dim) for _ in range(kk)]
    s_plus = prob.add_scalar_block()
    s_minus = prob.add_scalar_block()
    slacks = [prob.add_scalar_block() for _ in range(kk)]

    prob.set_objective(x1, 0.5 * emb.real_data(gamma.matrix))

    for k, part in enumerate(parts):
        for r, c in _kept_entries(n, part):
            eq = prob.add_equality(0.0)
            data = emb.real_data(_entry_data(dim, r, c))
            prob.set_coefficient(eq, x1, data)
            prob.set_coefficient(eq, xk[k], -data)
        eq = prob.add_equality(0.0)
        prob.set_coefficient(eq, xk[k], 0.5 * emb.imag_data(w))
        prob.set_coefficient(eq, s_plus, 1.0)
        prob.set_coefficient(eq, s_minus, -1.0)
        prob.set_coefficient(eq, slacks[k], 1.0)
    eq = prob.add_equality(1.0)
    prob.set_coefficient(eq, s_plus, 1.0)
    prob.set_coefficient(eq, s_minus, -1.0)

    for i, j in sorted(blind):
        for r in (2 * i, 2 * i + 1):
            for c in (2 * j, 2 * j + 1):
                eq = prob.add_equality(0.0)
                prob.set_coefficient(eq, x1, emb.real_data(_entry_data(dim, r, c)))

    sol = solve(prob, options)
    _check_status(sol)
    z = Witness(n_modes=n, matrix=emb.real_part(sol.value(x1)), blind_blocks=frozenset(blind))
    return WitnessResult(witness=z, value=evaluate_witness(gamma, z), status=sol.status)


# ---------------------------------------------------------------------------
# Witness validation by biseparable sampling


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix via sign-fixed QR."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def sample_biseparable(
    n_modes: int, rng: np.random.Generator, thermal_max: float = 2.0
) -> CovarianceMatrix:
    """Random biseparable CM: a bipartition mixture plus isotropic noise.

    Mixes, over all bipartitions with Dirichlet weights, direct sums of
    random (optionally thermal) phase-free pure factors, then adds mu * I
    with mu in [0, 0.5].  The result is biseparable by construction.
    """
    from .search import random_pure_phase_free

    parts = enumerate_bipartitions(n_modes)
    lam = rng.dirichlet(np.ones(len(parts)))
    total = rng.uniform(0.0, 0.5) * np.eye(2 * n_modes)
    for weight, part in zip(lam, parts):
        block = np.zeros((2 * n_modes, 2 * n_modes))
        for group in (sorted(part.index_set), sorted(part.complement)):
            factor = random_pure_phase_free(len(group), rng).matrix
            factor = rng.uniform(1.0, thermal_max) * factor
            rows = [2 * m + k for m in group for k in range(2)]
            block[np.ix_(rows, rows)] = factor
        total += weight * block
    return CovarianceMatrix(n_modes, total)


@dataclass
class ValidationResult:
    violations: int
    worst: float


def validate_witness(z: Witness, n_samples: int = 1000, seed: int = 0) -> ValidationResult:
    """Count biseparable samples with Tr[gamma Z] < 1 - 1e-6 (must be zero)."""
    rng = np.random.default_rng(seed)
    worst = np.inf
    violations = 0
    for _ in range(n_samples):
        gamma = sample_biseparable(z.n_modes, rng)
        value = float(np.sum(gamma.matrix * z.matrix))
        worst = min(worst, value)
        if value < 1.0 - 1e-6:
            violations += 1
    return ValidationResult(violations=violations, worst=worst)
