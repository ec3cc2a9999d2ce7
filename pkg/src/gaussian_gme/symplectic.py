"""Covariance-matrix data model and phase-space primitives.

Quadratures are ordered (x_1, p_1, ..., x_N, p_N) and the vacuum state has
unit variances, i.e. its covariance matrix is the identity.  A real symmetric
2N x 2N matrix gamma describes a quantum state exactly when the Hermitian
matrix gamma + i*Omega_N is positive semidefinite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-9


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form Omega_N: direct sum of N blocks [[0, 1], [-1, 0]]."""
    if n_modes < 1:
        raise ValueError(f"n_modes must be >= 1, got {n_modes}")
    w = np.zeros((2 * n_modes, 2 * n_modes))
    for j in range(n_modes):
        w[2 * j, 2 * j + 1] = 1.0
        w[2 * j + 1, 2 * j] = -1.0
    return w


@dataclass(frozen=True)
class CovarianceMatrix:
    """Immutable real symmetric 2N x 2N second-moment matrix.

    Symmetry is enforced on construction; physicality deliberately is not
    (candidate matrices produced during the state search may be unphysical
    and are checked explicitly with :func:`check_physical`).
    """

    n_modes: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")
        if m.shape[0] != 2 * self.n_modes:
            raise ValueError(
                f"matrix is {m.shape[0]}x{m.shape[0]} but n_modes={self.n_modes}"
            )
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix contains non-finite entries")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix) -> "CovarianceMatrix":
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2 != 0:
            raise ValueError(f"expected an even-dimensional square matrix, got {m.shape}")
        return cls(n_modes=m.shape[0] // 2, matrix=m)

    @classmethod
    def vacuum(cls, n_modes: int) -> "CovarianceMatrix":
        return cls(n_modes=n_modes, matrix=np.eye(2 * n_modes))

    def marginal(self, modes) -> "CovarianceMatrix":
        """Principal submatrix for the given modes, keeping the given order."""
        modes = list(modes)
        if len(set(modes)) != len(modes):
            raise ValueError(f"duplicate modes in {modes}")
        if any(m < 0 or m >= self.n_modes for m in modes):
            raise ValueError(f"modes {modes} out of range for N={self.n_modes}")
        idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes])
        return CovarianceMatrix(len(modes), self.matrix[np.ix_(idx, idx)])


def hermitian_min_eigenvalue(gamma: np.ndarray, w: np.ndarray) -> float:
    """Smallest eigenvalue of gamma + i*w for real symmetric gamma, antisymmetric w.

    Computed on the real symmetric embedding [[gamma, -w], [w, gamma]], whose
    spectrum is that of gamma + i*w with every eigenvalue doubled; this keeps
    the whole stack in real arithmetic.
    """
    top = np.hstack([gamma, -w])
    bot = np.hstack([w, gamma])
    return float(np.linalg.eigvalsh(np.vstack([top, bot]))[0])


def check_physical(gamma: CovarianceMatrix, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Heisenberg test: gamma + i*Omega_N >= 0.

    Returns ``(is_physical, min_eig)`` where ``min_eig`` is the smallest
    eigenvalue of gamma + i*Omega_N and ``is_physical`` is ``min_eig >= -tol``.
    """
    g = gamma.matrix
    if not np.array_equal(g, g.T):
        raise ValueError("covariance matrix must be symmetric")
    min_eig = hermitian_min_eigenvalue(g, omega(gamma.n_modes))
    return min_eig >= -tol, min_eig


def partial_transpose(gamma: CovarianceMatrix, mode: int) -> CovarianceMatrix:
    """Flip the sign of the momentum row/column of one mode (an involution)."""
    if mode < 0 or mode >= gamma.n_modes:
        raise ValueError(f"mode {mode} out of range for N={gamma.n_modes}")
    f = np.ones(2 * gamma.n_modes)
    f[2 * mode + 1] = -1.0
    return CovarianceMatrix(gamma.n_modes, gamma.matrix * np.outer(f, f))


def ppt_min_eigenvalue(gamma: CovarianceMatrix, i: int, j: int) -> float:
    """Smallest eigenvalue of gamma_ij^(T_i) + i*Omega_2 for the (i, j) marginal.

    A value >= 0 certifies separability of the two-mode reduced state; the
    two-mode PPT criterion is both necessary and sufficient.
    """
    if i == j:
        raise ValueError("modes must differ")
    marg = gamma.marginal([i, j])
    pt = partial_transpose(marg, 0)
    return hermitian_min_eigenvalue(pt.matrix, omega(2))


def ppt_table(gamma: CovarianceMatrix) -> dict[tuple[int, int], float]:
    """PPT minimal eigenvalue for every unordered mode pair (i < j)."""
    n = gamma.n_modes
    return {
        (i, j): ppt_min_eigenvalue(gamma, i, j)
        for i in range(n)
        for j in range(i + 1, n)
    }


def add_noise(gamma: CovarianceMatrix, p: float) -> CovarianceMatrix:
    """Add isotropic thermal noise: gamma + p*I with p >= 0."""
    if p < 0:
        raise ValueError(f"noise strength must be >= 0, got {p}")
    return CovarianceMatrix(gamma.n_modes, gamma.matrix + p * np.eye(2 * gamma.n_modes))


def has_xp_correlations(gamma: CovarianceMatrix, tol: float = 0.0) -> bool:
    """True when any x-p entry exceeds ``tol`` in magnitude."""
    n = gamma.n_modes
    xs = np.arange(0, 2 * n, 2)
    ps = np.arange(1, 2 * n, 2)
    return bool(np.max(np.abs(gamma.matrix[np.ix_(xs, ps)])) > tol)
