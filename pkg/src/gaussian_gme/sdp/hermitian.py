"""Real embedding of complex Hermitian matrix variables.

A Hermitian H = A + iB (A symmetric, B antisymmetric) is positive
semidefinite exactly when the real symmetric matrix

    E(H) = [[A, -B],
            [B,  A]]

is, and trace inner products carry over as <E(H), E(G)> = 2 Re Tr[H G].
Hermitian solver variables are handled exclusively through this embedding so
the whole stack stays in real arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class HermitianEmbedding:
    dim: int

    @property
    def embedded_dim(self) -> int:
        return 2 * self.dim

    # Trace inner products pick up this factor under the embedding.
    inner_scale: float = 2.0

    def embed(self, h: np.ndarray) -> np.ndarray:
        h = np.asarray(h)
        a, b = np.real(h), np.imag(h)
        return np.block([[a, -b], [b, a]])

    def real_part(self, m: np.ndarray) -> np.ndarray:
        d = self.dim
        a = 0.5 * (m[:d, :d] + m[d:, d:])
        return 0.5 * (a + a.T)

    def imag_part(self, m: np.ndarray) -> np.ndarray:
        d = self.dim
        b = 0.5 * (m[d:, :d] - m[:d, d:])
        return 0.5 * (b - b.T)

    def extract(self, m: np.ndarray) -> np.ndarray:
        """Hermitian matrix represented by an (approximately) structured M."""
        return self.real_part(m) + 1j * self.imag_part(m)

    def real_data(self, d: np.ndarray) -> np.ndarray:
        """Data matrix with <real_data(D), M> = 2 Tr[D ReH] for symmetric D."""
        d = np.asarray(d, dtype=float)
        z = np.zeros_like(d)
        return np.block([[d, z], [z, d]])

    def imag_data(self, b: np.ndarray) -> np.ndarray:
        """Data matrix with <imag_data(B), M> = 2 Tr[(iB) H] for antisymmetric B."""
        b = np.asarray(b, dtype=float)
        z = np.zeros_like(b)
        return np.block([[z, -b], [b, z]])

    def symmetry_constraints(self) -> list[np.ndarray]:
        """Symmetric K_j with <K_j, M> = 0 for all j iff M is structured.

        There are dim*(dim+1) of them: equality of the two diagonal blocks
        and vanishing of the symmetric part of the off-diagonal block.  With
        structured data matrices they are redundant (the solver's iterates
        stay structured), but they define the embedding and are exercised by
        the tests.
        """
        d = self.dim
        out = []
        for r in range(d):
            for c in range(r, d):
                e = np.zeros((d, d))
                e[r, c] = e[c, r] = 1.0
                z = np.zeros((d, d))
                out.append(np.block([[e, z], [z, -e]]))
                out.append(np.block([[z, e], [e, z]]))
        return out


def embed_hermitian(dim: int) -> HermitianEmbedding:
    """Descriptor of the real symmetric embedding of a dim x dim Hermitian block."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return HermitianEmbedding(dim)
