"""Bipartitions, marginal trees, and the block-projection operator.

Modes are indexed 0..N-1 in code; file formats use 1-based labels
(A=1, B=2, ...).  A "tree" is a connected acyclic edge set over the modes and
encodes which two-mode marginals are assumed known; the complement edges are
the mode pairs a blind witness must not read.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np


@dataclass(frozen=True)
class Bipartition:
    """A two-set split of modes 0..N-1, stored as the side containing mode 0."""

    n_modes: int
    index_set: frozenset[int]

    def __post_init__(self):
        s = frozenset(self.index_set)
        if not s or len(s) >= self.n_modes:
            raise ValueError("index set must be a nonempty proper subset")
        if any(i < 0 or i >= self.n_modes for i in s):
            raise ValueError(f"mode indices out of range in {sorted(s)}")
        if 0 not in s:
            s = frozenset(range(self.n_modes)) - s
        object.__setattr__(self, "index_set", s)

    @property
    def complement(self) -> frozenset[int]:
        return frozenset(range(self.n_modes)) - self.index_set

    def side_of(self, mode: int) -> int:
        return 0 if mode in self.index_set else 1

    def __str__(self):
        names = [chr(ord("A") + i) for i in range(self.n_modes)]
        left = "".join(names[i] for i in sorted(self.index_set))
        right = "".join(names[i] for i in sorted(self.complement))
        return f"{left}|{right}"


def enumerate_bipartitions(n_modes: int) -> list[Bipartition]:
    """All 2^(N-1) - 1 inequivalent bipartitions.

    Ordered by the size of the smaller side, then lexicographically:
    for N=3 this is A|BC, B|AC, C|AB and for N=4 the four single-mode
    splits followed by AB|CD, AC|BD, AD|BC.
    """
    if n_modes < 2:
        raise ValueError(f"need at least 2 modes, got {n_modes}")
    result = []
    seen = set()
    for size in range(1, n_modes // 2 + 1):
        for subset in combinations(range(n_modes), size):
            part = Bipartition(n_modes, frozenset(subset))
            if part.index_set in seen:
                continue
            seen.add(part.index_set)
            result.append(part)
    assert len(result) == 2 ** (n_modes - 1) - 1
    return result


@dataclass(frozen=True)
class TreeSpec:
    """Edge set over modes 0..N-1 describing a minimal marginal set."""

    n_modes: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop ({u}, {v})")
            if not (0 <= u < self.n_modes and 0 <= v < self.n_modes):
                raise ValueError(f"edge ({u}, {v}) out of range for N={self.n_modes}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))


TREE_PRESETS = {
    "chain3": TreeSpec(3, frozenset({(0, 1), (1, 2)})),
    "chain4": TreeSpec(4, frozenset({(0, 1), (1, 2), (2, 3)})),
    "tshape4": TreeSpec(4, frozenset({(0, 1), (1, 2), (1, 3)})),
}


def validate_tree(tree: TreeSpec) -> tuple[bool, str]:
    """Check that the edge set is a spanning tree (connected and acyclic)."""
    n = tree.n_modes
    edges = tree.edges
    if len(edges) != n - 1:
        return False, f"a tree on {n} vertices needs {n - 1} edges, got {len(edges)}"
    # n-1 edges + connected implies acyclic, so a reachability sweep suffices.
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != n:
        return False, f"graph is disconnected ({len(seen)} of {n} vertices reachable)"
    return True, "ok"


def blind_pattern(tree: TreeSpec) -> set[tuple[int, int]]:
    """Mode pairs outside the tree: the witness blocks forced to zero.

    The result has (N-1)(N-2)/2 elements for any valid tree on N modes.
    """
    ok, reason = validate_tree(tree)
    if not ok:
        raise ValueError(f"invalid tree: {reason}")
    n = tree.n_modes
    return {
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if (i, j) not in tree.edges
    }


def kept_block_pairs(n_modes: int, part: Bipartition) -> list[tuple[int, int]]:
    """Ordered mode pairs (m <= n) whose 2x2 blocks survive block projection."""
    return [
        (m, n)
        for m in range(n_modes)
        for n in range(m, n_modes)
        if part.side_of(m) == part.side_of(n)
    ]


def block_project(matrix: np.ndarray, part: Bipartition) -> np.ndarray:
    """Zero every 2x2 mode block that crosses the bipartition.

    Keeps block (m, n) exactly when modes m and n lie on the same side.  The
    operator is linear, idempotent and self-adjoint for the trace inner
    product, and preserves (anti)symmetry and Hermiticity.
    """
    m = np.asarray(matrix)
    if m.shape != (2 * part.n_modes, 2 * part.n_modes):
        raise ValueError(
            f"matrix shape {m.shape} does not match N={part.n_modes}"
        )
    side = np.array([part.side_of(k) for k in range(part.n_modes)])
    keep = np.repeat(side, 2)
    mask = keep[:, None] == keep[None, :]
    return np.where(mask, m, 0.0)
