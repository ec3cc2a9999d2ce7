"""JSON file formats.

Mode labels are 1-based in every file format (A=1, B=2, ...) and 0-based in
the Python API; conversion happens here.  Floats are serialized with their
shortest round-tripping representation, so write(read(f)) is value-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .circuit import CircuitSpec
from .partitions import TREE_PRESETS, TreeSpec
from .symplectic import CovarianceMatrix
from .witness import Witness


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


# -- covariance matrices ----------------------------------------------------

def cm_to_dict(gamma: CovarianceMatrix) -> dict:
    return {
        "n_modes": gamma.n_modes,
        "ordering": "xpxp",
        "matrix": [[float(v) for v in row] for row in gamma.matrix],
    }


def cm_from_dict(d: dict) -> CovarianceMatrix:
    if d.get("ordering") != "xpxp":
        raise ValueError(f"unsupported quadrature ordering {d.get('ordering')!r}")
    return CovarianceMatrix(n_modes=int(d["n_modes"]), matrix=np.array(d["matrix"], dtype=float))


# -- trees ------------------------------------------------------------------

def tree_to_dict(tree: TreeSpec) -> dict:
    return {
        "n_modes": tree.n_modes,
        "edges": [[u + 1, v + 1] for u, v in sorted(tree.edges)],
    }


def tree_from_dict(d: dict) -> TreeSpec:
    edges = frozenset((int(u) - 1, int(v) - 1) for u, v in d["edges"])
    return TreeSpec(n_modes=int(d["n_modes"]), edges=edges)


def resolve_tree(spec: str) -> TreeSpec:
    """A preset name ("chain3", "chain4", "tshape4") or a JSON file path."""
    if spec in TREE_PRESETS:
        return TREE_PRESETS[spec]
    path = Path(spec)
    if path.exists():
        return tree_from_dict(read_json(path))
    raise ValueError(
        f"unknown tree {spec!r}: not a preset ({', '.join(sorted(TREE_PRESETS))}) or file"
    )


# -- witnesses ----------------------------------------------------------------

def witness_to_dict(z: Witness) -> dict:
    return {
        "n_modes": z.n_modes,
        "matrix": [[float(v) for v in row] for row in z.matrix],
        "blind_blocks": [[i + 1, j + 1] for i, j in sorted(z.blind_blocks)],
    }


def witness_from_dict(d: dict) -> Witness:
    blind = frozenset((int(i) - 1, int(j) - 1) for i, j in d.get("blind_blocks", []))
    return Witness(
        n_modes=int(d["n_modes"]),
        matrix=np.array(d["matrix"], dtype=float),
        blind_blocks=blind,
    )


# -- circuits -----------------------------------------------------------------

def circuit_to_dict(circuit: CircuitSpec) -> dict:
    elements = []
    for el in circuit.elements:
        el = dict(el)
        if "mode" in el:
            el["mode"] = int(el["mode"]) + 1
        if "pair" in el:
            el["pair"] = [int(m) + 1 for m in el["pair"]]
        elements.append(el)
    return {"n_modes": circuit.n_modes, "elements": elements}


def circuit_from_dict(d: dict) -> CircuitSpec:
    elements = []
    for el in d["elements"]:
        el = dict(el)
        if "mode" in el:
            el["mode"] = int(el["mode"]) - 1
        if "pair" in el:
            el["pair"] = [int(m) - 1 for m in el["pair"]]
        elements.append(el)
    return CircuitSpec(n_modes=int(d["n_modes"]), elements=elements)


# -- reports and traces -------------------------------------------------------

def ppt_table_dict(table: dict[tuple[int, int], float]) -> dict:
    pairs = sorted(table)
    return {
        "pairs": [[i + 1, j + 1] for i, j in pairs],
        "eps": [float(table[p]) for p in pairs],
    }


def trace_to_dict(trace) -> dict:
    return {
        "config": {
            "n_modes": trace.config.n_modes,
            "tree": tree_to_dict(trace.config.tree),
            "iterations": trace.config.iterations,
            "diag_range": list(trace.config.diag_range),
            "min_eig_floor": trace.config.min_eig_floor,
            "seed": trace.config.seed,
        },
        "status": trace.status,
        "success": trace.success,
        "iterations": [
            {
                "witness_value": rec.witness_value,
                "solver_status": rec.solver_status,
                "gamma": cm_to_dict(rec.gamma),
                "witness": witness_to_dict(rec.witness),
            }
            for rec in trace.records
        ],
    }
