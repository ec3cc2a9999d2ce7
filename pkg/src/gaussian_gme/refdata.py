"""Bundled reference dataset: published benchmark states and witnesses.

Covariance matrices are stored exactly as published (rounded to two decimal
places, witnesses to three significant decimals times 1e-2), together with
the accompanying scalar tables.  A checksum test guards the tables against
accidental edits; see ``checksum``.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .partitions import TREE_PRESETS
from .symplectic import CovarianceMatrix
from .witness import Witness

# Three-mode state detectable from the chain A-B-C marginals.
GAMMA3 = CovarianceMatrix.from_matrix([
    [1.34, 0.00, -0.35, 0.00, -0.82, 0.00],
    [0.00, 10.00, 0.00, 8.45, 0.00, 1.87],
    [-0.35, 0.00, 7.80, 0.00, -8.05, 0.00],
    [0.00, 8.45, 0.00, 7.92, 0.00, 2.09],
    [-0.82, 0.00, -8.05, 0.00, 10.00, 0.00],
    [0.00, 1.87, 0.00, 2.09, 0.00, 1.62],
])

Z3 = Witness.from_matrix(
    1e-2 * np.array([
        [6.8, 0.0, -0.4, 0.0, 0.0, 0.0],
        [0.0, 34.3, 0.0, -39.5, 0.0, 0.0],
        [-0.4, 0.0, 25.1, 0.0, 20.9, 0.0],
        [0.0, -39.5, 0.0, 46.1, 0.0, -2.0],
        [0.0, 0.0, 20.9, 0.0, 17.5, 0.0],
        [0.0, 0.0, 0.0, -2.0, 0.0, 6.6],
    ]),
    blind_blocks={(0, 2)},
)

# Four-mode state for the linear tree A-B-C-D.
GAMMA4_LINEAR = CovarianceMatrix.from_matrix([
    [2.83, 0.00, -0.02, 0.00, -1.38, 0.00, 2.83, 0.00],
    [0.00, 7.18, 0.00, 8.06, 0.00, 7.09, 0.00, -4.12],
    [-0.02, 0.00, 3.91, 0.00, -2.46, 0.00, 4.73, 0.00],
    [0.00, 8.06, 0.00, 9.79, 0.00, 8.47, 0.00, -4.81],
    [-1.38, 0.00, -2.46, 0.00, 2.58, 0.00, -4.68, 0.00],
    [0.00, 7.09, 0.00, 8.47, 0.00, 10.00, 0.00, -3.08],
    [2.83, 0.00, 4.73, 0.00, -4.68, 0.00, 10.00, 0.00],
    [0.00, -4.12, 0.00, -4.81, 0.00, -3.08, 0.00, 3.22],
])

Z4_LINEAR = Witness.from_matrix(
    1e-2 * np.array([
        [2.70, 0.00, -1.12, 0.00, 0.00, 0.00, 0.00, 0.00],
        [0.00, 33.29, 0.00, -28.67, 0.00, 0.00, 0.00, 0.00],
        [-1.12, 0.00, 6.86, 0.00, 6.30, 0.00, 0.00, 0.00],
        [0.00, -28.67, 0.00, 29.50, 0.00, -5.46, 0.00, 0.00],
        [0.00, 0.00, 6.30, 0.00, 74.73, 0.00, 33.42, 0.00],
        [0.00, 0.00, 0.00, -5.46, 0.00, 7.37, 0.00, 2.18],
        [0.00, 0.00, 0.00, 0.00, 33.42, 0.00, 16.30, 0.00],
        [0.00, 0.00, 0.00, 0.00, 0.00, 2.18, 0.00, 4.11],
    ]),
    blind_blocks={(0, 2), (0, 3), (1, 3)},
)

# Four-mode state for the 't'-shaped tree with hub B.
GAMMA4_TSHAPE = CovarianceMatrix.from_matrix([
    [5.23, 0.00, 0.45, 0.00, -0.02, 0.00, -2.43, 0.00],
    [0.00, 1.16, 0.00, 3.00, 0.00, 1.15, 0.00, 0.51],
    [0.45, 0.00, 3.35, 0.00, 0.91, 0.00, -5.20, 0.00],
    [0.00, 3.00, 0.00, 10.00, 0.00, 3.52, 0.00, 2.06],
    [-0.02, 0.00, 0.91, 0.00, 4.09, 0.00, -2.97, 0.00],
    [0.00, 1.15, 0.00, 3.52, 0.00, 1.62, 0.00, 0.62],
    [-2.43, 0.00, -5.20, 0.00, -2.97, 0.00, 10.00, 0.00],
    [0.00, 0.51, 0.00, 2.06, 0.00, 0.62, 0.00, 1.49],
])

Z4_TSHAPE = Witness.from_matrix(
    1e-2 * np.array([
        [1.984, 0.0, -0.815, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 76.150, 0.0, -26.031, 0.0, 0.0, 0.0, 0.0],
        [-0.815, 0.0, 37.883, 0.0, -1.525, 0.0, 19.701, 0.0],
        [0.0, -26.031, 0.0, 18.014, 0.0, -22.092, 0.0, -0.760],
        [0.0, 0.0, -1.525, 0.0, 2.895, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -22.092, 0.0, 54.640, 0.0, 0.0],
        [0.0, 0.0, 19.701, 0.0, 0.0, 0.0, 10.563, 0.0],
        [0.0, 0.0, 0.0, -0.760, 0.0, 0.0, 0.0, 3.149],
    ]),
    blind_blocks={(0, 2), (0, 3), (2, 3)},
)

# Output of the full thermal-input circuit run with 3-decimal parameters.
GAMMA3_CIRCUIT = CovarianceMatrix.from_matrix([
    [1.34, 0.00, -0.35, 0.00, -0.82, 0.00],
    [0.00, 10.01, 0.00, 8.45, 0.00, 1.86],
    [-0.35, 0.00, 7.78, 0.00, -8.03, 0.00],
    [0.00, 8.45, 0.00, 7.92, 0.00, 2.08],
    [-0.82, 0.00, -8.03, 0.00, 9.99, 0.00],
    [0.00, 1.86, 0.00, 2.08, 0.00, 1.62],
])

Z3_CIRCUIT = Witness.from_matrix(
    1e-2 * np.array([
        [6.86, 0.00, -0.45, 0.00, 0.00, 0.00],
        [0.00, 34.11, 0.00, -39.31, 0.00, 0.00],
        [-0.45, 0.00, 25.04, 0.00, 20.87, 0.00],
        [0.00, -39.31, 0.00, 45.92, 0.00, -2.05],
        [0.00, 0.00, 20.87, 0.00, 17.43, 0.00],
        [0.00, 0.00, 0.00, -2.05, 0.00, 6.62],
    ]),
    blind_blocks={(0, 2)},
)

# Output of the simplified circuit (squeezed vacua, correlated displacements).
GAMMA3_SIMPLIFIED = CovarianceMatrix.from_matrix([
    [1.39, 0.00, -0.21, 0.00, -1.05, 0.00],
    [0.00, 9.95, 0.00, 8.26, 0.00, 1.70],
    [-0.21, 0.00, 7.36, 0.00, -7.83, 0.00],
    [0.00, 8.26, 0.00, 7.63, 0.00, 1.94],
    [-1.05, 0.00, -7.83, 0.00, 10.12, 0.00],
    [0.00, 1.70, 0.00, 1.94, 0.00, 1.59],
])

Z3_SIMPLIFIED = Witness.from_matrix(
    1e-2 * np.array([
        [5.87, 0.00, -0.54, 0.00, 0.00, 0.00],
        [0.00, 33.71, 0.00, -39.60, 0.00, 0.00],
        [-0.54, 0.00, 26.22, 0.00, 21.01, 0.00],
        [0.00, -39.60, 0.00, 47.10, 0.00, -1.87],
        [0.00, 0.00, 21.01, 0.00, 16.86, 0.00],
        [0.00, 0.00, 0.00, -1.87, 0.00, 6.17],
    ]),
    blind_blocks={(0, 2)},
)

# PPT tables: minimal eigenvalue of the partially transposed two-mode
# marginal plus i*Omega_2, keyed by 0-based mode pair.
PPT_GAMMA3 = {(0, 1): 0.002, (0, 2): 0.849, (1, 2): 0.004}
PPT_GAMMA4_LINEAR = {
    (0, 1): 0.005, (0, 2): 0.347, (0, 3): 0.213,
    (1, 2): 0.004, (1, 3): 0.087, (2, 3): 0.224,
}
PPT_GAMMA4_TSHAPE = {
    (0, 1): 0.0481, (0, 2): 0.0032, (0, 3): 0.5256,
    (1, 2): 0.1103, (1, 3): 0.0001, (2, 3): 0.5489,
}
PPT_GAMMA3_CIRCUIT = {(0, 1): 0.005, (0, 2): 0.852, (1, 2): 0.010}
PPT_GAMMA3_SIMPLIFIED = {(0, 1): 0.027, (0, 2): 0.862, (1, 2): 0.037}

# Witness means Tr[gamma Z] - 1 for the pairs above.
WITNESS_VALUES = {
    "gamma3": -0.143,
    "gamma4_linear": -0.069,
    "gamma4_tshape": -0.068,
    "gamma3_circuit": -0.138,
    "gamma3_simplified": -0.139,
}

# Circuit decomposition of GAMMA3: symplectic eigenvalues, per-mode squeeze
# factors, beam-splitter amplitude transmissivities and displacement gains.
NU_GAMMA3 = (6.835, 1.012, 1.004)
SQUEEZE_GAMMA3 = (0.396, 0.851, 0.478)
TRANSMISSIVITY_IN = {(0, 1): 0.555, (0, 2): 0.947, (1, 2): 0.492}
TRANSMISSIVITY_OUT = {(0, 1): 0.716, (0, 2): 0.904, (1, 2): 0.657}
DISPLACEMENT_ALPHA = (0.2, -0.7, 1.3)
DISPLACEMENT_BETA = (1.3, -0.5, 0.3)

CHAIN3 = TREE_PRESETS["chain3"]
CHAIN4 = TREE_PRESETS["chain4"]
TSHAPE4 = TREE_PRESETS["tshape4"]

STATES = {
    "gamma3": (GAMMA3, Z3, CHAIN3, PPT_GAMMA3),
    "gamma4_linear": (GAMMA4_LINEAR, Z4_LINEAR, CHAIN4, PPT_GAMMA4_LINEAR),
    "gamma4_tshape": (GAMMA4_TSHAPE, Z4_TSHAPE, TSHAPE4, PPT_GAMMA4_TSHAPE),
    "gamma3_circuit": (GAMMA3_CIRCUIT, Z3_CIRCUIT, CHAIN3, PPT_GAMMA3_CIRCUIT),
    "gamma3_simplified": (GAMMA3_SIMPLIFIED, Z3_SIMPLIFIED, CHAIN3, PPT_GAMMA3_SIMPLIFIED),
}


def reference_circuit(simplified: bool = False):
    """Preparation circuit assembled from the published table parameters.

    Simulating the full circuit reproduces GAMMA3_CIRCUIT (and closely
    approximates GAMMA3); the simplified one reproduces GAMMA3_SIMPLIFIED.
    """
    from .circuit import CircuitSpec

    squeezers = [
        {"type": "squeezer", "mode": 0, "x_scale": SQUEEZE_GAMMA3[0]},
        {"type": "squeezer", "mode": 1, "x_scale": 1.0 / SQUEEZE_GAMMA3[1]},
        {"type": "squeezer", "mode": 2, "x_scale": 1.0 / SQUEEZE_GAMMA3[2]},
    ]
    out_stage = [
        {"type": "bs", "side": "V", "pair": [1, 2], "t": TRANSMISSIVITY_OUT[(1, 2)]},
        {"type": "bs", "side": "V", "pair": [0, 2], "t": TRANSMISSIVITY_OUT[(0, 2)]},
        {"type": "bs", "side": "V", "pair": [0, 1], "t": TRANSMISSIVITY_OUT[(0, 1)]},
    ]
    if simplified:
        elements = squeezers + [{
            "type": "displace",
            "alpha": list(DISPLACEMENT_ALPHA),
            "beta": list(DISPLACEMENT_BETA),
            "var": (NU_GAMMA3[0] - 1.0) / 2.0,
        }] + out_stage
    else:
        elements = [{"type": "inputs", "nu": list(NU_GAMMA3)}] + [
            {"type": "bs", "side": "U", "pair": [0, 1], "t": TRANSMISSIVITY_IN[(0, 1)]},
            {"type": "bs", "side": "U", "pair": [0, 2], "t": TRANSMISSIVITY_IN[(0, 2)]},
            {"type": "bs", "side": "U", "pair": [1, 2], "t": TRANSMISSIVITY_IN[(1, 2)]},
        ] + squeezers + out_stage
    return CircuitSpec(n_modes=3, elements=elements)


def checksum() -> str:
    """SHA-256 over a canonical rendering of every numeric table."""
    parts = []
    for name in sorted(STATES):
        gamma, z, _, table = STATES[name]
        parts.append(name)
        parts.extend(f"{v:.6f}" for v in gamma.matrix.ravel())
        parts.extend(f"{v:.6f}" for v in z.matrix.ravel())
        parts.extend(f"{i},{j},{v:.6f}" for (i, j), v in sorted(table.items()))
    parts.extend(f"{v:.6f}" for v in NU_GAMMA3 + SQUEEZE_GAMMA3)
    parts.extend(f"{v:.6f}" for v in DISPLACEMENT_ALPHA + DISPLACEMENT_BETA)
    parts.extend(
        f"{i},{j},{v:.6f}"
        for table in (TRANSMISSIVITY_IN, TRANSMISSIVITY_OUT)
        for (i, j), v in sorted(table.items())
    )
    parts.extend(f"{name}={value:.6f}" for name, value in sorted(WITNESS_VALUES.items()))
    return hashlib.sha256("|".join(parts).encode()).hexdigest()
