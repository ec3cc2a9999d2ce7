"""Verification of the bundled reference dataset.

Recomputes every published benchmark number from the bundled matrices: PPT
tables, witness means, the optimizer's reproduction of the witness programs,
the circuit decomposition tables, the circuit outputs and the noise scan.
Each check carries its measured value, expectation and tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import refdata as rd
from .circuit import (
    bloch_messiah,
    noise_tolerance,
    reck_decompose,
    simulate,
    williamson,
)
from .symplectic import CovarianceMatrix, ppt_table
from .witness import evaluate_witness, gme_witness, validate_witness

# Pinned checksum of the embedded tables; guards accidental edits.
DATASET_CHECKSUM = "c5c1da36ede1e45ba48420d2d64288f2a3c2e19b8e20c9b550575c778b25dcdd"


@dataclass
class CheckResult:
    name: str
    measured: float
    expected: float
    tol: float

    @property
    def passed(self) -> bool:
        return abs(self.measured - self.expected) <= self.tol

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"[{flag}] {self.name}: measured {self.measured:+.6f}, "
            f"expected {self.expected:+.6f} (tol {self.tol:g})"
        )


def _pair_name(name: str, pair: tuple[int, int]) -> str:
    letters = "ABCD"
    return f"{name} eps_{letters[pair[0]]}{letters[pair[1]]}"


def verify_paper(deep: bool = False) -> list[CheckResult]:
    """Run every reference check; ``deep`` adds the witness-sampler sweeps."""
    checks: list[CheckResult] = []

    same = float(rd.checksum() == DATASET_CHECKSUM)
    checks.append(CheckResult("reference dataset checksum", same, 1.0, 0.0))

    # PPT tables of all bundled states.
    for name, (gamma, _, _, table) in rd.STATES.items():
        got = ppt_table(gamma)
        for pair, expected in sorted(table.items()):
            checks.append(CheckResult(_pair_name(name, pair), got[pair], expected, 1e-3))

    # Witness means of the bundled (state, witness) pairs.
    for name, (gamma, z, _, _) in rd.STATES.items():
        checks.append(
            CheckResult(
                f"{name} witness mean (bundled witness)",
                evaluate_witness(gamma, z),
                rd.WITNESS_VALUES[name],
                3e-3,
            )
        )

    # Witness program reproduces the optimal means on the search states.
    for name in ("gamma3", "gamma4_linear", "gamma4_tshape"):
        gamma, _, tree, _ = rd.STATES[name]
        result = gme_witness(gamma, tree)
        checks.append(
            CheckResult(
                f"{name} witness mean (optimized)",
                result.value,
                rd.WITNESS_VALUES[name],
                2e-3,
            )
        )
        if deep:
            val = validate_witness(result.witness, n_samples=1000, seed=7)
            checks.append(
                CheckResult(
                    f"{name} optimized witness: biseparable violations",
                    float(val.violations), 0.0, 0.0,
                )
            )

    # Decomposition chain on the three-mode state.
    wres = williamson(rd.GAMMA3)
    for j, expected in enumerate(rd.NU_GAMMA3):
        checks.append(
            CheckResult(f"gamma3 thermal input nu_{j + 1}", float(wres.nu[j]), expected, 2e-3)
        )
    bm = bloch_messiah(wres.s)
    got_s = np.sort(bm.squeeze_factors)
    for got, expected in zip(got_s, np.sort(rd.SQUEEZE_GAMMA3)):
        checks.append(CheckResult("gamma3 squeeze factor", float(got), float(expected), 5e-3))
    stage_v = reck_decompose(bm.v, "V")
    u_wired = np.diag(stage_v.input_signs) @ bm.u[np.ix_([0, 2, 4], [0, 2, 4])]
    stage_u = reck_decompose(u_wired, "U")
    for pair, expected in sorted(rd.TRANSMISSIVITY_IN.items()):
        checks.append(
            CheckResult(
                _pair_name("gamma3 input transmissivity", pair),
                stage_u.transmissivities[pair], expected, 5e-3,
            )
        )
    for pair, expected in sorted(rd.TRANSMISSIVITY_OUT.items()):
        checks.append(
            CheckResult(
                _pair_name("gamma3 output transmissivity", pair),
                stage_v.transmissivities[pair], expected, 5e-3,
            )
        )

    # Circuit simulations against the published outputs.
    out_full = simulate(rd.reference_circuit(simplified=False))
    out_simple = simulate(rd.reference_circuit(simplified=True))
    checks.append(
        CheckResult(
            "full circuit output vs gamma3_circuit (max entry diff)",
            float(np.max(np.abs(out_full.matrix - rd.GAMMA3_CIRCUIT.matrix))),
            0.0, 0.01,
        )
    )
    checks.append(
        CheckResult(
            "simplified circuit output vs gamma3_simplified (max entry diff)",
            float(np.max(np.abs(out_simple.matrix - rd.GAMMA3_SIMPLIFIED.matrix))),
            0.0, 0.01,
        )
    )
    for label, out in (("full", out_full), ("simplified", out_simple)):
        worst = min(ppt_table(out).values())
        checks.append(
            CheckResult(f"{label} circuit output: worst marginal PPT eigenvalue",
                        worst, max(worst, 0.0), max(worst, 0.0) + 1e-7)
        )
    rounded_full = CovarianceMatrix(3, np.round(out_full.matrix, 2))
    rounded_simple = CovarianceMatrix(3, np.round(out_simple.matrix, 2))
    checks.append(
        CheckResult(
            "full circuit output witness mean (2-decimal rounding)",
            evaluate_witness(rounded_full, rd.Z3_CIRCUIT),
            rd.WITNESS_VALUES["gamma3_circuit"], 3e-3,
        )
    )
    checks.append(
        CheckResult(
            "simplified circuit output witness mean (2-decimal rounding)",
            evaluate_witness(rounded_simple, rd.Z3_SIMPLIFIED),
            rd.WITNESS_VALUES["gamma3_simplified"], 3e-3,
        )
    )

    # Thermal-noise tolerance of the three-mode state.
    checks.append(
        CheckResult("gamma3 noise tolerance", noise_tolerance(rd.GAMMA3, rd.CHAIN3), 0.10, 0.02)
    )
    return checks


def report_dict(checks: list[CheckResult]) -> dict:
    return {
        "passed": sum(c.passed for c in checks),
        "failed": sum(not c.passed for c in checks),
        "checks": [
            {
                "name": c.name,
                "measured": c.measured,
                "expected": c.expected,
                "tol": c.tol,
                "passed": c.passed,
            }
            for c in checks
        ],
    }
