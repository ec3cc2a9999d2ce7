"""Command-line interface.

Subcommands: check, ppt, separability, witness, search, decompose, simulate,
noise-scan, verify-paper.  All file inputs and outputs use the JSON formats
from :mod:`gaussian_gme.io`; ``--seed`` makes randomized commands
deterministic.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io as gio
from .circuit import (
    CircuitSpec,
    bloch_messiah,
    compile_circuit,
    noise_tolerance,
    round_parameters,
    simulate,
    squeezing_db,
    williamson,
)
from .partitions import Bipartition
from .sdp import SolverOptions
from .search import SearchConfig, search
from .symplectic import check_physical, ppt_table
from .verify import report_dict, verify_paper
from .witness import SdpFailure, evaluate_witness, gme_witness, separability_test


def _solver_options(args) -> SolverOptions:
    opts = SolverOptions()
    if getattr(args, "sdp_debug", None):
        opts.trace_file = args.sdp_debug
    return opts


def _load_cm(path):
    return gio.cm_from_dict(gio.read_json(path))


def _print_matrix(m: np.ndarray, decimals: int) -> None:
    for row in np.round(m, decimals):
        print("  [" + ", ".join(f"{v:8.{decimals}f}" for v in row) + "]")


def _cmd_check(args) -> int:
    gamma = _load_cm(args.cm)
    physical, min_eig = check_physical(gamma, tol=args.tol)
    print(f"physical: {physical} (min eigenvalue of gamma + i*Omega: {min_eig:.3e})")
    if args.out:
        gio.write_json(args.out, {"physical": physical, "min_eig": min_eig})
    return 0


def _cmd_ppt(args) -> int:
    gamma = _load_cm(args.cm)
    table = ppt_table(gamma)
    letters = "ABCDEFGH"
    for (i, j), eps in sorted(table.items()):
        sep = "separable" if eps >= -args.tol else "entangled"
        print(f"eps_{letters[i]}{letters[j]} = {eps:8.4f}  ({sep})")
    if args.out:
        gio.write_json(args.out, gio.ppt_table_dict(table))
    return 0


def _cmd_separability(args) -> int:
    gamma = _load_cm(args.cm)
    modes = frozenset(int(v) - 1 for v in args.split.split(","))
    part = Bipartition(gamma.n_modes, modes)
    result = separability_test(gamma, part, _solver_options(args))
    print(f"bipartition {part}: x_e = {result.x_e:+.6f} -> "
          f"{'separable' if result.separable else 'entangled'}")
    if args.out:
        gio.write_json(args.out, {
            "bipartition": sorted(m + 1 for m in part.index_set),
            "x_e": result.x_e,
            "separable": result.separable,
            "gamma_a": result.gamma_a.tolist(),
            "gamma_b": result.gamma_b.tolist(),
        })
    return 0


def _cmd_witness(args) -> int:
    gamma = _load_cm(args.cm)
    tree = gio.resolve_tree(args.tree) if args.tree else None
    result = gme_witness(gamma, tree, _solver_options(args))
    table = ppt_table(gamma)
    print(f"witness mean Tr[gamma Z] - 1 = {result.value:+.6f} "
          f"({'genuine multipartite entanglement' if result.value < -args.tol else 'not detected'})")
    print("witness matrix (x 1e-2, 3 decimals):")
    _print_matrix(100 * result.witness.matrix, 1)
    letters = "ABCDEFGH"
    eps = "  ".join(
        f"eps_{letters[i]}{letters[j]}={table[(i, j)]:.4f}" for i, j in sorted(table)
    )
    print(f"marginal PPT: {eps}")
    if args.out:
        gio.write_json(args.out, {
            "value": result.value,
            "solver_status": result.status,
            "witness": gio.witness_to_dict(result.witness),
            "ppt_table": gio.ppt_table_dict(table),
        })
    return 0


def _cmd_search(args) -> int:
    tree = gio.resolve_tree(args.tree)
    best = None
    summary = []
    for restart in range(args.restarts):
        config = SearchConfig(
            n_modes=args.modes,
            tree=tree,
            iterations=args.iters,
            diag_range=(args.diag_min, args.diag_max),
            min_eig_floor=args.min_eig_floor,
            seed=args.seed + restart,
        )
        trace = search(config, _solver_options(args))
        value = trace.final_value if trace.records else float("nan")
        summary.append({
            "seed": config.seed,
            "final_value": value,
            "success": trace.success,
            "status": trace.status,
        })
        print(f"seed {config.seed}: final value {value:+.6f} success={trace.success}")
        if trace.records and trace.success and (
            best is None or value < best.final_value
        ):
            best = trace
        if best is None and trace.records and (
            not summary or value == min(s["final_value"] for s in summary)
        ):
            fallback = trace
    if best is None:
        best = fallback
        print("no restart met the success test; reporting the best value found")
    print(f"best final value: {best.final_value:+.6f} (seed {best.config.seed})")
    if args.out:
        payload = gio.trace_to_dict(best)
        payload["restarts"] = summary
        gio.write_json(args.out, payload)
    return 0


def _cmd_decompose(args) -> int:
    gamma = _load_cm(args.cm)
    circuit = compile_circuit(gamma, simplified=args.simplified)
    wres = williamson(gamma)
    bm = bloch_messiah(wres.s)
    print("thermal inputs nu:", np.round(wres.nu, 3).tolist())
    squeezes = np.sort(bm.squeeze_factors)[::-1]
    print("squeeze factors:", np.round(np.sort(bm.squeeze_factors), 3).tolist(),
          f"(strongest {squeezing_db(float(squeezes[-1])):.1f} dB)")
    for el in round_parameters(circuit).elements:
        print(" ", el)
    if args.out:
        gio.write_json(args.out, gio.circuit_to_dict(circuit))
    return 0


def _cmd_simulate(args) -> int:
    circuit = gio.circuit_from_dict(gio.read_json(args.circuit))
    gamma = simulate(circuit)
    print("output covariance matrix (2 decimals):")
    _print_matrix(gamma.matrix, 2)
    if args.out:
        gio.write_json(args.out, gio.cm_to_dict(gamma))
    return 0


def _cmd_noise_scan(args) -> int:
    gamma = _load_cm(args.cm)
    tree = gio.resolve_tree(args.tree)
    p = noise_tolerance(gamma, tree, options=_solver_options(args))
    print(f"detectable up to isotropic noise p = {p:.3f}")
    if args.out:
        gio.write_json(args.out, {"noise_tolerance": p})
    return 0


def _cmd_verify_paper(args) -> int:
    checks = verify_paper(deep=args.deep)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed} passed, {failed} failed")
    if args.out:
        gio.write_json(args.out, report_dict(checks))
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussian-gme",
        description="Witnessing genuine multipartite entanglement of Gaussian "
                    "states from minimal sets of two-mode marginals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, cm=False, tree=False, out=True):
        if cm:
            p.add_argument("--cm", required=True, help="covariance matrix JSON file")
        if tree:
            p.add_argument("--tree", help="tree preset name or JSON file")
        if out:
            p.add_argument("--out", help="write the result as JSON to this path")
        p.add_argument("--tol", type=float, default=1e-6,
                       help="decision tolerance on eigenvalues / witness means")
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument("--sdp-debug", help="dump solver iterates as JSON lines")

    p = sub.add_parser("check", help="Heisenberg physicality test")
    common(p, cm=True)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("ppt", help="PPT table of all two-mode marginals")
    common(p, cm=True)
    p.set_defaults(func=_cmd_ppt)

    p = sub.add_parser("separability", help="separability across one bipartition")
    common(p, cm=True)
    p.add_argument("--split", required=True,
                   help="comma-separated 1-based modes of one side, e.g. 1,3")
    p.set_defaults(func=_cmd_separability)

    p = sub.add_parser("witness", help="optimal (optionally blind) GME witness")
    common(p, cm=True, tree=True)
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("search", help="search for blind-detectable states")
    common(p, tree=True)
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--iters", type=int, default=10)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--diag-min", type=float, default=1.0)
    p.add_argument("--diag-max", type=float, default=10.0)
    p.add_argument("--min-eig-floor", type=float, default=0.2)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("decompose", help="compile a state into a circuit")
    common(p, cm=True)
    p.add_argument("--simplified", action="store_true",
                   help="squeezed vacua with correlated displacements")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("simulate", help="propagate through a circuit JSON")
    common(p)
    p.add_argument("--circuit", required=True, help="circuit JSON file")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("noise-scan", help="isotropic noise tolerance of detection")
    common(p, cm=True, tree=True)
    p.set_defaults(func=_cmd_noise_scan)

    p = sub.add_parser("verify-paper", help="recompute the bundled benchmark numbers")
    common(p)
    p.add_argument("--deep", action="store_true",
                   help="also run the 1000-sample witness validations")
    p.set_defaults(func=_cmd_verify_paper)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError, SdpFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
