"""Command-line front end: parse state files, dispatch, emit JSON reports.

Exit codes are a stable contract: 0 success, 2 input error, 3 solver failure,
4 saturation failure, 5 bound violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, linops, quantifiers, sdpcore, supbound, witnesses
from .linops import HermOp, Partition
from .qstate import Ket, Register, density
from .quantifiers import QuantifierConfig
from .supbound import BoundViolationError, SaturationFailureError
from .witnesses import DEFAULT_SEED

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_SATURATION = 4
EXIT_VIOLATION = 5


class StateFileError(ValueError):
    """A state file failed to parse; the message carries the location."""


def load_state_file(path: str) -> Ket:
    """Read a JSON state file (dense or sparse amplitude encoding)."""
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as err:
        raise StateFileError(f"{path}: {err}") from err
    except json.JSONDecodeError as err:
        raise StateFileError(
            f"{path}: invalid JSON at line {err.lineno}, column {err.colno}"
        ) from err
    return parse_state_document(doc, where=path)


def parse_state_document(doc: dict, where: str = "<state>") -> Ket:
    if not isinstance(doc, dict) or "dims" not in doc or "amplitudes" not in doc:
        raise StateFileError(f"{where}: expected an object with dims and amplitudes")
    try:
        register = Register(tuple(int(d) for d in doc["dims"]))
    except (TypeError, ValueError) as err:
        raise StateFileError(f"{where}: dims: {err}") from err
    entries = doc["amplitudes"]
    if not isinstance(entries, list) or not entries:
        raise StateFileError(f"{where}: amplitudes must be a nonempty list")
    amp = np.zeros(register.size, dtype=np.complex128)
    if isinstance(entries[0], dict):
        for pos, entry in enumerate(entries):
            try:
                basis = str(entry["basis"])
                re, im = entry["amp"]
            except (KeyError, TypeError, ValueError) as err:
                raise StateFileError(
                    f"{where}: amplitudes[{pos}]: need basis and amp [re, im]"
                ) from err
            if len(basis) != register.nsub:
                raise StateFileError(
                    f"{where}: amplitudes[{pos}]: basis {basis!r} needs "
                    f"{register.nsub} digits"
                )
            flat = 0
            for digit, dim in zip(basis, register.dims):
                label = int(digit)
                if label >= dim:
                    raise StateFileError(
                        f"{where}: amplitudes[{pos}]: digit {label} exceeds "
                        f"dimension {dim}"
                    )
                flat = flat * dim + label
            amp[flat] = complex(float(re), float(im))
    else:
        if len(entries) != register.size:
            raise StateFileError(
                f"{where}: expected {register.size} dense amplitudes, "
                f"got {len(entries)}"
            )
        for pos, entry in enumerate(entries):
            try:
                re, im = entry
            except (TypeError, ValueError) as err:
                raise StateFileError(
                    f"{where}: amplitudes[{pos}]: need an [re, im] pair"
                ) from err
            amp[pos] = complex(float(re), float(im))
    if not np.any(amp):
        raise StateFileError(f"{where}: all amplitudes vanish")
    return Ket(register, amp)


def ket_to_state_document(ket: Ket) -> dict:
    return {
        "dims": list(ket.register.dims),
        "amplitudes": [[z.real, z.imag] for z in ket.amplitudes],
    }


def parse_partitions(specs: list[str] | None, register: Register) -> list[Partition]:
    if not specs:
        return linops.single_cut_partitions(register)
    parts = []
    for spec in specs:
        try:
            indices = frozenset(int(tok) for tok in spec.split(",") if tok != "")
        except ValueError as err:
            raise StateFileError(f"bad partition {spec!r}: {err}") from err
        p = Partition(indices)
        p.validate(register, proper=True)
        parts.append(p)
    return parts


def cmd_quantify(args) -> tuple[dict, int]:
    ket = load_state_file(args.state)
    renormalized_input = False
    if abs(ket.norm() ** 2 - 1.0) > 1e-9:
        ket = ket.normalized()
        renormalized_input = True
    register = ket.register
    config = QuantifierConfig(
        kind="negativity" if args.quantifier == "negativity" else "generalized_robustness",
        partitions=tuple(parse_partitions(args.partition, register)),
    )
    parts = config.resolve_partitions(register)
    rho = density(ket)
    results: dict = {}
    exit_code = EXIT_OK

    if args.quantifier in ("negativity", "all"):
        results["negativity"] = [
            {"partition": sorted(p.transposed), "value": quantifiers.negativity(rho, p)}
            for p in parts
        ]
        results["ppt"] = [
            {"partition": sorted(p.transposed), "ppt": bool(flag)}
            for p, flag in zip(
                parts, quantifiers.ppt_check(rho, parts, config.psd_tol)
            )
        ]

    if args.quantifier in ("robustness", "all"):
        robustness: dict = {}
        lower, witness_cut = _best_witness_lower(ket, rho, register)
        robustness["lower"] = lower
        robustness["lower_witness_cut"] = witness_cut
        upper, candidate, certified, s_star = _best_mixing_upper(rho, register)
        robustness["upper"] = upper
        robustness["upper_certified"] = certified
        robustness["upper_candidate"] = candidate
        robustness["s_star"] = s_star
        try:
            robustness["ppt_sdp"] = quantifiers.rg_ppt_sdp(rho, parts, tol=args.tolerance)
        except sdpcore.SolverFailureError as err:
            robustness["ppt_sdp"] = None
            robustness["ppt_sdp_best"] = err.best_value
            robustness["ppt_sdp_error"] = str(err)
            exit_code = EXIT_SOLVER
        except ValueError as err:
            robustness["ppt_sdp"] = None
            robustness["ppt_sdp_error"] = str(err)
        results["robustness"] = robustness

    config = {
        "state": args.state,
        "quantifier": args.quantifier,
        "partitions": [sorted(p.transposed) for p in parts],
        "renormalized_input": renormalized_input,
    }
    return _run_report("quantify", config, results, args.seed), exit_code


def _best_witness_lower(ket: Ket, rho: HermOp, register: Register):
    """Best cap-identity witness value over per-cut Schmidt-aligned witnesses."""
    best = 0.0
    best_cut = None
    dominant = linops.eig_hermitian(rho).eigenvectors[:, -1]
    dominant_ket = Ket(register, dominant)
    if register.nsub < 2:
        return best, best_cut
    for cut in linops.single_cut_partitions(register):
        w = witnesses.maxent_cut_witness(dominant_ket, cut)
        bound = quantifiers.rg_lower_via_witness(rho, w)
        if bound.lower > best:
            best = bound.lower
            best_cut = sorted(cut.transposed)
    return best, best_cut


def _best_mixing_upper(rho: HermOp, register: Register):
    """Try preset mixing candidates; prefer certified, then smaller upper."""
    d = register.size
    candidates = []
    partner = 2.0 * np.diag(np.diag(rho.matrix)) - rho.matrix
    if float(np.linalg.eigvalsh(partner)[0]) >= -1e-12:
        candidates.append(("coherence-partner", HermOp(register, partner)))
    candidates.append(
        ("maximally-mixed", HermOp(register, np.eye(d, dtype=np.complex128) / d))
    )
    best = (None, None, False, None)
    for name, pi in candidates:
        bounds = quantifiers.rg_upper_via_mixing(rho, pi)
        if bounds.upper is None:
            continue
        current = best[0]
        if current is None or bounds.upper < current:
            best = (bounds.upper, name, bounds.certified_upper, bounds.s_star)
    return best


def cmd_ghz_saturation(args) -> tuple[dict, int]:
    if args.n < 2:
        raise StateFileError(f"--n must be at least 2, got {args.n}")
    try:
        report = supbound.ghz_saturation_experiment(args.n, args.phi)
    except SaturationFailureError as err:
        results = {
            "error": str(err),
            "lower": err.lower,
            "upper": err.upper,
        }
        config = {"n": args.n, "phi": args.phi}
        return _run_report("ghz-saturation", config, results, args.seed), EXIT_SATURATION
    config = {"n": args.n, "phi": args.phi}
    return _run_report(
        "ghz-saturation", config, {"report": _report_dict(report)}, args.seed
    ), EXIT_OK


def cmd_sweep(args) -> tuple[dict, int]:
    if args.samples < 1:
        raise StateFileError(f"--samples must be at least 1, got {args.samples}")
    kind = "negativity" if args.quantifier == "negativity" else "generalized_robustness"
    config = QuantifierConfig(kind=kind)
    mode = "renormalize" if args.renormalize else "raw"
    try:
        summary = supbound.random_sweep(
            config,
            qubits=args.qubits,
            samples=args.samples,
            seed=args.seed,
            mode=mode,
            workers=args.threads,
        )
    except BoundViolationError as err:
        results = {"error": str(err), "instance": err.instance}
        cfg = {"quantifier": args.quantifier, "qubits": args.qubits,
               "samples": args.samples, "mode": mode}
        return _run_report("sweep", cfg, results, args.seed), EXIT_VIOLATION
    if args.csv:
        _write_csv(args.csv, summary)
    results = {
        "samples": summary.samples,
        "min_gap": summary.min_gap,
        "mean_gap": summary.mean_gap,
        "violations": summary.violations,
        "config": summary.config,
    }
    return _run_report("sweep", results["config"], results, args.seed), EXIT_OK


def _write_csv(path: str, summary) -> None:
    lines = ["index,abs_a,abs_b,lhs,rhs,gap"]
    for rec in summary.records:
        lines.append(
            f"{rec.index},{rec.abs_a!r},{rec.abs_b!r},{rec.lhs!r},{rec.rhs!r},{rec.gap!r}"
        )
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def _report_dict(report) -> dict:
    return {
        "lhs": report.lhs,
        "term_psi": report.term_psi,
        "term_phi": report.term_phi,
        "cross_term": report.cross_term,
        "rhs": report.rhs,
        "gap": report.gap,
        "saturated": report.saturated,
        "inequality_kind": report.inequality_kind,
        "gamma_norm": report.gamma_norm,
    }


def _run_report(command: str, config: dict, results: dict, seed: int) -> dict:
    return {
        "command": command,
        "config": config,
        "version": __version__,
        "seed": seed,
        "results": results,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entsup",
        description="Entanglement quantifiers and superposition bounds for qubit registers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    quantify = sub.add_parser("quantify", help="quantify entanglement of a state file")
    quantify.add_argument("state", help="path to a JSON state file")
    quantify.add_argument(
        "--quantifier",
        choices=["negativity", "robustness", "all"],
        default="all",
    )
    quantify.add_argument(
        "--partition",
        action="append",
        metavar="I,J,...",
        help="subsystem indices forming the transposed side; repeatable",
    )
    _common_flags(quantify)

    sat = sub.add_parser("ghz-saturation", help="run the GHZ saturation experiment")
    sat.add_argument("--n", type=int, required=True, help="qubit count (>= 2)")
    sat.add_argument("--phi", type=float, default=0.0, help="relative phase in radians")
    _common_flags(sat)

    sweep = sub.add_parser("sweep", help="random stress sweep of the bounds")
    sweep.add_argument(
        "--quantifier", choices=["negativity", "robustness"], default="negativity"
    )
    sweep.add_argument("--samples", type=int, default=1000)
    sweep.add_argument("--qubits", type=int, default=2)
    sweep.add_argument("--csv", metavar="PATH", help="write per-sample rows to PATH")
    _common_flags(sweep)

    return parser


def _common_flags(cmd) -> None:
    cmd.add_argument("--seed", type=int, default=DEFAULT_SEED)
    cmd.add_argument(
        "--tolerance",
        type=float,
        default=None,
        help="SDP certificate tolerance (default: dimension-based)",
    )
    cmd.add_argument("--threads", type=int, default=1)
    cmd.add_argument(
        "--renormalize",
        action=argparse.BooleanOptionalAction,
        default=supbound.DEFAULT_GAMMA_MODE == "renormalize",
        help="evaluate bounds on the renormalized superposition (default)",
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_INPUT if err.code not in (0, None) else 0

    started = time.perf_counter()
    try:
        if args.command == "quantify":
            report, code = cmd_quantify(args)
        elif args.command == "ghz-saturation":
            report, code = cmd_ghz_saturation(args)
        else:
            report, code = cmd_sweep(args)
    except (StateFileError, ValueError) as err:
        print(json.dumps({"error": str(err)}), file=sys.stderr)
        return EXIT_INPUT
    except sdpcore.SolverFailureError as err:
        print(
            json.dumps({"error": str(err), "best_value": err.best_value}),
            file=sys.stderr,
        )
        return EXIT_SOLVER

    report["duration_s"] = time.perf_counter() - started
    print(json.dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
