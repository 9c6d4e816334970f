"""Command-line front end: problem files in, analysis artifacts out.

Subcommands: validate, minrank, analyze, map, distances, simulate,
formula. Artifacts embed provenance (input hash, seed, tool version) and
all numeric output uses 6 significant digits, so repeated runs are
byte-identical. Exit codes: 0 ok, 2 validation/input error, 3 runtime
error; failures emit a one-line JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

from . import __version__
from .awgn_sim import SimConfig, simulate, write_results_csv
from .constellation import build_qam, dmin_formula
from .errors import IcqamError, ValidationError
from .index_coding import (
    IndexCode,
    analyze_receiver,
    bandwidth_gain,
    load_problem,
    minrank,
    problem_hash,
    split_demands,
    validate,
)
from .mapper import (
    build_mapping,
    resolve_threshold,
    verify_mapping,
    write_mapping_csv,
    write_mapping_json,
)
from .receiver_analysis import write_distance_report

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _emit(out_path: str | None, text: str) -> None:
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text)


def _load_code(path: str, split: bool):
    """Problem plus a code: the embedded L, or the minrank witness."""
    problem, code = load_problem(path)
    if split:
        problem = split_demands(problem)
        code = IndexCode(problem, code.matrix) if code is not None else None
    source = "file"
    if code is None:
        code = minrank(problem).code(problem)
        source = "minrank-witness"
    return problem, code, source


def _provenance(path: str, code, code_source: str, extra: dict | None = None) -> str:
    lines = [
        f"# tool: icqam {__version__}",
        f"# input: {Path(path).name}",
        f"# problem_hash: {problem_hash(code.problem, code.matrix)}",
        f"# code_source: {code_source}",
    ]
    for key, value in (extra or {}).items():
        lines.append(f"# {key}: {value}")
    return "\n".join(lines) + "\n"


def _add_mapping_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threshold",
        default="minrank",
        help="priority threshold: 'minrank' (default), 'length', or an integer",
    )
    parser.add_argument(
        "--map-seed",
        type=int,
        default=None,
        help="tie-break seed selecting an alternative valid labeling",
    )


def _threshold_arg(value: str):
    if value in ("minrank", "length"):
        return value
    try:
        return int(value)
    except ValueError as exc:
        raise ValidationError(f"bad --threshold value {value!r}") from exc


def cmd_validate(args) -> int:
    problem, code = load_problem(args.problem)
    report = validate(problem)
    print(f"problem: {args.problem}")
    print(f"n: {problem.n}  receivers: {problem.m}")
    print(f"valid: {report.valid}")
    print(f"single_unicast: {report.single_unicast}")
    print(f"embedded_code: {'yes (l=%d)' % code.length if code else 'no'}")
    for err in report.errors:
        print(f"error: {err}")
    return EXIT_OK if report.valid else EXIT_VALIDATION


def cmd_minrank(args) -> int:
    problem, _ = load_problem(args.problem)
    result = minrank(problem)
    print(f"minrank: {result.value}")
    print("witness_L:")
    for word in result.witness.row_words:
        print("".join(str((word >> c) & 1) for c in range(result.witness.cols)))
    if args.out:
        data = {
            "tool_version": __version__,
            "problem_hash": problem_hash(problem),
            "minrank": result.value,
            "witness_L": result.witness.to_lists(),
        }
        _emit(args.out, json.dumps(data, indent=2) + "\n")
    return EXIT_OK


def cmd_analyze(args) -> int:
    problem, code, source = _load_code(args.problem, args.split_demands)
    n_opt = minrank(problem).value
    buf = io.StringIO()
    buf.write(
        _provenance(
            args.problem,
            code,
            source,
            {
                "l": code.length,
                "minrank": n_opt,
                "bandwidth_gain": f"{float(bandwidth_gain(code)):.6g}",
            },
        )
    )
    buf.write("receiver,known_transmissions,eta,sicg_vs_length,prioritized_vs_minrank\n")
    for i in range(problem.m):
        a = analyze_receiver(code, i)
        s_str = ";".join(str(j + 1) for j in sorted(a.known_transmissions))
        buf.write(
            f"{i + 1},{s_str},{a.eta},{str(a.gains_sicg).lower()},"
            f"{str(a.eta < n_opt).lower()}\n"
        )
    _emit(args.out, buf.getvalue())
    return EXIT_OK


def _mapping_for(args, code):
    constellation = build_qam(code.length)
    return build_mapping(
        code,
        constellation,
        threshold=_threshold_arg(args.threshold),
        seed=args.map_seed,
    )


def cmd_map(args) -> int:
    problem, code, source = _load_code(args.problem, args.split_demands)
    mapping = _mapping_for(args, code)
    out = args.out or "-"
    if out.endswith(".json"):
        buf = io.StringIO()
        write_mapping_json(mapping, code, buf, __version__)
        _emit(out, buf.getvalue())
    else:
        buf = io.StringIO()
        buf.write(
            _provenance(
                args.problem,
                code,
                source,
                {"threshold": mapping.threshold, "seed": mapping.seed},
            )
        )
        write_mapping_csv(mapping, buf)
        _emit(out, buf.getvalue())
    return EXIT_OK


def cmd_distances(args) -> int:
    problem, code, source = _load_code(args.problem, args.split_demands)
    mapping = _mapping_for(args, code)
    report = verify_mapping(mapping, code)
    buf = io.StringIO()
    buf.write(
        _provenance(
            args.problem,
            code,
            source,
            {
                "threshold": mapping.threshold,
                "seed": mapping.seed,
                "brackets_ok": str(report.all_ok).lower(),
            },
        )
    )
    write_distance_report(mapping, code, buf)
    _emit(args.out, buf.getvalue())
    return EXIT_OK


def _parse_receivers(value: str | None, m: int):
    if not value:
        return None
    try:
        chosen = sorted({int(tok) - 1 for tok in value.split(",")})
    except ValueError as exc:
        raise ValidationError(f"bad --receivers value {value!r}") from exc
    for i in chosen:
        if not 0 <= i < m:
            raise ValidationError(f"--receivers index {i + 1} out of range 1..{m}")
    return chosen


def cmd_simulate(args) -> int:
    problem, code, source = _load_code(args.problem, args.split_demands)
    if args.snr_step <= 0:
        raise ValidationError("--snr-step must be positive")
    snr_points = []
    snr = args.snr_start
    while snr <= args.snr_stop + 1e-9:
        snr_points.append(round(snr, 9))
        snr += args.snr_step
    config = SimConfig(args.scheme, tuple(snr_points), args.trials, args.seed)
    mapping = _mapping_for(args, code) if args.scheme == "qam-mapped" else None
    receivers = _parse_receivers(args.receivers, problem.m)
    result = simulate(code, config, mapping, receivers)
    buf = io.StringIO()
    write_results_csv(result, buf, code, mapping, __version__)
    _emit(args.out, buf.getvalue())
    return EXIT_OK


def cmd_formula(args) -> int:
    if args.from_bits < 2 or args.to_bits < args.from_bits:
        raise ValidationError("need 2 <= --from <= --to")
    buf = io.StringIO()
    buf.write(f"# tool: icqam {__version__}\n")
    buf.write("l,dmin,dmin_sq\n")
    for bits in range(args.from_bits, args.to_bits + 1):
        d = dmin_formula(bits)
        buf.write(f"{bits},{d:.6g},{d * d:.6g}\n")
    _emit(args.out, buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icqam",
        description=(
            "Index coding over AWGN broadcast channels with "
            "side-information-aware QAM labeling"
        ),
    )
    parser.add_argument("--version", action="version", version=f"icqam {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check a problem file against the instance rules")
    p.add_argument("problem")

    p = add("minrank", cmd_minrank, "exact optimal code length plus a witness matrix")
    p.add_argument("problem")
    p.add_argument("--out", default=None, help="also write a JSON artifact")

    for name, func, help_text in [
        ("analyze", cmd_analyze, "per-receiver known transmissions, eta and gain flags"),
        ("map", cmd_map, "run the labeling algorithm; CSV or JSON by extension"),
        ("distances", cmd_distances, "per-receiver worst-case distance report"),
    ]:
        p = add(name, func, help_text)
        p.add_argument("problem")
        p.add_argument("--out", default=None)
        p.add_argument("--split-demands", action="store_true")
        if name != "analyze":
            _add_mapping_options(p)

    p = add("simulate", cmd_simulate, "Monte Carlo wanted-message error rates")
    p.add_argument("problem")
    p.add_argument("--scheme", choices=["qam-mapped", "psk-arbitrary", "binary"],
                   default="qam-mapped")
    p.add_argument("--snr-start", type=float, required=True)
    p.add_argument("--snr-stop", type=float, required=True)
    p.add_argument("--snr-step", type=float, default=2.0)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--receivers", default=None,
                   help="comma-separated 1-based receiver filter")
    p.add_argument("--out", default=None)
    p.add_argument("--split-demands", action="store_true")
    _add_mapping_options(p)

    p = add("formula", cmd_formula, "closed-form base distances for a range of l")
    p.add_argument("--from", dest="from_bits", type=int, default=2)
    p.add_argument("--to", dest="to_bits", type=int, default=8)
    p.add_argument("--out", default=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FileNotFoundError, IsADirectoryError) as exc:
        print(json.dumps({"error": "validation", "detail": str(exc)}), file=sys.stderr)
        return EXIT_VALIDATION
    except IcqamError as exc:
        print(json.dumps({"error": "runtime", "detail": str(exc)}), file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # pragma: no cover - defensive
        print(
            json.dumps({"error": "internal", "detail": f"{type(exc).__name__}: {exc}"}),
            file=sys.stderr,
        )
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
