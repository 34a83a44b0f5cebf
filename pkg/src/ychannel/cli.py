"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 valid input whose demand
is infeasible (the report is still printed, so shell scripts can branch
on the distinction).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import simulate
from .allocation import allocate, plan_document
from .dof import DofTuple
from .errors import InfeasibleDemandError, YchannelError
from .region import violated_bounds
from .simulate import SimConfig, SweepResult, run_ser, run_sweep

USAGE_EXIT = 1
INFEASIBLE_EXIT = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; reserve 2 for infeasible demands
    def error(self, message):
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _common_flags(parser):
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="base seed (default: $YCHAN_SEED or 0); channel and noise seeds "
        "derive from it unless given",
    )
    parser.add_argument("--format", choices=("json", "csv", "text"), default=None)
    parser.add_argument("--out", default=None, help="write output here instead of stdout")


def _base_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get("YCHAN_SEED", "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"YCHAN_SEED must be an integer, got {raw!r}") from exc


def _add_dof_n(parser):
    parser.add_argument("--dof", required=True, help="six comma-separated stream counts")
    parser.add_argument("-N", "--relay-antennas", dest="n", type=int, required=True)


def build_parser() -> _Parser:
    parser = _Parser(prog="ychannel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="test a demand against the DoF region")
    _add_dof_n(p)
    _common_flags(p)

    for name, help_text in (
        ("allocate", "split a demand across the transmission strategies"),
        ("plan", "allocate and assign concrete sub-channel indices"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_dof_n(p)
        p.add_argument("--mode", choices=("joint", "separable"), default="joint")
        _common_flags(p)

    for name, help_text in (
        ("simulate", "QPSK symbol-error-rate run (decision-directed receivers)"),
        ("sweep", "SINR/rate sweep with per-stream DoF slope fits"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="SimConfig JSON file; flags override")
        p.add_argument("--dof", default=None)
        p.add_argument("-N", "--relay-antennas", dest="n", type=int, default=None)
        p.add_argument("-M", "--user-antennas", dest="m", type=int, default=None)
        p.add_argument("--mode", choices=("joint", "separable"), default=None)
        p.add_argument("--snr-grid", default=None, help="comma-separated dB values")
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--channel-seed", type=int, default=None)
        p.add_argument("--noise-seed", type=int, default=None)
        p.add_argument("--noiseless", action="store_true")
        _common_flags(p)

    p = sub.add_parser("inseparability", help="joint-vs-separable witness demo")
    p.add_argument("-N", "--relay-antennas", dest="n", type=int, required=True)
    p.add_argument("--witness", default=None, help="override the default witness tuple")
    _common_flags(p)

    return parser


def _emit(text: str, out: str | None):
    if out is None:
        print(text)
    else:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def _parse_dof(text: str) -> DofTuple:
    try:
        return DofTuple.from_string(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Renderers.


def _check_doc(d: DofTuple, n: int) -> dict:
    violated = violated_bounds(d, n)
    return {
        "schema_version": simulate.SCHEMA_VERSION,
        "kind": "region-check",
        "dof": d.to_json(),
        "n": n,
        "in_region": not violated,
        "violated": [
            {"permutation": list(b.permutation), "lhs": b.lhs(d), "rhs": b.rhs}
            for b in violated
        ],
    }


def _check_text(d: DofTuple, n: int) -> str:
    violated = violated_bounds(d, n)
    if not violated:
        return "IN REGION"
    lines = ["OUT OF REGION"]
    lines += [f"violated {b.describe(d)}" for b in violated]
    return "\n".join(lines)


def _allocation_text(doc: dict) -> str:
    lines = [f"mode: {doc['mode']}"]
    for key in ("two_cycle", "three_cycle", "uni"):
        for pair, count in doc[key].items():
            lines.append(f"{key.replace('_', '-')} ({','.join(pair)}): {count}")
    lines.append(f"n_s: {doc['n_s']} (relay has N={doc['n']})")
    lines.append(f"feasible: {str(doc['feasible']).lower()}")
    if doc.get("plan"):
        for entry in doc["plan"]:
            users = entry.get("pair", entry.get("cycle"))
            subs = entry.get("subs", [entry.get("sub")])
            lines.append(
                f"plan: {entry['kind']} ({','.join(map(str, users))}) "
                f"subs {','.join(map(str, subs))}"
            )
    return "\n".join(lines)


def _sweep_text(result: SweepResult) -> str:
    lines = [simulate.CSV_HEADER.replace(",", " ")]
    for row in simulate.sweep_csv_lines(result)[1:]:
        lines.append(row.replace(",", " ", 6))
    if result.slopes is not None:
        for s in result.slopes:
            lines.append(
                f"slope {s.src}->{s.dst} {s.strategy}: {s.slope!r} "
                f"(fit residual {s.fit_residual!r})"
            )
        lines.append(f"sum_dof_fit: {result.sum_dof_fit!r}")
    if result.fit_note:
        lines.append(f"note: {result.fit_note}")
    return "\n".join(lines)


def _inseparability_text(report) -> str:
    return "\n".join(
        [
            f"witness: {','.join(f'{v:g}' for v in report.witness.to_json())} (N={report.n})",
            f"one-way dimensions needed: {report.uni_dimensions:g}",
            f"joint: n_s={report.joint['n_s']} feasible={str(report.joint_feasible).lower()}",
            f"separable: n_s={report.separable['n_s']} "
            f"feasible={str(report.separable_feasible).lower()}",
        ]
    )


# ---------------------------------------------------------------------------
# Subcommand drivers.


def _doc_format(args, default: str) -> str:
    fmt = args.format or default
    if fmt == "csv":
        raise UsageError(f"{args.command} has no CSV form; use --format json or text")
    return fmt


def _cmd_check(args) -> int:
    d = _parse_dof(args.dof)
    doc = _check_doc(d, args.n)
    fmt = _doc_format(args, "text")
    _emit(
        _check_text(d, args.n) if fmt == "text" else json.dumps(doc, indent=2),
        args.out,
    )
    return 0 if doc["in_region"] else INFEASIBLE_EXIT


def _cmd_allocate(args, include_plan: bool) -> int:
    d = _parse_dof(args.dof)
    doc = plan_document(allocate(d, args.n, args.mode), args.n, include_plan=include_plan)
    fmt = _doc_format(args, "json")
    _emit(
        _allocation_text(doc) if fmt == "text" else json.dumps(doc, indent=2),
        args.out,
    )
    return 0 if doc["feasible"] else INFEASIBLE_EXIT


def _build_config(args, ser_defaults: bool) -> SimConfig:
    doc = {}
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
    if ser_defaults:
        doc.setdefault("constellation", "qpsk")
        doc.setdefault("cancellation", "decision-directed")
    if args.dof is not None:
        doc["dof"] = _parse_dof(args.dof).to_json()
    if args.m is not None:
        doc["m"] = args.m
    if args.n is not None:
        doc["n"] = args.n
    if args.mode is not None:
        doc["mode"] = args.mode
    if args.snr_grid is not None:
        try:
            doc["snr_grid_db"] = [float(v) for v in args.snr_grid.split(",")]
        except ValueError as exc:
            raise UsageError(f"malformed --snr-grid {args.snr_grid!r}") from exc
    if args.trials is not None:
        doc["trials_per_point"] = args.trials
    seed = _base_seed(args)
    doc["channel_seed"] = (
        args.channel_seed if args.channel_seed is not None else doc.get("channel_seed", seed)
    )
    doc["noise_seed"] = (
        args.noise_seed if args.noise_seed is not None else doc.get("noise_seed", seed + 1)
    )
    if args.noiseless:
        doc["noise"] = False
    if "dof" not in doc or "m" not in doc or "n" not in doc:
        raise UsageError("simulation needs --dof, -M and -N (or a --config file)")
    if "dof" in doc:
        doc["dof"] = DofTuple.from_json(doc["dof"]).to_json()
    return SimConfig.from_json(doc)


def _cmd_simulation(args, ser: bool) -> int:
    cfg = _build_config(args, ser_defaults=ser)
    try:
        result = run_ser(cfg) if ser else run_sweep(cfg)
    except InfeasibleDemandError as exc:
        report = {
            "schema_version": simulate.SCHEMA_VERSION,
            "kind": "infeasible-demand",
            "n_s": exc.n_s,
            "n": exc.n,
        }
        _emit(json.dumps(report, indent=2), args.out)
        return INFEASIBLE_EXIT
    fmt = args.format or "csv"
    if fmt == "csv":
        _emit("\n".join(simulate.sweep_csv_lines(result)), args.out)
    elif fmt == "json":
        _emit(json.dumps(simulate.sweep_to_json(result), indent=2), args.out)
    else:
        _emit(_sweep_text(result), args.out)
    return 0


def _cmd_inseparability(args) -> int:
    witness = _parse_dof(args.witness) if args.witness else None
    report = simulate.inseparability_experiment(args.n, witness)
    fmt = _doc_format(args, "json")
    _emit(
        _inseparability_text(report) if fmt == "text" else json.dumps(report.to_json(), indent=2),
        args.out,
    )
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "allocate":
            return _cmd_allocate(args, include_plan=False)
        if args.command == "plan":
            return _cmd_allocate(args, include_plan=True)
        if args.command == "simulate":
            return _cmd_simulation(args, ser=True)
        if args.command == "sweep":
            return _cmd_simulation(args, ser=False)
        if args.command == "inseparability":
            return _cmd_inseparability(args)
        raise AssertionError(args.command)
    except UsageError as exc:
        print(f"ychannel: error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (YchannelError, ValueError, OSError) as exc:
        print(f"ychannel: error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
