"""Command-line interface: the two protocol roles, a local run, and sweeps.

Subcommands:

- ``pi-test alice``: build and write a release package from X.
- ``pi-test bob``: evaluate a package against Y and write the test report.
- ``pi-test run``: both roles in one process, with the non-private test
  reported side by side.
- ``pi-test sweep``: privacy-utility table over a grid of (epsilon, eta).

Exit status: 0 on success (degenerate reports included), 1 on runtime
errors (bad files, mismatched shapes, ...), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .data import load_csv
from .errors import PiTestError
from .estimators import dcov_sq_direct, decide, s_hat
from .ioutil import atomic_write_bytes, atomic_write_text
from .privacy import PrivacyParams, jl_params, tau, tau_mechanism
from .protocol import alice_prepare, bob_evaluate, deserialize_package, report_to_dict, serialize_package
from .errors import InvalidInputError
from .sweep import SweepConfig, run_sweep, sweep_rows_to_csv


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value > 0.0) or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return value


def _unit_open_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (0.0 < value < 1.0):
        raise argparse.ArgumentTypeError(f"must lie strictly in (0, 1), got {text}")
    return value


def _seed_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be nonnegative, got {value}")
    return value


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    return values


def _increasing_float_list(text: str) -> tuple[float, ...]:
    values = _float_list(text)
    if any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError(f"all values must be positive, got {text}")
    if list(values) != sorted(set(values)):
        raise argparse.ArgumentTypeError(f"values must be strictly increasing, got {text}")
    return values


def _add_privacy_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epsilon", type=_positive_float, required=True,
                        help="total privacy budget epsilon (split over the two releases)")
    parser.add_argument("--delta", type=_unit_open_float, default=2e-4,
                        help="total privacy budget delta (default 2e-4)")
    parser.add_argument("--eta", type=_unit_open_float, default=0.1,
                        help="multiplicative accuracy in (0,1) (default 0.1)")
    parser.add_argument("--nu", type=_unit_open_float, default=0.05,
                        help="per-query failure probability in (0,1) (default 0.05)")
    parser.add_argument("--seed", type=_seed_int, default=0,
                        help="master seed for the release randomness (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pi-test",
        description="One-way private independence testing from released covariance projections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_alice = sub.add_parser("alice", help="build a release package from the data holder's X")
    p_alice.add_argument("--input", required=True, help="CSV file with X (rows = samples)")
    p_alice.add_argument("--header", action="store_true", help="skip the first CSV line")
    _add_privacy_flags(p_alice)
    p_alice.add_argument("--out", required=True, help="package file to write (JSON)")
    p_alice.add_argument("--analyst-dim", type=int, default=1, metavar="M",
                         help="assumed analyst column count for the closed-form tau printout")
    p_alice.set_defaults(func=_cmd_alice)

    p_bob = sub.add_parser("bob", help="evaluate a package against the analyst's Y")
    p_bob.add_argument("--package", required=True, help="package file from the data holder")
    p_bob.add_argument("--input", required=True, help="CSV file with Y (rows = samples)")
    p_bob.add_argument("--header", action="store_true", help="skip the first CSV line")
    p_bob.add_argument("--alpha", type=_unit_open_float, default=0.05,
                       help="significance level (default 0.05)")
    p_bob.add_argument("--s-param", type=_positive_float, default=None,
                       help="scale parameter for the upper ratio bound (default: s_bar/n)")
    p_bob.add_argument("--report", required=True, help="report file to write (JSON)")
    p_bob.set_defaults(func=_cmd_bob)

    p_run = sub.add_parser("run", help="run both roles locally, with a non-private comparison")
    p_run.add_argument("--input-x", required=True, help="CSV file with X")
    p_run.add_argument("--input-y", required=True, help="CSV file with Y")
    p_run.add_argument("--header", action="store_true", help="skip the first CSV line of both")
    _add_privacy_flags(p_run)
    p_run.add_argument("--alpha", type=_unit_open_float, default=0.05)
    p_run.add_argument("--s-param", type=_positive_float, default=None)
    p_run.add_argument("--report", required=True, help="report file to write (JSON)")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="privacy-utility sweep over (epsilon, eta)")
    p_sweep.add_argument("--input-x", required=True, help="CSV file with X")
    p_sweep.add_argument("--input-y", required=True, help="CSV file with Y")
    p_sweep.add_argument("--header", action="store_true", help="skip the first CSV line of both")
    p_sweep.add_argument("--epsilons", type=_increasing_float_list, default=(0.5, 1.0, 2.0, 4.0, 8.0),
                         help="comma-separated increasing epsilon grid (default 0.5,1,2,4,8)")
    p_sweep.add_argument("--etas", type=_float_list, default=(0.05, 0.1),
                         help="comma-separated eta grid (default 0.05,0.1)")
    p_sweep.add_argument("--replications", type=int, default=50,
                         help="protocol replications per cell (default 50)")
    p_sweep.add_argument("--delta", type=_unit_open_float, default=2e-4)
    p_sweep.add_argument("--nu", type=_unit_open_float, default=0.05)
    p_sweep.add_argument("--alpha", type=_unit_open_float, default=0.05)
    p_sweep.add_argument("--seed", type=_seed_int, default=0)
    p_sweep.add_argument("--out", required=True, help="CSV table to write")
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def _params_from_args(args) -> PrivacyParams:
    return PrivacyParams(args.epsilon, args.delta, args.eta, args.nu)


def _cmd_alice(args) -> int:
    X = load_csv(args.input, has_header=args.header)
    params = _params_from_args(args)
    package = alice_prepare(X, params, args.seed)
    atomic_write_bytes(args.out, serialize_package(package))

    per_release = params.half_budget()
    r, w = jl_params(per_release)
    print(f"wrote package: {args.out} (n = {package.n}, projections {r} x {package.n})")
    print(f"per-release budget: epsilon = {per_release.epsilon:g}, delta = {per_release.delta:g}")
    print(f"projection rows r = {r}, spectral floor w = {w:.6g}")
    print(f"tau_mech (mechanism additive constant) = {tau_mechanism(per_release):.6g}")
    try:
        tau_cf = tau(per_release, args.analyst_dim, package.n)
        print(f"tau (closed form, m = {args.analyst_dim}) = {tau_cf:.6g}")
    except InvalidInputError as exc:
        print(f"tau (closed form, m = {args.analyst_dim}) = n/a ({exc})")
    return 0


def _cmd_bob(args) -> int:
    with open(args.package, "rb") as handle:
        package = deserialize_package(handle.read())
    Y = load_csv(args.input, has_header=args.header)
    report = bob_evaluate(package, Y, alpha=args.alpha, s_param=args.s_param)
    doc = report_to_dict(report)
    doc["privacy"] = {
        "epsilon": package.params.epsilon,
        "delta": package.params.delta,
        "eta": package.params.eta,
        "nu": package.params.nu,
        "split": "half-half",
    }
    atomic_write_text(args.report, json.dumps(doc, indent=2) + "\n")
    _print_decision(report)
    print(f"wrote report: {args.report}")
    return 0


def _print_decision(report) -> None:
    if report.degenerate:
        print("degenerate: private denominator statistic is zero; no decision")
    else:
        verdict = "reject independence" if report.reject else "fail to reject independence"
        print(
            f"Gamma = {report.statistic:.6g}, threshold = {report.threshold:.6g} "
            f"(alpha = {report.alpha:g}) -> {verdict}"
        )


def _cmd_run(args) -> int:
    X = load_csv(args.input_x, has_header=args.header)
    Y = load_csv(args.input_y, has_header=args.header)
    params = _params_from_args(args)
    package = alice_prepare(X, params, args.seed)
    report = bob_evaluate(package, Y, alpha=args.alpha, s_param=args.s_param)

    n = X.shape[0]
    omega_ref = dcov_sq_direct(X, Y)
    s_ref = s_hat(X, Y)
    if s_ref > 0.0:
        verdict = decide(n * omega_ref / s_ref, args.alpha)
        nonprivate = {
            "omega_sq": omega_ref,
            "s_hat": s_ref,
            "statistic": verdict.statistic,
            "threshold": verdict.threshold,
            "reject": verdict.reject,
            "degenerate": False,
        }
        np_line = (
            f"non-private: Gamma = {verdict.statistic:.6g}, threshold = {verdict.threshold:.6g}"
            f" -> {'reject' if verdict.reject else 'fail to reject'}"
        )
    else:
        nonprivate = {
            "omega_sq": omega_ref,
            "s_hat": s_ref,
            "statistic": None,
            "threshold": None,
            "reject": None,
            "degenerate": True,
        }
        np_line = "non-private: degenerate (constant dataset)"

    doc = {"private": report_to_dict(report), "nonprivate": nonprivate}
    atomic_write_text(args.report, json.dumps(doc, indent=2) + "\n")
    _print_decision(report)
    print(np_line)
    print(f"wrote report: {args.report}")
    return 0


def _cmd_sweep(args) -> int:
    if args.replications < 1:
        raise InvalidInputError(f"--replications must be >= 1, got {args.replications}")
    X = load_csv(args.input_x, has_header=args.header)
    Y = load_csv(args.input_y, has_header=args.header)
    cfg = SweepConfig(
        epsilons=tuple(args.epsilons),
        replications=args.replications,
        eta_values=tuple(args.etas),
        delta=args.delta,
        nu=args.nu,
        alpha=args.alpha,
        master_seed=args.seed,
    )
    rows = run_sweep(cfg, X, Y)
    atomic_write_text(args.out, sweep_rows_to_csv(rows))
    print(f"wrote sweep table: {args.out} ({len(rows)} rows)")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PiTestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
