"""Command-line front end.

    seqwitness state-info --theta 0.785398 --alpha 1
    seqwitness sequence --theta 0.1 --epsilon 0.01
    seqwitness sweep --epsilons 0.1,0.01,0.001 --output fig1.csv
    seqwitness verify --seed 42 --samples 100000

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error,
3 internal inconsistency between computation paths.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from seqwitness import criteria, protocol, verification
from seqwitness.errors import InternalInconsistency, InvalidParams, NotFound
from seqwitness.protocol import mp

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_INCONSISTENT = 3

SWEEP_COLUMNS = (
    "theta",
    "alpha",
    "epsilon",
    "n_bobs",
    "lambda_first",
    "lambda_last",
    "chsh_initial",
    "ppt_min_initial",
    "status",
)


@dataclass
class SweepRecord:
    theta: object
    alpha: object
    epsilon: object
    n_bobs: int
    lambda_first: object = None
    lambda_last: object = None
    chsh_initial: object = None
    ppt_min_initial: object = None
    status: str = "ok"


def fmt(x):
    """17 significant digits; values below the double range keep their exponent."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer, str)):
        return str(x)
    f = float(x)
    if f == 0.0 and x != 0:
        return mp.nstr(x, 17)
    return format(f, ".17g")


def jsonable(x):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, list):
        return [jsonable(v) for v in x]
    f = float(x)
    if f == 0.0 and x != 0:
        return mp.nstr(x, 17)
    return f


def sweep_record(theta, alpha, epsilon, max_bobs):
    try:
        p = protocol.ProtocolParams(theta, alpha, epsilon, max_bobs=max_bobs)
        n = protocol.count_bobs(p)
    except InvalidParams:
        return SweepRecord(theta, alpha, epsilon, 0, status="invalid_params")
    seq = protocol.lambda_sequence(p)
    start = protocol.ExactBellState.initial(p)
    return SweepRecord(
        theta,
        alpha,
        epsilon,
        n,
        lambda_first=seq.values[0],
        lambda_last=seq.values[n - 1] if n else None,
        chsh_initial=start.chsh(),
        ppt_min_initial=start.ppt_min(),
    )


def run_sweep(thetas, epsilons, alpha=1.0, max_bobs=protocol.DEFAULT_MAX_BOBS):
    """Records ordered by (epsilon, theta), both ascending."""
    return [
        sweep_record(theta, alpha, eps, max_bobs)
        for eps in sorted(epsilons)
        for theta in sorted(thetas)
    ]


def render_records(rows, columns, fmt_name):
    if fmt_name == "json":
        return json.dumps([{c: jsonable(r[c]) for c in columns} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt(r[c]) for c in columns])
    return buf.getvalue()


def emit(text, output):
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def theta_grid(args):
    if args.theta_steps < 1:
        raise InvalidParams("--theta-steps must be at least 1")
    if not 0 < args.theta_min <= args.theta_max:
        raise InvalidParams("need 0 < --theta-min <= --theta-max")
    if args.theta_scale == "log":
        return np.geomspace(args.theta_min, args.theta_max, args.theta_steps).tolist()
    return np.linspace(args.theta_min, args.theta_max, args.theta_steps).tolist()


def parse_epsilons(text):
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidParams(f"--epsilons must be a comma-separated list of numbers, got {text!r}") from None
    if not values:
        raise InvalidParams("--epsilons is empty")
    return values


def cmd_state_info(args):
    p = protocol.ProtocolParams(args.theta, args.alpha, 0.01, beta=args.beta)
    exact = protocol.ExactBellState.initial(p)
    state = protocol.initial_state(p)
    report = {
        "theta": p.theta,
        "alpha": p.alpha,
        "beta": p.beta,
        "T_diag": [exact.tx, exact.ty, exact.tz],
        "min_eigenvalue": exact.spectrum()[0],
        "psd": bool(exact.spectrum()[0] >= -protocol.PSD_TOL),
        "ppt_min": exact.ppt_min(),
        "entangled": bool(exact.ppt_min() < 0),
        "chsh": exact.chsh(),
        "chsh_local": criteria.chsh_value(state).is_local,
        "alpha_bound": protocol.entanglement_bound(p.theta),
    }
    if args.format == "json":
        emit(json.dumps({k: jsonable(v) for k, v in report.items()}, indent=2) + "\n", args.output)
        return EXIT_OK
    lines = []
    for key, value in report.items():
        if isinstance(value, list):
            value = " ".join(fmt(x) for x in value)
        elif not isinstance(value, bool):
            value = fmt(value)
        lines.append(f"{key}: {value}")
    emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_sequence(args):
    p = protocol.ProtocolParams(args.theta, args.alpha, args.epsilon, beta=args.beta, max_bobs=args.max_bobs)
    n = protocol.count_bobs(p)
    seq = protocol.lambda_sequence(p)
    steps = protocol.simulate_protocol(p, seq.valid_values)
    rows = [
        {"k": s.k, "lambda": s.lam, "witness": s.witness, "ppt_min": s.ppt_min, "chsh": s.chsh}
        for s in steps
    ]
    columns = ("k", "lambda", "witness", "ppt_min", "chsh")
    if args.format == "json":
        payload = {"n_bobs": n, "terminated": seq.terminated_reason, "bobs": [{c: jsonable(r[c]) for c in columns} for r in rows]}
        emit(json.dumps(payload, indent=2) + "\n", args.output)
    elif args.format == "csv":
        emit(render_records(rows, columns, "csv"), args.output)
    else:
        lines = ["  k  lambda_k                 <W_k>                    ppt_min                  chsh"]
        for r in rows:
            lines.append(f"{r['k']:3d}  {fmt(r['lambda']):<24} {fmt(r['witness']):<24} {fmt(r['ppt_min']):<24} {fmt(r['chsh'])}")
        lines.append(f"n_bobs {n} ({seq.terminated_reason})")
        emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_sweep(args):
    epsilons = parse_epsilons(args.epsilons)
    records = run_sweep(theta_grid(args), epsilons, args.alpha, args.max_bobs)
    text = render_records([asdict(r) for r in records], SWEEP_COLUMNS, args.format)
    emit(text, args.output)
    return EXIT_OK


def cmd_find_theta(args):
    theta = protocol.find_theta_for_n(args.n, args.alpha, args.epsilon)
    emit(f"{mp.nstr(theta, 17)}\n", args.output)
    return EXIT_OK


def cmd_verify(args):
    if args.samples == 0:
        print("warning: --samples 0, Monte-Carlo suites are vacuous", file=sys.stderr)
    results = verification.run_all(args.seed, args.samples, args.channel_samples)
    text = "\n".join(r.line() for r in results) + "\n"
    emit(text, args.output)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def build_parser():
    parser = argparse.ArgumentParser(prog="seqwitness", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("text", "csv", "json"), default="text"):
        p.add_argument("--output", help="write to this file instead of stdout")
        p.add_argument("--format", choices=formats, default=default)

    def state_flags(p):
        p.add_argument("--theta", required=True, help="angle in radians, in (0, pi/4]; decimal strings may go below 1e-308")
        p.add_argument("--alpha", default="1.0")
        p.add_argument("--beta", default=None, help="z weight of the asymmetric state, 0 < beta < alpha")

    p = sub.add_parser("state-info", help="diagnostics of the initial state")
    state_flags(p)
    common(p)
    p.set_defaults(func=cmd_state_info)

    p = sub.add_parser("sequence", help="per-Bob table of one run")
    state_flags(p)
    p.add_argument("--epsilon", default="0.01")
    p.add_argument("--max-bobs", type=int, default=protocol.DEFAULT_MAX_BOBS)
    common(p)
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("sweep", help="Bob counts over a theta grid for several epsilons")
    p.add_argument("--theta-min", type=float, default=0.01)
    p.add_argument("--theta-max", type=float, default=math.pi / 4)
    p.add_argument("--theta-steps", type=int, default=50)
    p.add_argument("--theta-scale", choices=("log", "linear"), default="log")
    p.add_argument("--epsilons", default="0.1,0.01,0.001")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--max-bobs", type=int, default=protocol.DEFAULT_MAX_BOBS)
    common(p, ("csv", "json"), "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("find-theta", help="an angle at which at least N Bobs detect")
    p.add_argument("n", type=int)
    p.add_argument("--alpha", default="1.0")
    p.add_argument("--epsilon", default="0.01")
    p.add_argument("--output")
    p.set_defaults(func=cmd_find_theta)

    p = sub.add_parser("verify", help="run the self-check suites")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=100_000, help="product states drawn")
    p.add_argument("--channel-samples", type=int, default=1000, help="random pairs for the channel and round-trip suites")
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidParams, NotFound) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalInconsistency as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
