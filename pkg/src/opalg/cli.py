"""``opalg`` command line: JSON in, JSON out.

Exit codes: 0 pass/clean, 1 fail/flag, 2 input error.  ``OPALG_SEED``
replaces the default seed of every subcommand.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import serialize as ser
from .cbnorm import cb_lower_bound, cb_norm_structural
from .instances import generate_instance
from .jordan import (
    NotJordanError,
    adjoint_residual,
    jordan_residual,
    product_residual,
    stormer_decompose,
)
from .suites import suite_conjecture, suite_cor_cp, suite_local_lifting, suite_thm_main
from .yeadon import FactorizationError, build_positive_isometry, yeadon_factorize

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Unreadable or malformed input; maps to exit code 2."""


def default_seed() -> int:
    raw = os.environ.get("OPALG_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"OPALG_SEED must be an integer, got {raw!r}") from None


def _load(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_map(path: str):
    data = _load(path)
    # instance files wrap the map
    if "matrix" not in data and "map" in data:
        data = data["map"]
    try:
        return ser.linmap_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path} is not a linear map: {exc}") from exc


def _load_jordan(path: str):
    from .jordan import build_jordan

    data = _load(path)
    if "spec" in data and "targets" not in data:
        data = data["spec"]
    try:
        if "targets" in data:
            return build_jordan(ser.jordan_spec_from_json(data))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path} is not a Jordan spec: {exc}") from exc
    if "matrix" not in data and "map" in data:
        data = data["map"]
    try:
        return ser.linmap_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path} is not a linear map: {exc}") from exc


def _p(text: str) -> float:
    try:
        p = ser.parse_p(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid exponent {text!r}") from None
    if p < 1:
        raise argparse.ArgumentTypeError("p must be >= 1 or inf")
    return p


def _emit(payload, out: str | None):
    text = ser.dumps(payload)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_check_jordan(args) -> int:
    t = _load_map(args.map)
    res = {
        "jordan_residual": jordan_residual(t),
        "adjoint_residual": adjoint_residual(t),
        "hom_residual": product_residual(t, "hom"),
        "anti_residual": product_residual(t, "anti"),
    }
    ok = res["jordan_residual"] < args.tol
    _emit({"jordan": ok, "tol": args.tol, "residuals": res}, args.output)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_stormer(args) -> int:
    t = _load_map(args.map)
    try:
        d = stormer_decompose(t, seed=args.seed)
    except NotJordanError as exc:
        _emit({"error": str(exc)}, args.output)
        return EXIT_FAIL
    _emit(ser.decomposition_to_json(d), args.output)
    return EXIT_OK


def cmd_cbnorm(args) -> int:
    t = _load_map(args.map)
    est = cb_lower_bound(t, args.p, args.k_max, restarts=args.restarts, seed=args.seed)
    payload = ser.cb_estimate_to_json(est)
    if math.isinf(args.p):
        try:
            exact = cb_norm_structural(stormer_decompose(t, seed=args.seed))
        except (NotJordanError, ArithmeticError):
            exact = None
        if exact is not None:
            payload["upper"] = exact.upper
            payload["certified"] = abs(exact.upper - est.lower) <= 1e-6 * max(exact.upper, 1.0)
    _emit(payload, args.output)
    return EXIT_OK


def cmd_yeadon_factorize(args) -> int:
    t = _load_map(args.map)
    try:
        triple = yeadon_factorize(t, args.p, seed=args.seed)
    except FactorizationError as exc:
        _emit({"error": str(exc), "residuals": exc.residuals}, args.output)
        return EXIT_FAIL
    _emit(ser.triple_to_json(triple), args.output)
    return EXIT_OK


def cmd_yeadon_build(args) -> int:
    j = _load_jordan(args.jordan)
    try:
        t, triple = build_positive_isometry(j, args.p, seed=args.seed)
    except ArithmeticError as exc:
        _emit({"error": str(exc)}, args.output)
        return EXIT_FAIL
    _emit({"map": ser.linmap_to_json(t), "triple": ser.triple_to_json(triple)}, args.output)
    return EXIT_OK


SUITES = {"local-lifting": suite_local_lifting, "cor-cp": suite_cor_cp, "thm-main": suite_thm_main}


def cmd_verify(args) -> int:
    kwargs = {"seed": args.seed, "workers": args.workers}
    if args.trials is not None:
        kwargs["trials"] = args.trials
    if args.p is not None:
        if args.suite != "cor-cp":
            raise InputError("--p only applies to cor-cp")
        kwargs["p"] = args.p
    report = SUITES[args.suite](**kwargs)
    _emit(report.to_json(), args.output)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_conjecture(args) -> int:
    report = suite_conjecture(
        seed=args.seed, trials=args.trials, p=args.p, k_max=args.k_max, restarts=args.restarts, workers=args.workers
    )
    _emit(report.to_json(), args.output)
    return EXIT_OK if not report.flags else EXIT_FAIL


def cmd_generate(args) -> int:
    _emit(generate_instance(args.kind, args.seed), args.output)
    return EXIT_OK


def build_parser(seed: int) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opalg", description="Jordan maps, L^p isometries and cb norms.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_seed=True):
        p.add_argument("-o", "--output", help="write JSON here instead of stdout")
        if with_seed:
            p.add_argument("--seed", type=int, default=seed)
        return p

    p = common(sub.add_parser("check-jordan", help="Jordan *-homomorphism residuals"), with_seed=False)
    p.add_argument("map")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_check_jordan)

    p = common(sub.add_parser("stormer", help="split a Jordan map into hom and anti parts"))
    p.add_argument("map")
    p.set_defaults(func=cmd_stormer)

    p = common(sub.add_parser("cbnorm", help="lower bound (certified at p=inf for Jordan maps)"))
    p.add_argument("map")
    p.add_argument("--p", type=_p, required=True)
    p.add_argument("--k-max", type=int, default=2)
    p.add_argument("--restarts", type=int, default=8)
    p.set_defaults(func=cmd_cbnorm)

    y = sub.add_parser("yeadon", help="positive isometries as w b J").add_subparsers(dest="action", required=True)
    p = common(y.add_parser("factorize"))
    p.add_argument("map")
    p.add_argument("--p", type=_p, required=True)
    p.set_defaults(func=cmd_yeadon_factorize)
    p = common(y.add_parser("build"))
    p.add_argument("jordan", help="Jordan spec (targets) or Jordan map JSON")
    p.add_argument("--p", type=_p, required=True)
    p.set_defaults(func=cmd_yeadon_build)

    p = common(sub.add_parser("verify", help="run a verification suite"))
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--trials", type=int)
    p.add_argument("--p", type=_p)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("conjecture", help="seeded counterexample search (flags only)"))
    p.add_argument("--p", type=_p, default=1.0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--restarts", type=int, default=2)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_conjecture)

    p = common(sub.add_parser("generate", help="seeded random instance"))
    p.add_argument("kind", choices=["jordan", "isometry", "map"])
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    try:
        parser = build_parser(default_seed())
    except InputError as exc:
        print(f"opalg: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"opalg: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # shape mismatches, bad exponents and similar precondition failures
        print(f"opalg: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
