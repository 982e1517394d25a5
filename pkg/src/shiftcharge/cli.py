"""Command-line interface.

Exit status: 0 success, 2 negative mathematical verdict (NotPSD, no charge
representation, ...), 1 usage or parse errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import re
import sys
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .charge import Charge, convolve, is_subnormal_charge, moment_error, sign_census
from .che import (
    che_charge_from_sigma,
    delta_measure_of_charge,
    integrability_test,
    levy_khinchin_of_charge,
)
from .cpd import CpdStatus, find_cpd_weight_multipliers
from .errors import ShiftChargeError, TooFewAtoms, UnknownPattern, WrongShape
from .grws import (
    DEFAULT_EPSILON,
    GrwsParams,
    classify_sector,
    expected_sign_pattern,
    grws_charge,
    grws_moments,
)
from .hankel import (
    Certificate,
    asymptotic_k_det_sign,
    certify_k_hyponormality,
    dominance_threshold,
    k_hyponormality_test,
)
from .rational import as_fraction, fmt
from .seqcalc import MomentSeq, completely_alternating_check
from .sweep import SweepSpec, sweep_rows, write_csv

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # accept "-1/2" and "-1/2:0:5" as values, not options
    _NEG = re.compile(r"^-\.?\d[\d/.:\-]*$")

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = self._NEG

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Charge):
        return obj.to_dict()
    if dataclasses.is_dataclass(obj):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(_jsonable(k)): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(payload) -> None:
    json.dump(_jsonable(payload), sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text: str) -> tuple[Fraction, Fraction, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected lo:hi:steps")
    return _rational(parts[0]), _rational(parts[1]), int(parts[2])


def _load_charge(path: str) -> Charge:
    try:
        if path == "-":
            data = json.load(sys.stdin)
        else:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _UsageError(f"cannot read charge {path!r}: {exc}") from None
    return Charge.from_dict(data)


def _params(args) -> GrwsParams:
    return GrwsParams(args.p, args.N, args.D)


def _add_grws_flags(sp, required: bool = True) -> None:
    sp.add_argument("--p", type=_rational, required=required)
    sp.add_argument("--N", type=_rational, required=required)
    sp.add_argument("--D", type=_rational, required=required)


def _charge_or_grws(args) -> tuple[Optional[Charge], Optional[GrwsParams]]:
    if args.charge is not None:
        return _load_charge(args.charge), None
    if args.p is None or args.N is None or args.D is None:
        raise _UsageError("give --charge FILE or all of --p --N --D")
    return None, _params(args)


def _add_source_flags(sp) -> None:
    sp.add_argument("--charge", help="charge JSON file ('-' for stdin)")
    _add_grws_flags(sp, required=False)


# -- commands -------------------------------------------------------------------


def cmd_classify(args) -> int:
    params = _params(args)
    sector = classify_sector(params)
    try:
        template = str(expected_sign_pattern(sector))
    except UnknownPattern:
        template = "unknown"
    report = {
        "p": params.p,
        "N": params.N,
        "D": params.D,
        "sector": sector.label(),
        "special_line_j": sector.special_line,
        "band": sector.band,
        "expected_sign_pattern": template,
    }
    if args.json:
        _emit(report)
    else:
        line = f"sector {report['sector']}"
        if sector.special_line is not None:
            line += f", special line j={sector.special_line}"
        print(line)
        print(f"expected sign pattern: {template}")
    return EXIT_OK


def _report_dict(report) -> dict:
    return {
        "k": report.k,
        "m_range": report.m_range,
        "horizon_qualified": True,
        "overall": report.overall,
        "first_failure": report.first_failure,
        "verdicts": [
            {"m": m, "kind": v.kind, "witness_indices": v.witness_indices, "witness_value": v.witness_value}
            for m, v in enumerate(report.verdicts)
        ],
    }


def cmd_khyp(args) -> int:
    charge, params = _charge_or_grws(args)
    if charge is not None:
        cert = certify_k_hyponormality(charge, args.k, args.m_range)
        out = _report_dict(cert.report)
        out.update(
            asymptotic_signs=list(cert.signs),
            sign_thresholds=list(cert.thresholds),
            certificate=cert.certificate,
            note=cert.note,
        )
        negative = not cert.report.passed or cert.certificate is Certificate.EVENTUALLY_FAILS
    else:
        report = k_hyponormality_test(grws_moments(params), args.k, args.m_range)
        out = _report_dict(report)
        negative = not report.passed
    _emit(out)
    return EXIT_NEGATIVE if negative else EXIT_OK


def cmd_sweep(args) -> int:
    spec = SweepSpec(
        args.p, args.N, args.D, depth=args.depth, khyp_max=args.khyp_max,
        epsilon=args.epsilon, horizon=args.horizon,
    )
    rows = sweep_rows(spec)
    if args.out in (None, "-"):
        write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
    return EXIT_OK


def cmd_charge(args) -> int:
    gc = grws_charge(_params(args), args.epsilon, depth=args.depth)
    out = gc.charge.to_dict()
    out["depth"] = gc.depth
    out["a_estimate"] = fmt(gc.a_estimate)
    out["a_error"] = fmt(gc.a_error)
    out["sign_pattern"] = str(gc.sign_pattern())
    _emit(out)
    return EXIT_OK


def cmd_moments(args) -> int:
    charge, params = _charge_or_grws(args)
    if charge is not None:
        values = [charge.moment(n) for n in range(args.count)]
        errors = [moment_error(charge, n) for n in range(args.count)]
        _emit({"moments": values, "errors": errors})
    else:
        _emit({"moments": grws_moments(params).prefix(args.count)})
    return EXIT_OK


def cmd_convolve(args) -> int:
    _emit(convolve(_load_charge(args.first), _load_charge(args.second)))
    return EXIT_OK


def cmd_cpd_mult(args) -> int:
    charge, params = _charge_or_grws(args)
    if charge is None:
        charge = grws_charge(params, args.epsilon, depth=args.depth).charge
    verdict = find_cpd_weight_multipliers(charge)
    _emit(
        {
            "status": verdict.status,
            "multipliers": verdict.multipliers,
            "complete": verdict.complete,
            "evidence": verdict.evidence,
        }
    )
    return EXIT_NEGATIVE if verdict.status is CpdStatus.NO_MULTIPLIER else EXIT_OK


def cmd_che_build(args) -> int:
    _emit(che_charge_from_sigma(_load_charge(args.sigma)))
    return EXIT_OK


def cmd_che_check(args) -> int:
    charge = _load_charge(args.charge)
    try:
        lk = levy_khinchin_of_charge(charge)
    except WrongShape as exc:
        _emit({"shape": "wrong", "reason": str(exc)})
        return EXIT_NEGATIVE
    ca = completely_alternating_check(MomentSeq.from_charge(charge), args.depth, args.horizon)
    dm = delta_measure_of_charge(charge)
    integ = integrability_test(dm)
    _emit(
        {
            "shape": "ok",
            "levy_khinchin": {"a": lk.a, "b": lk.b, "nu": lk.nu},
            "completely_alternating": {
                "passed": ca.passed, "depth": ca.depth, "horizon": ca.horizon, "witness": ca.witness,
            },
            "delta_measure": {"c": dm.c, "mu": dm.mu},
            "integrability": {"finite": integ.finite, "value": integ.value},
        }
    )
    return EXIT_OK if ca.passed else EXIT_NEGATIVE


def cmd_asymp_sign(args) -> int:
    charge = _load_charge(args.charge)
    out = {
        "k": args.k,
        "sign": asymptotic_k_det_sign(charge, args.k),
        "sign_census": str(sign_census(charge)[0]),
        "subnormal_charge": is_subnormal_charge(charge) if charge.atoms else None,
    }
    try:
        bound = dominance_threshold(charge, args.k)
        out["dominance"] = {"B": bound.B, "s": bound.s, "L": bound.L, "n_star": bound.n_star}
    except TooFewAtoms as exc:
        out["dominance"] = {"error": str(exc)}
    _emit(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shiftcharge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("classify", help="Magic Square sector of (p, N, D)")
    _add_grws_flags(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("khyp", help="k-hyponormality scan (plus certificate for charges)")
    _add_source_flags(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--m-range", type=int, default=10)
    sp.set_defaults(func=cmd_khyp)

    sp = sub.add_parser("sweep", help="Magic Square grid sweep to CSV")
    sp.add_argument("--p", type=_rational, required=True)
    sp.add_argument("--N", type=_grid, required=True, metavar="LO:HI:STEPS")
    sp.add_argument("--D", type=_grid, required=True, metavar="LO:HI:STEPS")
    sp.add_argument("--depth", type=int, default=12)
    sp.add_argument("--khyp-max", type=int, default=2)
    sp.add_argument("--horizon", type=int, default=8)
    sp.add_argument("--epsilon", type=_rational, default=DEFAULT_EPSILON)
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("charge", help="GRWS representing charge as JSON")
    _add_grws_flags(sp)
    sp.add_argument("--epsilon", type=_rational, default=DEFAULT_EPSILON)
    sp.add_argument("--depth", type=int)
    sp.set_defaults(func=cmd_charge)

    sp = sub.add_parser("moments", help="first moments of a charge or GRWS")
    _add_source_flags(sp)
    sp.add_argument("--count", type=int, default=10)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("convolve", help="multiplicative convolution of two charges")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.set_defaults(func=cmd_convolve)

    sp = sub.add_parser("cpd-mult", help="weight multipliers giving CPD-weights")
    _add_source_flags(sp)
    sp.add_argument("--epsilon", type=_rational, default=DEFAULT_EPSILON)
    sp.add_argument("--depth", type=int, default=12)
    sp.set_defaults(func=cmd_cpd_mult)

    sp = sub.add_parser("che-build", help="C delta_1 - sigma from a positive sigma on [0,1)")
    sp.add_argument("--sigma", required=True)
    sp.set_defaults(func=cmd_che_build)

    sp = sub.add_parser("che-check", help="Levy-Khinchin data and CHE checks of a charge")
    sp.add_argument("--charge", required=True)
    sp.add_argument("--depth", type=int, default=8)
    sp.add_argument("--horizon", type=int, default=16)
    sp.set_defaults(func=cmd_che_check)

    sp = sub.add_parser("asymp-sign", help="asymptotic sign of k x k Hankel determinants")
    sp.add_argument("--charge", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_asymp_sign)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (_UsageError, ShiftChargeError, ValueError) as exc:
        print(f"shiftcharge {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
