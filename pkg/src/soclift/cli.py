"""Command-line interface.

Exit codes: 0 the command ran and answered (whatever the answer),
1 a claim failed (verification failure, lift of a non-representable
slice), 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fileio
from .classify import classify_orthogonal, classify_slice
from .errors import (
    EmptyInterval,
    InputError,
    NotInSlice,
    NotSocr,
    NumericalFailure,
    SamplingExhausted,
    VerificationFailed,
)
from .lifts import lift_slice, preimage, q2_violation
from .linalg import SymMat3, svec
from .spectra import (
    AffineSocRep,
    LMI,
    affine_soc_rep,
    agreement_stats,
    image_subspace,
)
from .verify import verify_backward, verify_forward

EXIT_OK = 0
EXIT_CLAIM_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERICAL = 3


def _emit(payload: dict, pretty: bool) -> None:
    print(fileio.dump_report(payload, pretty))


def _cmd_classify(args) -> int:
    if (args.matrix is None) == (args.subspace is None):
        raise InputError("provide exactly one of --matrix or --subspace")
    if args.matrix is not None:
        b = fileio.load_matrix(args.matrix)
        verdict = classify_orthogonal(b, args.tol)
    else:
        sub = fileio.load_subspace(args.subspace)
        verdict = classify_slice(sub, seed=args.seed)
    _emit(verdict.to_dict(), args.pretty)
    return EXIT_OK


def _cmd_lift(args) -> int:
    sub = fileio.load_subspace(args.subspace)
    try:
        cert = lift_slice(sub, seed=args.seed)
    except NotSocr as exc:
        _emit({"lifted": False, "reason": str(exc)}, args.pretty)
        return EXIT_CLAIM_FAILED
    text = fileio.save_certificate(cert, args.output, args.pretty)
    if args.output is None:
        print(text)
    else:
        _emit(
            {"lifted": True, "certificate": args.output,
             "provenance": cert.provenance.value},
            args.pretty,
        )
    return EXIT_OK


def _cmd_verify(args) -> int:
    cert = fileio.load_certificate(args.cert)
    sub = fileio.load_subspace(args.subspace)
    forward = verify_forward(
        cert, sub, count=args.samples, seed=args.seed, tol=args.tol
    )
    backward = verify_backward(
        cert, sub, count=max(args.samples // 10, 1), seed=args.seed + 1,
        tol=max(args.tol, 1e-7),
    )
    passed = forward.passed and backward.passed
    _emit(
        {
            "passed": passed,
            "forward": forward.to_dict(),
            "backward": backward.to_dict(),
        },
        args.pretty,
    )
    return EXIT_OK if passed else EXIT_CLAIM_FAILED


def _cmd_preimage(args) -> int:
    cert = fileio.load_certificate(args.cert)
    a = fileio.load_matrix(args.matrix)
    z = preimage(cert, a, args.tol)
    resid = float(np.linalg.norm(cert.G @ z - svec(a)))
    _emit(
        {
            "z": z.tolist(),
            "residual": resid,
            "cone_violation": float(q2_violation(z)),
        },
        args.pretty,
    )
    return EXIT_OK


def _cmd_spectra(args) -> int:
    lmi = fileio.load_lmi(args.lmi)
    result = affine_soc_rep(lmi, seed=args.seed)
    payload = result.to_dict()
    if isinstance(result, AffineSocRep) and args.output:
        fileio._dump_json(payload, args.output, args.pretty)
        _emit({"written": args.output, "inapplicable": False}, args.pretty)
    else:
        _emit(payload, args.pretty)
    return EXIT_OK


def _table1_cases() -> list[tuple[str, SymMat3, bool]]:
    return [
        ("a11 = a22", SymMat3.diag(1.0, -1.0, 0.0), True),
        ("a11 = a22 + a33", SymMat3.diag(1.0, -1.0, -1.0), False),
        (
            "a22 = a13",
            SymMat3.from_array(
                [[0.0, 0.0, -0.5], [0.0, 1.0, 0.0], [-0.5, 0.0, 0.0]]
            ),
            False,
        ),
    ]


def _cmd_examples(args) -> int:
    if args.which == "table1":
        rows = []
        all_match = True
        for name, b, expected in _table1_cases():
            verdict = classify_orthogonal(b)
            rows.append(
                {
                    "slice": name,
                    "normal": b.mat.tolist(),
                    "computed_socr": verdict.socr,
                    "expected_socr": expected,
                    "reason": verdict.reason.value,
                }
            )
            all_match &= verdict.socr == expected
        _emit({"rows": rows, "all_match": all_match}, args.pretty)
        return EXIT_OK if all_match else EXIT_CLAIM_FAILED
    # eliptope: the 3x3 correlation matrices
    lmi = LMI(
        (
            SymMat3(0, 0, 0, 1, 0, 0),
            SymMat3(0, 0, 0, 0, 1, 0),
            SymMat3(0, 0, 0, 0, 0, 1),
        ),
        SymMat3.identity(),
    )
    result = affine_soc_rep(lmi, seed=args.seed)
    if not isinstance(result, AffineSocRep):
        _emit(result.to_dict(), args.pretty)
        return EXIT_CLAIM_FAILED
    stats = agreement_stats(
        result, count=args.samples, seed=args.seed, box=1.2
    )
    payload = {
        "representation": result.to_dict(),
        "span_dimension": image_subspace(lmi).dim,
        "agreement": stats,
    }
    _emit(payload, args.pretty)
    return EXIT_OK if stats["disagreements"] == 0 else EXIT_CLAIM_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soclift",
        description="Second-order cone representability of slices of the "
        "3x3 PSD cone, with verified lift certificates.",
    )
    parser.add_argument("--pretty", action="store_true",
                        help="indent JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a slice or a normal matrix")
    p.add_argument("--matrix", help="JSON matrix file (the normal B)")
    p.add_argument("--subspace", help="JSON subspace file")
    p.add_argument("--tol", type=float, default=None,
                   help="zero tolerance for the inertia test")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("lift", help="synthesize a certificate for a slice")
    p.add_argument("--subspace", required=True)
    p.add_argument("-o", "--output", help="certificate output path")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_lift)

    p = sub.add_parser("verify", help="verify a certificate against a slice")
    p.add_argument("--cert", required=True)
    p.add_argument("--subspace", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("preimage", help="cone point mapping to a matrix")
    p.add_argument("--cert", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_preimage)

    p = sub.add_parser("spectra", help="affine SOC representation of an LMI")
    p.add_argument("--lmi", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_spectra)

    p = sub.add_parser("examples", help="reproduce the worked examples")
    p.add_argument("which", choices=["table1", "eliptope"])
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_examples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(fileio.dump_report({"error": str(exc)}), file=sys.stderr)
        return EXIT_BAD_INPUT
    except (NotInSlice, EmptyInterval) as exc:
        print(
            fileio.dump_report(
                {"error": str(exc), "kind": type(exc).__name__}
            ),
            file=sys.stderr,
        )
        return EXIT_BAD_INPUT
    except (NumericalFailure, SamplingExhausted) as exc:
        print(
            fileio.dump_report(
                {"error": str(exc), "kind": type(exc).__name__}
            ),
            file=sys.stderr,
        )
        return EXIT_NUMERICAL
    except (VerificationFailed, NotSocr) as exc:
        print(
            fileio.dump_report(
                {"error": str(exc), "kind": type(exc).__name__}
            ),
            file=sys.stderr,
        )
        return EXIT_CLAIM_FAILED


if __name__ == "__main__":
    sys.exit(main())
