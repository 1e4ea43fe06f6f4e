import argparse
import logging

from divisum import schemas
from divisum.boundary import z_term_string
from divisum.commands import emit, parse_n_range
from divisum.identities import IDENTITIES, get_identity
from divisum.sums import ConvolutionParams
from divisum.verify import (
    Schedule,
    VerificationReport,
    verify_printed,
    verify_range,
)

logger = logging.getLogger(__name__)


def _z_terms(p: ConvolutionParams) -> str:
    sign = "-" if p.d % 2 else ""
    m = abs(p.n)
    first = z_term_string(p.d, p.r1, p.r2, p.n)
    second = z_term_string(p.d, p.r2, p.r1, p.n)
    return f"{sign}[{first}]·σ_{p.r1}({m}) - [{second}]·σ_{p.r2}({m})"


def report_response(report: VerificationReport) -> schemas.VerificationReportResponse:
    p = report.params
    lhs = report.lhs
    prediction = report.prediction
    extrapolated = lhs.extrapolated
    printed = None
    if report.printed is not None:
        check = report.printed
        printed = schemas.PrintedResponse(
            name=check.name,
            gamma=str(check.gamma),
            lhs=check.lhs.to_decimal_string() if check.lhs is not None else "n/a",
            rhs=check.rhs.to_decimal_string(),
            rhs_expression=check.rhs_expression,
            rhs_matches=check.rhs_matches,
            cusp_matches=check.cusp_matches,
        )
    return schemas.VerificationReportResponse(
        params=schemas.ParamsResponse(d=p.d, r1=p.r1, r2=p.r2, n=p.n),
        lhs=schemas.LhsResponse(
            partials=[
                (N, s.to_decimal_string(), s.radius_string()) for N, s in lhs.partial_sums
            ],
            extrapolated=extrapolated.to_decimal_string() if extrapolated else None,
            err=extrapolated.radius_string() if extrapolated else None,
            rigorous=lhs.rigorous,
            failure=lhs.failure,
        ),
        rhs=schemas.RhsResponse(
            value=report.rhs.to_decimal_string(),
            err=report.rhs.radius_string(),
            z_terms=_z_terms(p),
            cusp=schemas.CuspResponse(
                weight=p.k,
                dim=prediction.dim,
                a_n=[c.to_decimal_string() for c in prediction.contributions],
            ),
        ),
        residual=None if report.residual is None else str(report.residual),
        passed=report.passed,
        printed=printed,
        wall_ms=round(report.wall_ms, 3),
    )


def _row(report: VerificationReport) -> dict:
    p = report.params
    lhs = report.lhs.extrapolated
    row = {
        "d": p.d,
        "r1": p.r1,
        "r2": p.r2,
        "n": p.n,
        "lhs": lhs.to_decimal_string() if lhs else "",
        "lhs_err": lhs.radius_string() if lhs else "",
        "rigorous": report.rigorous,
        "rhs": report.rhs.to_decimal_string(),
        "rhs_err": report.rhs.radius_string(),
        "residual": "" if report.residual is None else str(report.residual),
        "pass": report.passed,
    }
    if report.printed is not None:
        row["gamma"] = str(report.printed.gamma)
    row["wall_ms"] = round(report.wall_ms, 3)
    return row


def _line(report: VerificationReport) -> str:
    p = report.params
    lhs = report.lhs.extrapolated
    status = "pass" if report.passed else "FAIL"
    lhs_text = repr(lhs) if lhs else f"extrapolation failed ({report.lhs.failure})"
    line = f"(d={p.d}, r1={p.r1}, r2={p.r2}, n={p.n}) {status}: LHS {lhs_text}, RHS {report.rhs!r}"
    if report.lhs.leading_coefficient is not None:
        line += f", fitted N^-{p.d} coefficient {report.lhs.leading_coefficient}"
    if report.printed is not None:
        line += f", Γ = {report.printed.gamma}"
    return line


def _emit_reports(reports: list[VerificationReport], config) -> int:
    responses = [report_response(r) for r in reports]
    passed = sum(r.passed for r in reports)
    batch = schemas.VerificationBatchResponse(
        reports=responses, total=len(reports), passed=passed
    )
    lines = [_line(r) for r in reports] + [f"{passed}/{len(reports)} passed"]
    emit(config, batch, [_row(r) for r in reports], lines)
    return 0 if passed == len(reports) else 1


def cmd_verify_theorem(args: argparse.Namespace, config) -> int:
    """Check the identity for every n in the range"""
    ns = parse_n_range(args.n)
    for n in ns:
        ConvolutionParams(args.d, args.r1, args.r2, n)
    reports = verify_range(
        args.d,
        args.r1,
        args.r2,
        ns,
        Schedule.from_config(config),
        config.precision_bits,
        config.rel_tol,
        config.cache_dir,
        config.jobs,
    )
    return _emit_reports(reports, config)


def cmd_named_identity(args: argparse.Namespace, config) -> int:
    """Check a printed identity with its derived Γ-factor"""
    identity = get_identity(args.name)
    lo, hi = identity.default_n
    ns = parse_n_range(args.n) if args.n else list(range(lo, hi + 1))
    reports = verify_printed(
        identity,
        ns,
        Schedule.from_config(config),
        config.precision_bits,
        config.rel_tol,
        config.cache_dir,
        config.jobs,
    )
    return _emit_reports(reports, config)


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="check convolution identities")
    commands = parser.add_subparsers(dest="identity", required=True)

    theorem = commands.add_parser("theorem", help="check the identity for (d, r1, r2)")
    theorem.add_argument("--d", type=int, required=True)
    theorem.add_argument("--r1", type=int, required=True)
    theorem.add_argument("--r2", type=int, required=True)
    theorem.add_argument("--n", required=True, help="n or an inclusive range a..b")
    theorem.set_defaults(handler=cmd_verify_theorem)

    for name in IDENTITIES:
        named = commands.add_parser(name, help=f"check the printed {name} identity")
        named.add_argument("--n", help="n or an inclusive range a..b")
        named.set_defaults(handler=cmd_named_identity, name=name)
