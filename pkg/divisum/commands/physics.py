import argparse

from mpmath import mp

from divisum import schemas
from divisum.commands import emit
from divisum.identities import EXTERNAL_SCENARIOS
from divisum.verify import PhysicsReport, physics_cancellation


def skipped_scenarios() -> list[str]:
    return [
        f"{name}: {entry['status']}" for name, entry in sorted(EXTERNAL_SCENARIOS.items())
    ]


def physics_response(report: PhysicsReport) -> schemas.PhysicsReportResponse:
    return schemas.PhysicsReportResponse(
        precision_bits=report.precision_bits,
        value=report.value.to_decimal_string(),
        err=report.value.radius_string(),
        route_d_value=report.route_d.to_decimal_string(),
        route_printed_value=report.value.to_decimal_string(),
        route_difference=mp.nstr(report.route_difference, 5),
        routes_agree_exactly=report.routes_agree_exactly,
        perturbation_shift=mp.nstr(report.perturbation_shift, 5),
        tolerance=mp.nstr(report.tolerance, 3),
        passed=report.passed,
        skipped=skipped_scenarios(),
        wall_ms=round(report.wall_ms, 3),
    )


def cmd_physics(args: argparse.Namespace, config) -> int:
    """Check that the printed combination of L(Δ, s) values vanishes"""
    report = physics_cancellation(config.precision_bits, config.cache_dir)
    response = physics_response(report)
    row = response.model_dump(by_alias=True, exclude={"skipped"})
    lines = [
        f"printed route: {report.value!r}",
        f"D route:       {report.route_d!r} (equals minus the printed route)",
        f"routes agree symbolically: {report.routes_agree_exactly}",
        f"|D route + printed route| = {response.route_difference}",
        f"shift after L(2) -> L(2)(1 + 1e-20): {response.perturbation_shift}",
        f"tolerance {response.tolerance}: {'pass' if report.passed else 'FAIL'}",
    ]
    lines += [f"skipped {entry}" for entry in response.skipped]
    emit(config, response, [row], lines)
    return 0 if report.passed else 1


def register(subparsers) -> None:
    parser = subparsers.add_parser("physics", help="physics cancellation check")
    commands = parser.add_subparsers(dest="check", required=True)
    cancellation = commands.add_parser(
        "cancellation", help="combination of L(Δ, 2), L(Δ, 4), L(Δ, 6)"
    )
    cancellation.set_defaults(handler=cmd_physics)
