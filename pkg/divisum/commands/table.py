import argparse

from divisum import schemas
from divisum.boundary import z_term_real, z_term_string
from divisum.commands import emit
from divisum.exceptions import DomainError
from divisum.jacobi import q_construct
from divisum.lfun import completed_L
from divisum.verify import eigenforms_for


def cmd_table_q(args: argparse.Namespace, config) -> int:
    """Closed form of Q_d^(α,β): P, R and the decay constant"""
    Q = q_construct(args.d, args.alpha, args.beta)
    response = schemas.QTableResponse(
        d=Q.d,
        alpha=Q.alpha,
        beta=Q.beta,
        P=[str(c) for c in Q.P.coefficients],
        R=[str(c) for c in Q.R.coefficients],
        C=str(Q.asymptotic_constant),
    )
    rows = [
        {"part": part, "power": j, "coefficient": c}
        for part, coeffs in (("P", response.P), ("R", response.R))
        for j, c in enumerate(coeffs)
    ]
    lines = [
        f"Q_{Q.d}^({Q.alpha},{Q.beta})(x) = P(x)·log|(x+1)/(x-1)|"
        f" + R(x)/((x-1)^{Q.alpha}(x+1)^{Q.beta})",
        f"P = {response.P}",
        f"R = {response.R}",
        f"Q(x) ~ {response.C}·x^-{Q.decay_order}",
    ]
    emit(config, response, rows, lines)
    return 0


def cmd_table_z(args: argparse.Namespace, config) -> int:
    """One Z-term, symbolic and numeric"""
    expression = z_term_string(args.d, args.alpha, args.beta, args.n)
    value = z_term_real(args.d, args.alpha, args.beta, args.n, config.precision_bits)
    response = schemas.ZTableResponse(
        d=args.d,
        alpha=args.alpha,
        beta=args.beta,
        n=args.n,
        expression=expression,
        value=value.to_decimal_string(),
        err=value.radius_string(),
    )
    lines = [
        f"Z_{args.d}^({args.alpha},{args.beta})({args.n}) = {expression}",
        f"  = {value!r}",
    ]
    emit(config, response, [response.model_dump()], lines)
    return 0


def _forms(weight: int, config, n_max: int = 1):
    forms = eigenforms_for(weight, config.precision_bits, n_max, config.cache_dir)
    if not forms:
        raise DomainError(f"there are no cusp forms of weight {weight}")
    return forms


def cmd_table_eigenforms(args: argparse.Namespace, config) -> int:
    """Leading coefficients of the normalized eigenforms of one weight"""
    forms = _forms(args.weight, config, args.count)
    rows = [
        schemas.EigenformRow(
            weight=f.weight,
            index=f.conjugacy_tag + 1,
            coefficients=[f.a(m).to_decimal_string() for m in range(1, args.count + 1)],
        )
        for f in forms
    ]
    response = schemas.TableResponse(kind="eigenforms", rows=rows)
    lines = []
    for row in rows:
        lines.append(f"f_{row.index} (weight {row.weight}):")
        lines.extend(f"  a_{m} = {c}" for m, c in enumerate(row.coefficients, start=1))
    flat = [
        {"weight": row.weight, "index": row.index, "m": m, "a_m": c}
        for row in rows
        for m, c in enumerate(row.coefficients, start=1)
    ]
    emit(config, response, flat, lines)
    return 0


def cmd_table_lvalues(args: argparse.Namespace, config) -> int:
    """Completed L-values L*(f, s) for s = 1..k-1"""
    prec = config.precision_bits
    rows = []
    for f in _forms(args.weight, config):
        for s in range(1, f.weight):
            value = completed_L(f, s, prec).value
            rows.append(
                schemas.LValueRow(
                    weight=f.weight,
                    index=f.conjugacy_tag + 1,
                    s=s,
                    value=value.to_decimal_string(),
                    err=value.radius_string(),
                )
            )
    response = schemas.TableResponse(kind="lvalues", rows=rows)
    lines = [f"L*(f_{r.index}, {r.s}) = {r.value} ± {r.err}" for r in rows]
    emit(config, response, [r.model_dump() for r in rows], lines)
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("table", help="print tables of Q, Z, eigenforms")
    commands = parser.add_subparsers(dest="kind", required=True)

    q = commands.add_parser("q", help="closed form of Q_d^(alpha,beta)")
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--alpha", type=int, required=True)
    q.add_argument("--beta", type=int, required=True)
    q.set_defaults(handler=cmd_table_q)

    z = commands.add_parser("z", help="Z_d^(alpha,beta)(n)")
    z.add_argument("--d", type=int, required=True)
    z.add_argument("--alpha", type=int, required=True)
    z.add_argument("--beta", type=int, required=True)
    z.add_argument("--n", type=int, required=True)
    z.set_defaults(handler=cmd_table_z)

    eigenforms = commands.add_parser("eigenforms", help="normalized Hecke eigenforms")
    eigenforms.add_argument("--weight", type=int, required=True)
    eigenforms.add_argument("--count", type=int, default=10)
    eigenforms.set_defaults(handler=cmd_table_eigenforms)

    lvalues = commands.add_parser("lvalues", help="completed L-values")
    lvalues.add_argument("--weight", type=int, required=True)
    lvalues.set_defaults(handler=cmd_table_lvalues)
