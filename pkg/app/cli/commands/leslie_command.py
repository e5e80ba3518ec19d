import argparse
import math

from cli.commands.command_base import CommandBase, fmt
from cli.responses.response_types import LeslieSeriesResponse, LeslieSeriesRow
from engine.leslie import (closed_form_r0_report, fertility_norm,
                           reproductive_values, survival_radius_bound,
                           truncated_r0_series, truncated_radius_series,
                           truncation_tail_bound)


def _index(value: float) -> str:
    return "inf" if math.isinf(value) else fmt(value)


class LeslieCommand(CommandBase):
    """
    Closed-form R0 of a Leslie model and the table of its truncations.
    """

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        self.add_model_argument(parser)
        parser.add_argument("--truncate", default="1,2,4,8,16,32", help="Ascending truncation sizes n1,n2,...")
        parser.add_argument("--reproductive-values", type=int, default=0, metavar="K",
                            help="Also print the first K reproductive values")
        parser.add_argument("--workers", type=int, default=1)
        self.add_json_argument(parser)

    def execute(self, args: argparse.Namespace) -> int:
        model = self.load_leslie(args.model)
        tol = self.tolerances_of(model)
        n_list = self.parse_list(args.truncate, "--truncate", int)

        closed = closed_form_r0_report(model, tol)
        series = truncated_r0_series(model, n_list, tol, workers=args.workers)
        radii = dict(truncated_radius_series(model, n_list, tol, workers=args.workers))
        rows = [
            LeslieSeriesRow(
                n=n,
                r0=value,
                rA=radii[n],
                gap=closed.value - value,
                tail_bound=truncation_tail_bound(model, n),
            )
            for n, value in series
        ]
        values = reproductive_values(model, args.reproductive_values, tol) if args.reproductive_values > 0 else []
        bound = survival_radius_bound(model)
        payload = LeslieSeriesResponse(
            closed_form=closed,
            survival_bound=bound,
            fertility_norm=fertility_norm(model),
            p=_index(model.p),
            q=_index(model.q),
            rows=rows,
            reproductive_values=values,
        )

        lines = [
            f"closed-form R0 = {fmt(closed.value)} (error bound {closed.error_bound:.3e})",
            f"r(T) <= {fmt(bound.bound)} (m={bound.m}, epsilon={fmt(bound.epsilon)})",
            f"||f||_q = {fmt(payload.fertility_norm)} (p={payload.p}, q={payload.q})",
            "n\tR0_n\tr(A_n)\tgap\ttail_bound",
        ]
        lines.extend(
            f"{row.n}\t{fmt(row.r0)}\t{fmt(row.rA)}\t{row.gap:.3e}\t{row.tail_bound:.3e}" for row in rows
        )
        if values:
            lines.append("reproductive values: " + ", ".join(fmt(v) for v in values))
        self.emit(payload, "\n".join(lines), args.json)
        return 0
