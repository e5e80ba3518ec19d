import argparse

from cli.commands.command_base import CommandBase, fmt
from cli.responses.response_types import CurveResponse
from engine.resolvent_ngm import curve


class CurveCommand(CommandBase):
    """
    Samples lambda -> r(F (lambda I - T)^-1). TSV on stdout, the shape audit on stderr.
    """

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        self.add_model_argument(parser)
        parser.add_argument("--lambda-min", type=float, required=True)
        parser.add_argument("--lambda-max", type=float, required=True)
        parser.add_argument("--samples", type=int, default=16)
        parser.add_argument("--workers", type=int, default=1)
        self.add_json_argument(parser)

    def execute(self, args: argparse.Namespace) -> int:
        sys = self.load_split(args.model)
        sample = curve(sys, args.lambda_min, args.lambda_max, args.samples, workers=args.workers)

        if args.json:
            self.write(CurveResponse(sample=sample).model_dump_json(indent=2))
        else:
            self.write("lambda\tradius")
            for lam, radius in sample.points:
                self.write(f"{fmt(lam)}\t{fmt(radius)}")

        self.write_error(
            f"monotone: {'ok' if sample.monotone_ok else 'FAILED'}, "
            f"convex: {'ok' if sample.convex_ok else 'FAILED'}, "
            f"max_violation: {sample.max_violation:.3e}"
        )
        return 0
