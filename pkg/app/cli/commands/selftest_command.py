import argparse

from cli.commands.command_base import CommandBase
from core.core_model import Tolerances
from engine.oracle_harness import GenConfig, cross_validate, render_report

EXIT_INVARIANT_FAILURE = 3


class SelfTestCommand(CommandBase):
    """
    Runs the invariant battery over seeded random splittings.
    """

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--count", type=int, default=100)
        parser.add_argument("--seed", type=int, default=1)
        parser.add_argument("--n-max", type=int, default=8)
        parser.add_argument("--density", type=float, default=0.5)
        parser.add_argument("--scale", type=float, default=1.0)
        parser.add_argument("--target-rt", default="0.1,0.5,0.9", help="r(T) targets cycled over the instances")
        parser.add_argument("--workers", type=int, default=1)
        self.add_json_argument(parser)

    def execute(self, args: argparse.Namespace) -> int:
        targets = self.parse_list(args.target_rt, "--target-rt")
        cfg = GenConfig(
            n_max=args.n_max, density=args.density, scale=args.scale, seed=args.seed, target_rT=targets[0]
        )
        self.logger.info(f"Running the invariant battery over {args.count} instances (seed {args.seed})...")
        report = cross_validate(args.count, cfg, Tolerances.from_env(), workers=args.workers, targets=targets)
        self.emit(report, render_report(report), args.json)
        return 0 if report.all_passed else EXIT_INVARIANT_FAILURE
