import argparse

import numpy as np

from cli.commands.command_base import CommandBase, fmt
from cli.responses.response_types import SimulateResponse
from engine.dynamics import growth_rate, iterate
from engine.resolvent_ngm import r0
from engine.spectral import spectral_radius


def _side(value: float, tol_eq: float) -> int:
    return 0 if abs(value - 1.0) <= tol_eq else int(np.sign(value - 1.0))


class SimulateCommand(CommandBase):
    """
    Iterates x -> A x and compares the observed growth with r(A) and R0.
    """

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        self.add_model_argument(parser)
        parser.add_argument("--steps", type=int, required=True)
        parser.add_argument("--x0", default=None, help="Initial state v1,v2,... (default all ones)")
        parser.add_argument("--burn-in", type=int, default=None, help="Defaults to steps // 5")
        self.add_json_argument(parser)

    def execute(self, args: argparse.Namespace) -> int:
        sys = self.load_split(args.model)
        tol = self.tolerances_of(sys)
        x0 = np.ones(sys.n) if args.x0 is None else np.array(self.parse_list(args.x0, "--x0"))
        burn_in = args.steps // 5 if args.burn_in is None else args.burn_in

        trajectory = iterate(sys.A, x0, args.steps)
        rate = growth_rate(trajectory, burn_in)
        radius = spectral_radius(sys.A, tol).radius
        reproduction = r0(sys, tol).radius
        consistent = _side(rate, tol.tol_eq) == _side(radius, tol.tol_eq) == _side(reproduction, tol.tol_eq)
        if not consistent:
            self.logger.warning(
                f"Observed growth {rate!r} disagrees in sign with r(A)={radius!r}, R0={reproduction!r}."
            )

        payload = SimulateResponse(
            growth_rate=rate,
            rA=radius,
            r0=reproduction,
            steps=trajectory.steps,
            burn_in=burn_in,
            absorbed_at_zero=trajectory.absorbed_at_zero,
            consistent=consistent,
        )
        lines = [
            f"growth rate = {fmt(rate)} over steps {burn_in}..{trajectory.steps}"
            + (" (absorbed at zero)" if trajectory.absorbed_at_zero else ""),
            f"r(A) = {fmt(radius)}, R0 = {fmt(reproduction)}",
            "consistent: sign(growth - 1) = sign(r(A) - 1) = sign(R0 - 1)" if consistent
            else "INCONSISTENT: sign(growth - 1), sign(r(A) - 1) and sign(R0 - 1) differ",
        ]
        self.emit(payload, "\n".join(lines), args.json)
        return 0
