import argparse

from cli.commands.command_base import CommandBase, fmt
from cli.responses.response_types import LeslieR0Response, SplitR0Response
from core.core_model import SplitSystem
from engine.leslie import (closed_form_r0_report, fertility_norm,
                           survival_radius_bound, truncate)
from engine.resolvent_ngm import r0
from engine.spectral import SpectralResult, spectral_radius

DEFAULT_TRUNCATION = 64


def _diagnostics(result: SpectralResult) -> str:
    return f"({result.method.value}, {result.iterations} iterations, residual {result.residual:.3e})"


class R0Command(CommandBase):
    """
    Prints R0 and r(A) with method diagnostics. A Leslie model gets its closed form plus one truncation.
    """

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        self.add_model_argument(parser)
        parser.add_argument(
            "--truncate-n", type=int, default=DEFAULT_TRUNCATION,
            help=f"Leslie models only: truncation compared with the closed form (default {DEFAULT_TRUNCATION})",
        )
        self.add_json_argument(parser)

    def execute(self, args: argparse.Namespace) -> int:
        model = self.load_model(args.model)
        if isinstance(model, SplitSystem):
            self._split(model, args.json)
        else:
            self._leslie(model, args.truncate_n, args.json)
        return 0

    def _split(self, sys: SplitSystem, as_json: bool) -> None:
        tol = sys.tolerances
        reproduction = r0(sys, tol)
        radius = spectral_radius(sys.A, tol)
        text = "\n".join([
            f"R0   = {fmt(reproduction.radius)} {_diagnostics(reproduction)}",
            f"r(A) = {fmt(radius.radius)} {_diagnostics(radius)}",
            f"r(T) = {fmt(sys.r_T)}",
        ])
        self.emit(SplitR0Response(r0=reproduction, rA=radius, r_T=sys.r_T), text, as_json)

    def _leslie(self, model, n: int, as_json: bool) -> None:
        closed = closed_form_r0_report(model)
        truncation = truncate(model, n)
        truncated_r0 = r0(truncation).radius
        truncated_rA = spectral_radius(truncation.A, truncation.tolerances).radius
        bound = survival_radius_bound(model)
        norm = fertility_norm(model)
        text = "\n".join([
            f"R0 (closed form)  = {fmt(closed.value)} (error bound {closed.error_bound:.3e}, {closed.terms} terms)",
            f"R0 (n={n})        = {fmt(truncated_r0)}",
            f"r(A_n) (n={n})    = {fmt(truncated_rA)}",
            f"r(T) <= {fmt(bound.bound)} (m={bound.m}, epsilon={fmt(bound.epsilon)})",
            f"||f||_q           = {fmt(norm)}",
        ])
        payload = LeslieR0Response(
            closed_form=closed,
            truncation_n=n,
            truncated_r0=truncated_r0,
            truncated_rA=truncated_rA,
            survival_bound=bound,
            fertility_norm=norm,
        )
        self.emit(payload, text, as_json)
