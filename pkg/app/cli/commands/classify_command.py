import argparse

from cli.commands.command_base import CommandBase
from cli.commands.r0_command import DEFAULT_TRUNCATION
from cli.responses.response_types import ClassifyResponse
from core.core_model import SplitSystem
from engine.leslie import truncate
from engine.trichotomy import TrichotomyCase, classify, classify_strict

# Scripts branch on these instead of parsing the verdict.
CASE_EXIT_CODES = {
    TrichotomyCase.SUPERCRITICAL_A: 10,
    TrichotomyCase.CRITICAL_B: 11,
    TrichotomyCase.SUBCRITICAL_C: 12,
}


class ClassifyCommand(CommandBase):
    """
    Prints the trichotomy verdict. Leslie models are classified through a truncation.
    """

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        self.add_model_argument(parser)
        parser.add_argument("--strict", action="store_true", help="Certify strict inequalities")
        parser.add_argument("--no-case-exit", action="store_true", help="Exit 0 instead of 10/11/12")
        parser.add_argument(
            "--truncate-n", type=int, default=DEFAULT_TRUNCATION,
            help=f"Leslie models only: truncation to classify (default {DEFAULT_TRUNCATION})",
        )
        self.add_json_argument(parser)

    def execute(self, args: argparse.Namespace) -> int:
        model = self.load_model(args.model)
        truncation_n = None
        if not isinstance(model, SplitSystem):
            truncation_n = args.truncate_n
            model = truncate(model, truncation_n)

        verdict = classify_strict(model) if args.strict else classify(model)
        exit_code = 0 if args.no_case_exit else CASE_EXIT_CODES[verdict.case]
        description = verdict.describe()

        lines = [description]
        if verdict.unmet_preconditions:
            lines.append("strictness not certified: " + "; ".join(verdict.unmet_preconditions))
        if verdict.boundary_flag:
            lines.append("warning: a value lies within tol_eq of 1")

        payload = ClassifyResponse(
            verdict=verdict, description=description, exit_code=exit_code, truncation_n=truncation_n
        )
        self.emit(payload, "\n".join(lines), args.json)
        return exit_code
