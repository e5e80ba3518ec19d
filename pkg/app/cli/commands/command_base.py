import argparse
from logging import Logger
from typing import List, Union

from pydantic import BaseModel

from core.core_model import SplitSystem, Tolerances
from core.errors import BadRange, ModelValidationError
from engine.leslie import LeslieModel


class CommandBase:
    """
    A base command class to inherit from for handling one verb of the command line.

    Attributes:
        name (str): The verb typed on the command line.
        help (str): One-line description shown by --help.
        logger (Logger): The logger object for logging command actions.
        app (CLIApplication): The application the command is registered on.

    Methods:
        configure_parser(parser): Adds the command's arguments. The method that should be overridden.
        execute(args) -> int: Runs the command and returns the exit code. The method that should be overridden.
    """

    __abstract__ = True

    name: str
    help: str = ""
    logger: Logger

    def __init__(self, cli_object, name: str, help_text: str = ""):
        self.app = cli_object
        self.name = name
        self.help = help_text
        from logger import build_logger

        # Build a logger with the class, or child class name.
        self.logger = build_logger(self.__class__.__name__)

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        pass

    def execute(self, args: argparse.Namespace) -> int:
        raise NotImplementedError

    # ___ helpers shared by the commands ___

    @staticmethod
    def add_model_argument(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("model", help="Path to a JSON model file")

    @staticmethod
    def add_json_argument(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--json", action="store_true", help="Emit JSON with full precision")

    def load_model(self, source: str) -> Union[SplitSystem, LeslieModel]:
        from core.commands.model_loader import parse_model

        self.logger.debug(f"Loading model from {source}...")
        return parse_model(source)

    def load_split(self, source: str) -> SplitSystem:
        model = self.load_model(source)
        if not isinstance(model, SplitSystem):
            raise ModelValidationError("kind", f"the {self.name} command needs a split model")
        return model

    def load_leslie(self, source: str) -> LeslieModel:
        model = self.load_model(source)
        if not isinstance(model, LeslieModel):
            raise ModelValidationError("kind", f"the {self.name} command needs a leslie model")
        return model

    @staticmethod
    def tolerances_of(model: Union[SplitSystem, LeslieModel]) -> Tolerances:
        return model.tolerances

    @staticmethod
    def parse_list(text: str, what: str, cast=float) -> List:
        """Comma-separated numbers, e.g. "1,2,4"."""
        try:
            values = [cast(part) for part in text.split(",") if part.strip()]
        except ValueError:
            raise BadRange(f"{what} must be a comma-separated list of numbers, got {text!r}")
        if not values:
            raise BadRange(f"{what} must not be empty")
        return values

    def write(self, text: str = "") -> None:
        print(text, file=self.app.out)

    def write_error(self, text: str) -> None:
        print(text, file=self.app.err)

    def emit(self, payload: BaseModel, text: str, as_json: bool) -> None:
        self.write(payload.model_dump_json(indent=2) if as_json else text)


def fmt(value: float, digits: int = 9) -> str:
    """Numbers are shown with 9 significant digits unless --json asks for full precision."""
    return f"{value:.{digits}g}"
