from __future__ import annotations

import argparse
import functools
import os
import sys
from typing import Dict, ForwardRef, List, Optional, TextIO, Type

from dotenv import load_dotenv
from pydantic import ValidationError

from cli.commands.command_base import CommandBase
from core.errors import InputError, NumericalError

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NUMERICAL_ERROR = 2


class CommandLineParser(argparse.ArgumentParser):
    """ArgumentParser that writes help to the application's out and usage errors to its err."""

    def __init__(self, *args, out: Optional[TextIO] = None, err: Optional[TextIO] = None, **kwargs):
        super().__init__(*args, **kwargs)
        self.out = out
        self.err = err

    def print_help(self, file: Optional[TextIO] = None) -> None:
        super().print_help(file or self.out or sys.stdout)

    def error(self, message: str):
        self.print_usage(self.err or sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")

    def exit(self, status: int = 0, message: Optional[str] = None):
        if message:
            (self.err or sys.stderr).write(message)
        raise SystemExit(status)


class CLIApplication:
    """
    CLIApplication is the top-level class of the command line. It loads the environment, registers one command class
    per verb and turns the errors raised by the engine into exit codes.

    Attributes:
        logger (logging.Logger): The general logger instance.
        commands (Dict[str, CommandBase]): Registered commands, keyed by class name.
        out (TextIO): Where results are written. Defaults to stdout.
        err (TextIO): Where diagnostics and error messages are written. Defaults to stderr.
        _development_mode (bool): Indicates if debug logging was requested.

    Methods:
        build_commands() -> None: Builds and registers the commands.
        register_new_command(command_class, name, help_text) -> CommandBase: Registers a new command.
        build_parser() -> CommandLineParser: Lets every command configure its subparser.
        run(argv) -> int: Parses argv, runs the selected command and returns the exit code.
    """
    logger: ForwardRef("logging.Logger")
    commands: Dict[str, CommandBase]
    out: TextIO
    err: TextIO
    _development_mode: bool = False

    def __init__(self, development_mode: bool = False, out: Optional[TextIO] = None, err: Optional[TextIO] = None):
        from logger import build_logger, set_logging_level

        self.logger = build_logger(__name__)
        if development_mode:
            set_logging_level("DEBUG")
        CLIApplication._development_mode = development_mode

        try:
            from dotenv import find_dotenv
            dotenv_path = find_dotenv(usecwd=True)
            if dotenv_path:
                # Load the .env file
                load_dotenv(dotenv_path)
                # Module loggers were built at import, before R0_LOG_LEVEL could come from .env.
                if not development_mode and os.getenv("R0_LOG_LEVEL"):
                    set_logging_level(os.getenv("R0_LOG_LEVEL"))
            else:
                self.logger.debug("No .env file found, using default tolerances.")
        except Exception as e:
            self.logger.error("An unexpected error occurred when loading .env file.")
            raise e

        self.out = out or sys.stdout
        self.err = err or sys.stderr
        self.commands = {}
        self.build_commands()

    def build_commands(self) -> None:
        """
        Registers the commands of the application.

        :return: None
        """
        from cli.commands.r0_command import R0Command

        self.register_new_command(R0Command, "r0", "R0 and r(A) with method diagnostics")
        from cli.commands.classify_command import ClassifyCommand

        self.register_new_command(ClassifyCommand, "classify", "Trichotomy verdict (exit 10/11/12)")
        from cli.commands.curve_command import CurveCommand

        self.register_new_command(CurveCommand, "curve", "Sample lambda -> r(F (lambda I - T)^-1) as TSV")
        from cli.commands.leslie_command import LeslieCommand

        self.register_new_command(LeslieCommand, "leslie", "Closed-form R0 and truncation series")
        from cli.commands.simulate_command import SimulateCommand

        self.register_new_command(SimulateCommand, "simulate", "Observed growth of x -> A x")
        from cli.commands.selftest_command import SelfTestCommand

        self.register_new_command(SelfTestCommand, "selftest", "Invariant battery over random splittings")

    def register_new_command(self, command_class: Type[CommandBase], name: str, help_text: str = "") -> CommandBase:
        """
        Register commands by inserting them in the commands dictionary.
        The created key for the dict is the name of the class, avoiding class duplicate.

        :param command_class: The class of the command to be registered. Used as key for the Dict.
        :param name: The verb typed on the command line.
        :param help_text: One-line description for --help.
        :return: The registered command object.
        """
        try:
            # Check if the command already exists.
            if self.commands.get(command_class.__name__) is not None:
                raise KeyError(
                    f"The key {command_class.__name__} for inserting the command has already been registered for "
                    f"the verb {self.commands[command_class.__name__].name}."
                )
            self.commands[command_class.__name__] = command_class(self, name, help_text)
        except KeyError as e:
            self.logger.error(f"Command {command_class.__name__} is already registered - {e}")
        else:
            self.logger.debug(f"Registering new command: {command_class.__name__}")

        return self.commands[command_class.__name__]

    def build_parser(self) -> CommandLineParser:
        parser = CommandLineParser(
            prog="r0tool", description="Basic reproduction numbers and spectral radii of nonnegative splittings",
            out=self.out, err=self.err,
        )
        parser.add_argument("--debug", action="store_true", help="Log at DEBUG level")
        subparsers = parser.add_subparsers(
            dest="verb", required=True,
            parser_class=functools.partial(CommandLineParser, out=self.out, err=self.err),
        )
        for command in self.commands.values():
            subparser = subparsers.add_parser(command.name, help=command.help, description=command.help)
            command.configure_parser(subparser)
            subparser.set_defaults(command=command)
        return parser

    def run(self, argv: Optional[List[str]] = None) -> int:
        """
        Parses argv, runs the selected command and maps errors to exit codes:
        1 for invalid input, 2 for numerical failures, anything else is the command's own code.

        :return: The exit code.
        """
        parser = self.build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            # argparse exits 2 on usage errors, which is our numerical-failure code.
            return EXIT_OK if e.code in (0, None) else EXIT_INPUT_ERROR

        if args.debug:
            from logger import set_logging_level
            set_logging_level("DEBUG")

        command: CommandBase = args.command
        try:
            return command.execute(args)
        except InputError as e:
            self.logger.error(f"{command.name}: {e}")
            print(f"error: {e}", file=self.err)
            return EXIT_INPUT_ERROR
        except ValidationError as e:
            self.logger.error(f"{command.name}: {e}")
            print(f"error: {e}", file=self.err)
            return EXIT_INPUT_ERROR
        except NumericalError as e:
            self.logger.error(f"{command.name}: {e}")
            print(f"error: {e}", file=self.err)
            return EXIT_NUMERICAL_ERROR
