"""
LinkSimulatorApp - Main application controller for the body-channel link simulator
"""
import argparse
import logging
import sys

from src.command_manager import CommandManager
from src.commands.eye_command import EyeCommand
from src.commands.run_command import RunCommand
from src.commands.sweep_ber_command import SweepBerCommand
from src.commands.sweep_rejection_command import SweepRejectionCommand
from src.commands.trajectory_command import TrajectoryCommand
from src.config_manager import DEFAULT_CONFIG_PATH, ConfigManager
from src.errors import LinkSimError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


class LinkSimulatorApp:
    """
    Main application controller class that manages configuration, command
    registration and the exit-code contract.
    """

    def __init__(self):
        """Initialize the LinkSimulatorApp with default values"""
        self.commandManager = None
        self.configManager = None
        self.parser = None
        self.exitCode = EXIT_OK
        self.app_title = "linksim"

    def initialize(self, config_path=DEFAULT_CONFIG_PATH):
        """
        Initialize the configuration manager, the commands and the parser

        Args:
            config_path (str): Defaults file for the configuration manager
        """
        self.configPath = config_path
        self.commandManager = CommandManager()
        self.parser = argparse.ArgumentParser(
            prog=self.app_title,
            description="Integrate-and-dump NRZ body-channel link simulator.")
        verbosity = self.parser.add_mutually_exclusive_group()
        verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
        verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
        self._register_commands()

    def _register_commands(self):
        """Register all subcommands with the command manager and the parser"""
        subparsers = self.parser.add_subparsers(dest="command", required=True)
        for command in (RunCommand(), SweepRejectionCommand(), SweepBerCommand(), EyeCommand(),
                        TrajectoryCommand()):
            sub = subparsers.add_parser(command.name, help=command.help)
            command.addArguments(sub)
            self.commandManager.registerCommand(command.name, command)

    def _configure_logging(self, args):
        level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
        logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)

    def run(self, argv=None):
        """
        Parse arguments and execute one command

        Args:
            argv (list, optional): Arguments, sys.argv[1:] when omitted

        Returns:
            int: Exit code
        """
        args = self.parser.parse_args(argv)
        self._configure_logging(args)
        command = self.commandManager.getCommand(args.command)
        try:
            self.configManager = ConfigManager()
            self.configManager.initialize(self.configPath)
            command.initialize(self.configManager, self)
            logger.debug("command %s started", args.command)
            self.exitCode = command.execute(args)
            logger.debug("command %s finished", args.command)
        except LinkSimError as err:
            print(f"error: {err}", file=sys.stderr)
            self.exitCode = EXIT_INVALID
        except OSError as err:
            print(f"error: {err}", file=sys.stderr)
            self.exitCode = EXIT_IO
        return self.exitCode

    def exit(self):
        """
        Clean up the last command

        Returns:
            int: The exit code of the last run
        """
        if self.commandManager and self.commandManager.getCurrentCommand():
            self.commandManager.getCurrentCommand().cleanup()
        return self.exitCode
