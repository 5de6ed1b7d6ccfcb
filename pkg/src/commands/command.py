"""
Command - Base class for all command-line subcommands
"""
import logging
import os

logger = logging.getLogger(__name__)

DEFAULT_OUT_DIR = "out"


class Command:
    """
    Base command class that all subcommands inherit from.
    Defines the interface the app drives: arguments, execution and cleanup.
    """
    name = ""
    help = ""

    def initialize(self, config_manager, app_reference=None):
        """
        Initialize the command

        Args:
            config_manager (ConfigManager): The application configuration manager
            app_reference: Reference to the main application instance
        """
        self.config_manager = config_manager
        self.app = app_reference

    def addArguments(self, parser):
        """
        Declare the command's arguments

        Args:
            parser (argparse.ArgumentParser): The subcommand's parser
        """
        pass

    def execute(self, args):
        """
        Run the command

        Args:
            args (argparse.Namespace): Parsed arguments

        Returns:
            int: Exit code
        """
        return 0

    def cleanup(self):
        """Clean up any command resources"""
        pass

    # -- shared scenario handling -------------------------------------------

    def addScenarioArguments(self, parser, config_positional=True):
        if config_positional:
            parser.add_argument("config", nargs="?", default=None,
                                help="scenario JSON file merged over the defaults")
        else:
            parser.add_argument("--config", dest="config", default=None,
                                help="scenario JSON file merged over the defaults")
        parser.add_argument("--preset", default=None,
                            help="named scenario from data/presets (e.g. fig8k)")
        parser.add_argument("--seed", type=int, default=None, help="noise seed override")
        parser.add_argument("--out-dir", dest="out_dir", default=DEFAULT_OUT_DIR,
                            help="directory for artifacts (default: %(default)s)")

    def resolveScenario(self, args):
        """
        Layer preset, user file and overrides into the configuration

        Returns:
            Scenario: The validated scenario
        """
        if args.preset:
            self.config_manager.loadPreset(args.preset)
        if args.config:
            self.config_manager.loadScenarioFile(args.config)
        if args.seed is not None:
            self.config_manager.setSetting("noise.seed", args.seed)
        return self.config_manager.buildScenario()

    def outputPath(self, args, explicit, default_name):
        return explicit if explicit else os.path.join(args.out_dir, default_name)
