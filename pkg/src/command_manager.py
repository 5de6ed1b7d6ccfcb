"""
CommandManager - Registry of the named command-line subcommands
"""
import logging

logger = logging.getLogger(__name__)


class CommandManager:
    """
    Holds the application's commands by name and tracks the one that ran last.
    """

    def __init__(self):
        """Initialize the CommandManager with an empty registry"""
        self.currentCommand = None
        self.commands = {}

    def registerCommand(self, name, command):
        """
        Register a command with the manager

        Args:
            name (str): Subcommand name, as typed on the command line
            command (Command): The command object to register
        """
        self.commands[name] = command

    def getCommand(self, name):
        """
        Look up a command and make it current

        Args:
            name (str): The subcommand name

        Returns:
            Command: The command, or None if no such command is registered
        """
        if name not in self.commands:
            logger.error("command %r not found, available: %s", name, list(self.commands))
            return None
        if self.currentCommand and self.currentCommand is not self.commands[name]:
            self.currentCommand.cleanup()
        self.currentCommand = self.commands[name]
        return self.currentCommand

    def getCurrentCommand(self):
        return self.currentCommand
