#!/usr/bin/env python3
"""
Body-channel link simulator - Main Entry Point
Integrate-and-dump NRZ receiver experiments from the command line
"""
import sys

from src.app import LinkSimulatorApp


def main(argv=None):
    """Main entry point; returns the process exit code"""
    app = LinkSimulatorApp()
    app.initialize()

    try:
        app.run(argv)
    finally:
        # Clean up resources
        code = app.exit()
    return code


if __name__ == "__main__":
    sys.exit(main())
