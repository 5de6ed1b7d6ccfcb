"""
RunCommand - Runs one scenario through both receivers and writes its artifacts
"""
import json
import logging
import sys

from src.commands.command import Command
from src.link.artifact_writer import ArtifactWriter
from src.link.link_engine import LinkEngine, RunReport

logger = logging.getLogger(__name__)


class RunCommand(Command):
    """run [config] --preset NAME --seed N --out-dir DIR"""
    name = "run"
    help = "run one scenario and write its report and artifacts"

    def addArguments(self, parser):
        self.addScenarioArguments(parser)

    def execute(self, args):
        scenario = self.resolveScenario(args)
        logger.info("running scenario %s (%d bits)", scenario.name, scenario.data.n_bits)

        run = LinkEngine().runScenario(scenario)
        report = RunReport.fromRun(run)

        writer = ArtifactWriter(args.out_dir)
        writer.initialize()
        writer.writeRun(run, report, scenario.to_dict())

        logger.info("BER direct %.4g, integrated %.4g",
                    report.ber_direct.rate, report.ber_integrated.rate)
        json.dump(report.to_dict(), sys.stdout, indent=4, sort_keys=True)
        sys.stdout.write("\n")
        return 0
