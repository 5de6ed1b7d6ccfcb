"""
EyeCommand - Exports the folded eye of the direct or the integrated receiver
"""
import logging
import sys

from src.commands.command import Command
from src.link.artifact_writer import ArtifactWriter
from src.link.link_engine import LinkEngine

logger = logging.getLogger(__name__)


class EyeCommand(Command):
    name = "eye"
    help = "write eye-diagram traces and a metrics sidecar"

    def addArguments(self, parser):
        self.addScenarioArguments(parser, config_positional=False)
        parser.add_argument("--which", choices=("direct", "integrated"), default="integrated")
        parser.add_argument("-o", "--out", default=None, help="CSV path (default: OUT_DIR/eye_WHICH.csv)")

    def execute(self, args):
        scenario = self.resolveScenario(args)
        run = LinkEngine().runScenario(scenario)
        eye = run.eye_direct() if args.which == "direct" else run.eye_integrated()
        logger.info("%s eye height %.4g V over %d traces", args.which, eye.eye_height, eye.n_traces)

        writer = ArtifactWriter(args.out_dir)
        _, sidecar = writer.writeEye(eye, args.which, scenario.eye_max_traces,
                                     self.outputPath(args, args.out, f"eye_{args.which}.csv"))
        with open(sidecar) as f:
            sys.stdout.write(f.read())
        return 0
