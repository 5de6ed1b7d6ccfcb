"""
SweepBerCommand - BER of both receivers along one scenario axis
"""
import logging
import os

from src.commands.command import Command
from src.link.artifact_writer import ArtifactWriter
from src.link.sweep_system import SWEEP_AXES, SweepSystem

logger = logging.getLogger(__name__)


class SweepBerCommand(Command):
    name = "sweep-ber"
    help = "sweep SIR, interferer frequency or SNR and write BER per point"

    def addArguments(self, parser):
        self.addScenarioArguments(parser, config_positional=False)
        parser.add_argument("--axis", required=True, choices=SWEEP_AXES)
        parser.add_argument("--values", nargs="*", type=float, default=[],
                            help="axis values, in sweep order")
        parser.add_argument("--workers", type=int, default=None, help="parallel sweep points")
        parser.add_argument("--decisions", action="store_true",
                            help="also write each point's decisions as decisions_NNN.csv")
        parser.add_argument("-o", "--out", default=None, help="CSV path (default: OUT_DIR/ber_AXIS.csv)")

    def execute(self, args):
        if args.workers is not None:
            self.config_manager.setSetting("max_workers", args.workers)
        base = self.resolveScenario(args)

        sweep = SweepSystem()
        sweep.buildFromAxis(base, args.axis, args.values)
        logger.info("sweeping %s over %d points", args.axis, len(sweep.points))
        results = sweep.runAll()

        writer = ArtifactWriter(args.out_dir)
        writer.writeSweep(results, self.outputPath(args, args.out, f"ber_{args.axis}.csv"))
        if args.decisions:
            for index, (_, run) in enumerate(results):
                writer.writeDecisions(run, os.path.join(args.out_dir, f"decisions_{index:03d}.csv"))
        return 0
