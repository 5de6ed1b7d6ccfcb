"""
SweepRejectionCommand - Worst-case rejection versus interferer frequency
"""
import logging

from src.commands.command import DEFAULT_OUT_DIR, Command
from src.errors import ConfigError
from src.link.analysis import DEFAULT_REJECTION_CAP_DB, rejection_curve
from src.link.artifact_writer import ArtifactWriter

logger = logging.getLogger(__name__)


class SweepRejectionCommand(Command):
    name = "sweep-rejection"
    help = "write the interferer rejection curve of the integrating receiver"

    def addArguments(self, parser):
        timing = parser.add_mutually_exclusive_group()
        timing.add_argument("--t-b-s", dest="t_b", type=float, default=None,
                            help="bit period in seconds (default: 10 ns)")
        timing.add_argument("--bit-rate-hz", dest="bit_rate", type=float, default=None,
                            help="bit rate in Hz")
        parser.add_argument("--f-lo-hz", dest="f_lo", type=float, default=88e6, help="(default: %(default)s)")
        parser.add_argument("--f-hi-hz", dest="f_hi", type=float, default=108e6, help="(default: %(default)s)")
        parser.add_argument("-n", "--n-points", dest="n", type=int, default=201, help="(default: %(default)s)")
        parser.add_argument("--cap-db", type=float, default=DEFAULT_REJECTION_CAP_DB,
                            help="value reported at exact notches (default: %(default)s)")
        parser.add_argument("--out-dir", dest="out_dir", default=DEFAULT_OUT_DIR)
        parser.add_argument("-o", "--out", default=None, help="CSV path (default: OUT_DIR/rejection.csv)")

    def execute(self, args):
        if args.bit_rate is not None:
            if not args.bit_rate > 0:
                raise ConfigError("bit_rate_hz", "must be > 0")
            t_b = 1.0 / args.bit_rate
        else:
            t_b = args.t_b if args.t_b is not None else 10e-9
        if not t_b > 0:
            raise ConfigError("t_b_s", "must be > 0")

        curve = rejection_curve(t_b, args.f_lo, args.f_hi, args.n, args.cap_db)
        f_min, r_min = curve.minimum()
        logger.info("minimum rejection %.2f dB at %.6g Hz", r_min, f_min)

        writer = ArtifactWriter(args.out_dir)
        writer.writeRejection(curve, self.outputPath(args, args.out, "rejection.csv"))
        return 0
