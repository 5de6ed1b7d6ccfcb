"""
TrajectoryCommand - Running integral of a CW interferer over one bit window, for a grid of phases
"""
import logging

import numpy as np

from src.commands.command import DEFAULT_OUT_DIR, Command
from src.errors import ConfigError
from src.link.analysis import integrated_interference_trajectory
from src.link.artifact_writer import ArtifactWriter

logger = logging.getLogger(__name__)


class TrajectoryCommand(Command):
    name = "trajectory"
    help = "write the integrated interference across one bit window for several phases"

    def addArguments(self, parser):
        timing = parser.add_mutually_exclusive_group()
        timing.add_argument("--t-b-s", dest="t_b", type=float, default=None,
                            help="bit period in seconds (default: 10 ns)")
        timing.add_argument("--bit-rate-hz", dest="bit_rate", type=float, default=None,
                            help="bit rate in Hz")
        parser.add_argument("--f-i-hz", dest="f_i", type=float, default=100e6,
                            help="interferer frequency (default: %(default)s)")
        parser.add_argument("--a-intf-v", dest="a_intf", type=float, default=1.0,
                            help="interferer peak amplitude (default: %(default)s)")
        parser.add_argument("--k-int-per-s", dest="k_int", type=float, default=None,
                            help="integrator gain (default: 1/T_b)")
        parser.add_argument("--n-phases", type=int, default=8,
                            help="starting phases spread over one period (default: %(default)s)")
        parser.add_argument("-n", "--n-points", dest="n", type=int, default=201,
                            help="points per trajectory (default: %(default)s)")
        parser.add_argument("--out-dir", dest="out_dir", default=DEFAULT_OUT_DIR)
        parser.add_argument("-o", "--out", default=None, help="CSV path (default: OUT_DIR/trajectory.csv)")

    def execute(self, args):
        if args.bit_rate is not None:
            if not args.bit_rate > 0:
                raise ConfigError("bit_rate_hz", "must be > 0")
            t_b = 1.0 / args.bit_rate
        else:
            t_b = args.t_b if args.t_b is not None else 10e-9
        if not t_b > 0:
            raise ConfigError("t_b_s", "must be > 0")
        if not args.f_i > 0:
            raise ConfigError("f_i_hz", "must be > 0")
        if args.n_phases < 1:
            raise ConfigError("n_phases", "must be >= 1")
        k_int = args.k_int if args.k_int is not None else 1.0 / t_b

        phases = np.linspace(0.0, 2.0 * np.pi, args.n_phases, endpoint=False)
        trajectories = [
            (phi, integrated_interference_trajectory(args.a_intf, args.f_i, phi, t_b, k_int, args.n))
            for phi in phases
        ]
        worst = max(abs(traj.samples[-1]) for _, traj in trajectories)
        logger.info("f_i*T_b = %.4g, largest sampled residual %.4g", args.f_i * t_b, worst)

        writer = ArtifactWriter(args.out_dir)
        writer.writeTrajectories(args.f_i, trajectories, self.outputPath(args, args.out, "trajectory.csv"))
        return 0
