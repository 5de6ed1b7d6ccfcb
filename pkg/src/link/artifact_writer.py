"""
ArtifactWriter - Emits the CSV / JSON data behind every run, sweep and eye
"""
import csv
import json
import logging
import os

from src.link import analysis

logger = logging.getLogger(__name__)

SPECTRUM_SEGMENT_LEN = 4096

REJECTION_HEADER = ("freq_hz", "rejection_db")
SWEEP_HEADER = ("axis_value", "ber_direct", "ber_integrated", "ci95_lo", "ci95_hi")
DECISIONS_HEADER = ("bit_index", "tx_bit", "direct_bit", "integrated_bit", "direct_sample_v",
                    "integrated_sample_v")
EYE_HEADER = ("trace_id", "t_s", "v")
WAVEFORM_HEADER = ("t_s", "signal_v", "interference_v", "received_v")
SPECTRUM_HEADER = ("freq_hz", "psd_db_per_hz")
TRAJECTORY_HEADER = ("phi_rad", "t_over_ti", "is_intf")


def _num(value):
    """Shortest text that reads back as the same float."""
    return repr(float(value))


def _sig6(value):
    return f"{float(value):.6g}"


class ArtifactWriter:
    """
    Writes artifacts into one output directory and remembers every file it
    produced, in order.
    """

    def __init__(self, out_dir):
        """
        Initialize the writer

        Args:
            out_dir (str): Directory that receives the artifacts
        """
        self.out_dir = out_dir
        self.written = []

    def initialize(self):
        """Create the output directory"""
        os.makedirs(self.out_dir, exist_ok=True)

    def path(self, name):
        return os.path.join(self.out_dir, name)

    def _record(self, path):
        self.written.append(path)
        logger.info("wrote %s", path)
        return path

    def _writeRows(self, path, header, rows):
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        return self._record(path)

    def _writeJson(self, path, payload, indent=None):
        with open(path, "w", newline="") as f:
            json.dump(payload, f, indent=indent, sort_keys=indent is not None)
            f.write("\n")
        return self._record(path)

    # -- sweeps --------------------------------------------------------------

    def writeRejection(self, curve, path):
        """
        Rejection curve as `freq_hz,rejection_db`, 6 significant digits

        Args:
            curve (RejectionCurve): The curve to write
            path (str): Destination file
        """
        rows = ((_sig6(f), _sig6(r)) for f, r in curve.points)
        return self._writeRows(path, REJECTION_HEADER, rows)

    def writeSweep(self, results, path):
        """
        BER sweep rows, one per axis value in sweep order

        Args:
            results (list): (axis_value, LinkRun) pairs
            path (str): Destination file
        """
        rows = []
        for axis_value, run in results:
            direct = run.ber_direct()
            integrated = run.ber_integrated()
            lo, hi = integrated.ci95
            rows.append((_num(axis_value), _num(direct.rate), _num(integrated.rate), _num(lo), _num(hi)))
        return self._writeRows(path, SWEEP_HEADER, rows)

    def writeTrajectories(self, f_i, trajectories, path):
        """
        Running integral of a CW interferer across one bit window, one block
        of rows per starting phase

        Args:
            f_i (float): Interferer frequency in Hz; time is written in periods of it
            trajectories (list): (phase in rad, Waveform) pairs
            path (str): Destination file
        """
        rows = (
            (_sig6(phi), _sig6(t * f_i), _num(v))
            for phi, traj in trajectories
            for t, v in zip(traj.times(), traj.samples)
        )
        return self._writeRows(path, TRAJECTORY_HEADER, rows)

    # -- single run ----------------------------------------------------------

    def writeDecisions(self, run, path=None):
        """Per-bit decisions of both receivers next to the transmitted reference."""
        picked = run.compared
        direct_bits = run.direct.bits.bits[picked]
        ddr_bits = run.ddr.bits.bits[picked]
        direct_samples = run.direct.samples[picked]
        ddr_samples = run.ddr.samples[picked]
        rows = (
            (picked.start + i, int(tx), int(direct_bits[i]), int(ddr_bits[i]),
             _num(direct_samples[i]), _num(ddr_samples[i]))
            for i, tx in enumerate(run.reference.bits)
        )
        return self._writeRows(path or self.path("decisions.csv"), DECISIONS_HEADER, rows)

    def writeWaveform(self, run, path=None):
        signal = run.signal.samples
        interference = run.interference.samples if run.interference is not None else None
        times = run.received.times()
        rows = (
            (_num(t), _num(signal[i]), _num(interference[i]) if interference is not None else "0.0",
             _num(run.received.samples[i]))
            for i, t in enumerate(times)
        )
        return self._writeRows(path or self.path("waveform.csv"), WAVEFORM_HEADER, rows)

    def writeEye(self, eye, which, max_traces, path=None):
        """
        Folded eye traces plus a one-line JSON metrics sidecar

        Args:
            eye (EyeDiagram): The folded eye
            which (str): "direct" or "integrated"
            max_traces (int): Cap on traces written to the CSV
            path (str): CSV destination; the sidecar uses the same stem with .json

        Returns:
            tuple: (csv path, sidecar path)
        """
        path = path or self.path(f"eye_{which}.csv")
        n_written = min(eye.n_traces, max_traces)
        times = [_num(t) for t in eye.trace_times]
        rows = (
            (trace_id, times[j], _num(v))
            for trace_id in range(n_written)
            for j, v in enumerate(eye.traces[trace_id])
        )
        csv_path = self._writeRows(path, EYE_HEADER, rows)
        metrics = {
            "which": which,
            "eye_height_v": eye.eye_height,
            "eye_margin_v": eye.eye_margin,
            "eye_width_s": eye.eye_width,
            "sampling_instant_s": eye.sampling_instant,
            "fold_period_s": eye.fold_period,
            "n_traces": eye.n_traces,
            "n_traces_written": n_written,
        }
        sidecar = self._writeJson(os.path.splitext(path)[0] + ".json", metrics)
        return csv_path, sidecar

    def writeSpectrum(self, spectrum, path=None):
        rows = ((_num(f), _num(d)) for f, d in spectrum.rows())
        return self._writeRows(path or self.path("spectrum.csv"), SPECTRUM_HEADER, rows)

    def writeRun(self, run, report, config):
        """
        Write every artifact the scenario asks for, then the report listing them

        Args:
            run (LinkRun): The finished run
            report (RunReport): Its report; artifact paths are filled in here
            config (dict): Effective configuration echo
        """
        outputs = run.scenario.outputs
        if "config" in outputs:
            self._writeJson(self.path("config.json"), config, indent=4)
        if "decisions" in outputs:
            self.writeDecisions(run)
        if "waveform" in outputs:
            self.writeWaveform(run)
        if "eye_direct" in outputs:
            self.writeEye(run.eye_direct(), "direct", run.scenario.eye_max_traces)
        if "eye_integrated" in outputs:
            self.writeEye(run.eye_integrated(), "integrated", run.scenario.eye_max_traces)
        if "spectrum" in outputs:
            segment = min(SPECTRUM_SEGMENT_LEN, len(run.received))
            self.writeSpectrum(analysis.psd(run.received, segment))
        if "report" in outputs:
            report_path = self.path("report.json")
            report.artifacts = list(self.written) + [report_path]
            self._writeJson(report_path, report.to_dict(), indent=4)
        else:
            report.artifacts = list(self.written)
        return report
