"""
LinkEngine - Main simulation controller: TX -> channel -> interference ->
noise -> DDR and direct receivers
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from src.link import analysis
from src.link.channel import add_awgn, apply_channel, generate_interference, superpose
from src.link.ddr_receiver import (DemodResult, PhaseEstimate, ddr_demodulate, direct_demodulate,
                                   lagged_pairs, recover_sampling_phase)
from src.link.scenario import Scenario
from src.link.signal_core import BitSequence, Waveform, nrz_modulate, prbs

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class LinkRun:
    """Everything one scenario run produced, kept for metrics and artifacts."""
    scenario: Scenario
    tx_bits: BitSequence
    signal: Waveform
    interference: Waveform | None
    received: Waveform
    aligned: Waveform
    phase: PhaseEstimate
    ddr: DemodResult
    direct: DemodResult
    compared: slice
    reference: BitSequence
    a_sig_rx: float
    noise_sigma: float

    @property
    def bit_period(self):
        return 1.0 / self.scenario.bit_rate_hz

    def ber_direct(self):
        return analysis.ber(self.reference, self.direct.bits[self.compared])

    def ber_integrated(self):
        return analysis.ber(self.reference, self.ddr.bits[self.compared])

    def eye_height_direct(self):
        return analysis.eye_opening(self.direct.samples[self.compared], self.reference,
                                    self.scenario.receiver.threshold)

    def eye_height_integrated(self):
        return analysis.eye_opening(self.ddr.samples[self.compared], self.reference,
                                    self.scenario.receiver.threshold)

    def eye_margin_direct(self):
        return analysis.eye_margin(self.direct.samples[self.compared], self.reference,
                                   self.scenario.receiver.threshold)

    def eye_margin_integrated(self):
        return analysis.eye_margin(self.ddr.samples[self.compared], self.reference,
                                   self.scenario.receiver.threshold)

    def measured_sir_db(self):
        if self.interference is None:
            return None
        return analysis.measure_sir_db(self.signal, self.interference)

    def _compared_segment(self, wave):
        spb = self.scenario.samples_per_bit
        first = self.compared.start * spb
        count = (self.compared.stop - self.compared.start) * spb
        return Waveform(wave.samples[first:first + count], wave.sample_rate, wave.t0 + first * wave.dt)

    def eye_direct(self):
        """Eye of the received waveform, sampled mid-bit."""
        return analysis.eye_diagram(self._compared_segment(self.aligned), self.bit_period,
                                    sampling_instant=self.bit_period / 2.0,
                                    reference_bits=self.reference,
                                    threshold=self.scenario.receiver.threshold,
                                    sampled_values=self.direct.samples[self.compared])

    def eye_integrated(self):
        """Eye of the active-integrator output, measured on the DDR samples taken at T_b - delta."""
        delta = self.scenario.receiver.delta_frac
        return analysis.eye_diagram(self._compared_segment(self.ddr.integrator_trace()), self.bit_period,
                                    sampling_instant=(1.0 - delta) * self.bit_period,
                                    reference_bits=self.reference,
                                    threshold=self.scenario.receiver.threshold,
                                    sampled_values=self.ddr.samples[self.compared])


@dataclass
class RunReport:
    """Summary of one run, echoing the effective configuration."""
    scenario: dict
    ber_direct: analysis.BerResult
    ber_integrated: analysis.BerResult
    eye_height_direct: float
    eye_height_integrated: float
    eye_margin_direct: float
    eye_margin_integrated: float
    recovered_phase_s: float
    bit_lag: int
    n_bits_compared: int
    a_sig_rx_v: float
    noise_sigma_v: float
    measured_sir_db: float | None
    artifacts: list = field(default_factory=list)

    @classmethod
    def fromRun(cls, run: LinkRun):
        return cls(
            scenario=run.scenario.to_dict(),
            ber_direct=run.ber_direct(),
            ber_integrated=run.ber_integrated(),
            eye_height_direct=run.eye_height_direct(),
            eye_height_integrated=run.eye_height_integrated(),
            eye_margin_direct=run.eye_margin_direct(),
            eye_margin_integrated=run.eye_margin_integrated(),
            recovered_phase_s=run.phase.phase_offset,
            bit_lag=run.phase.bit_lag,
            n_bits_compared=len(run.reference),
            a_sig_rx_v=run.a_sig_rx,
            noise_sigma_v=run.noise_sigma,
            measured_sir_db=run.measured_sir_db(),
        )

    def to_dict(self):
        def ber_dict(result):
            return {"errors": result.errors, "rate": result.rate, "ci95": list(result.ci95)}

        return {
            "scenario": self.scenario,
            "ber_direct": ber_dict(self.ber_direct),
            "ber_integrated": ber_dict(self.ber_integrated),
            "eye_height_direct_v": self.eye_height_direct,
            "eye_height_integrated_v": self.eye_height_integrated,
            "eye_margin_direct_v": self.eye_margin_direct,
            "eye_margin_integrated_v": self.eye_margin_integrated,
            "recovered_phase_s": self.recovered_phase_s,
            "bit_lag": self.bit_lag,
            "n_bits_compared": self.n_bits_compared,
            "a_sig_rx_v": self.a_sig_rx_v,
            "noise_sigma_v": self.noise_sigma_v,
            "measured_sir_db": self.measured_sir_db,
            "artifacts": list(self.artifacts),
        }


class LinkEngine:
    """
    Main simulation controller.
    Builds the transmit waveform, the received waveform and runs both receivers.
    """

    def __init__(self):
        """Initialize the engine with no scenario loaded"""
        self.scenario = None
        self.link = None

    def initialize(self, scenario):
        """
        Load a scenario and resolve its link parameters

        Args:
            scenario (Scenario): The validated scenario to simulate
        """
        scenario.validate()
        self.scenario = scenario
        self.link = scenario.link_params()
        logger.debug("%s: a_sig(tx) = %.6g V, fs = %.6g Hz",
                     scenario.name, self.link.a_sig, self.link.sample_rate)

    def transmit(self):
        """
        Generate the payload and its NRZ waveform

        Returns:
            tuple: (BitSequence, Waveform)
        """
        data = self.scenario.data
        bits = prbs(data.prbs_order, data.prbs_seed, data.n_bits)
        return bits, nrz_modulate(bits, self.link)

    def buildInterference(self, duration):
        """
        Sum of all configured interferers on the link's sample grid

        Args:
            duration (float): Length in seconds

        Returns:
            Waveform: Total interference, or None when there are no interferers
        """
        if not self.scenario.interferers:
            return None
        r_ref = self.scenario.calibration.r_ref_ohm
        waves = [generate_interference(spec, self.link.sample_rate, duration,
                                       r_ref=r_ref, t0=self.link.sample_t0)
                 for spec in self.scenario.interferers]
        return superpose(waves)

    def receive(self, tx_wave):
        """
        Channel, interference pickup and receiver noise

        Args:
            tx_wave (Waveform): Transmitted NRZ waveform

        Returns:
            tuple: (received signal component, interference or None, total received waveform)
        """
        signal_rx = apply_channel(tx_wave, self.scenario.channel)
        interference = self.buildInterference(tx_wave.duration)
        components = [signal_rx] if interference is None else [signal_rx, interference]
        received = add_awgn(superpose(components), self.scenario.noise_sigma(), self.scenario.noise.seed)
        return signal_rx, interference, received

    def runScenario(self, scenario=None):
        """
        Run the full chain with both receivers

        Args:
            scenario (Scenario, optional): Scenario to load first

        Returns:
            LinkRun: The run record
        """
        if scenario is not None:
            self.initialize(scenario)
        scenario = self.scenario

        tx_bits, tx_wave = self.transmit()
        signal_rx, interference, received = self.receive(tx_wave)

        phase = recover_sampling_phase(received, self.link, scenario.receiver,
                                       n_steps=scenario.phase_search_steps, reference_bits=tx_bits)
        aligned = received.trim_start(int(round(phase.phase_offset * received.sample_rate)))
        ddr = ddr_demodulate(aligned, self.link, scenario.receiver)
        direct = direct_demodulate(aligned, self.link, 0.5, scenario.receiver.threshold)
        compared, reference = lagged_pairs(len(ddr), tx_bits, phase.bit_lag)

        logger.info("%s: phase offset %.4g s (lag %d), %d bits compared",
                    scenario.name, phase.phase_offset, phase.bit_lag, len(reference))
        return LinkRun(
            scenario=scenario,
            tx_bits=tx_bits,
            signal=signal_rx,
            interference=interference,
            received=received,
            aligned=aligned,
            phase=phase,
            ddr=ddr,
            direct=direct,
            compared=compared,
            reference=reference,
            a_sig_rx=scenario.received_amplitude(),
            noise_sigma=scenario.noise_sigma(),
        )
