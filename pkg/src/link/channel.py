"""
Channel - the capacitive RC body channel, interference generators, AWGN and
superposition of received components
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import signal

from src.errors import LinkSimError, WaveformError
from src.link.signal_core import DEFAULT_R_REF, Waveform, dbm_to_peak_amplitude

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChannelParams:
    """
    Simple RC channel: first-order high-pass coupling plus flat loss.

    The default is transparent (corner 0 Hz disables the high-pass).
    """
    coupling_corner_hz: float = 0.0
    attenuation_db: float = 0.0

    def __post_init__(self):
        if self.coupling_corner_hz < 0:
            raise LinkSimError(f"coupling_corner_hz must be >= 0, got {self.coupling_corner_hz}")
        if self.attenuation_db < 0:
            raise LinkSimError(f"attenuation_db must be >= 0, got {self.attenuation_db}")

    @property
    def gain(self):
        """Flat in-band voltage gain."""
        return 10.0 ** (-self.attenuation_db / 20.0)


class InterferenceKind(str, Enum):
    CW = "cw"
    AM = "am"
    MULTITONE = "multitone"


@dataclass(frozen=True)
class InterferenceSpec:
    """
    One interferer. Only the fields of its kind are used:

    - CW: freq_hz, phase_rad
    - AM: carrier_hz, mod_hz, mod_index, phase_rad
    - MULTITONE: band_lo_hz, band_hi_hz, n_tones, phase_seed
    """
    kind: InterferenceKind = InterferenceKind.CW
    power_dbm: float = -17.0
    freq_hz: float = 100e6
    phase_rad: float = 0.0
    carrier_hz: float = 98e6
    mod_hz: float = 1e6
    mod_index: float = 0.5
    band_lo_hz: float = 88e6
    band_hi_hz: float = 108e6
    n_tones: int = 21
    phase_seed: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", InterferenceKind(self.kind))
        if self.kind is InterferenceKind.AM:
            if not 0.0 <= self.mod_index <= 1.0:
                raise LinkSimError(f"AM mod_index must be in [0, 1], got {self.mod_index}")
            if not 0 < self.mod_hz < self.carrier_hz:
                raise LinkSimError("AM mod_hz must be positive and below carrier_hz")
        elif self.kind is InterferenceKind.MULTITONE:
            if not 0 < self.band_lo_hz < self.band_hi_hz:
                raise LinkSimError("multitone band needs 0 < band_lo_hz < band_hi_hz")
            if self.n_tones < 1:
                raise LinkSimError(f"n_tones must be >= 1, got {self.n_tones}")
        elif not self.freq_hz > 0:
            raise LinkSimError(f"CW freq_hz must be > 0, got {self.freq_hz}")

    def highest_frequency(self):
        """Highest spectral component, for Nyquist checks."""
        if self.kind is InterferenceKind.AM:
            return self.carrier_hz + self.mod_hz
        if self.kind is InterferenceKind.MULTITONE:
            return self.band_hi_hz
        return self.freq_hz

    def check_nyquist(self, sample_rate):
        if self.highest_frequency() >= sample_rate / 2.0:
            raise WaveformError(
                f"{self.kind.value} interferer reaches {self.highest_frequency():.6g} Hz, "
                f"at or above Nyquist ({sample_rate / 2.0:.6g} Hz)")


def _time_axis(sample_rate, duration, t0):
    n = int(round(duration * sample_rate))
    if n < 1:
        raise WaveformError(f"duration {duration} s holds no samples at {sample_rate} Hz")
    return t0 + np.arange(n) / sample_rate


def rc_highpass(wave: Waveform, corner_hz: float) -> Waveform:
    """
    First-order RC high-pass, bilinear-discretised with the corner prewarped
    so the -3 dB point lands exactly on corner_hz

    Args:
        wave (Waveform): Input waveform
        corner_hz (float): -3 dB frequency, 0 disables the filter

    Returns:
        Waveform: Filtered waveform on the same grid
    """
    if corner_hz < 0:
        raise LinkSimError(f"corner frequency must be >= 0, got {corner_hz}")
    if corner_hz == 0:
        return wave
    if corner_hz >= wave.nyquist:
        raise WaveformError(f"high-pass corner {corner_hz:.6g} Hz is at or above Nyquist")

    # H(s) = s / (s + wc) with wc prewarped for the bilinear map
    wc = 2.0 * wave.sample_rate * np.tan(np.pi * corner_hz / wave.sample_rate)
    b, a = signal.bilinear([1.0, 0.0], [1.0, wc], fs=wave.sample_rate)
    return wave.with_samples(signal.lfilter(b, a, wave.samples))


def attenuate(wave: Waveform, attenuation_db: float) -> Waveform:
    """Scale every sample by 10^(-attenuation_db / 20)."""
    if attenuation_db < 0:
        raise LinkSimError(f"attenuation must be >= 0 dB, got {attenuation_db}")
    if attenuation_db == 0:
        return wave
    return wave.with_samples(wave.samples * 10.0 ** (-attenuation_db / 20.0))


def apply_channel(wave: Waveform, params: ChannelParams) -> Waveform:
    """Run a transmitted waveform through the RC channel."""
    return attenuate(rc_highpass(wave, params.coupling_corner_hz), params.attenuation_db)


def cw_interference(spec: InterferenceSpec, sample_rate, duration,
                    r_ref=DEFAULT_R_REF, t0=0.0) -> Waveform:
    """A_pk * sin(2*pi*f*t + phi), with A_pk set by the interferer's average power."""
    spec.check_nyquist(sample_rate)
    t = _time_axis(sample_rate, duration, t0)
    a_pk = dbm_to_peak_amplitude(spec.power_dbm, r_ref)
    return Waveform(a_pk * np.sin(2.0 * np.pi * spec.freq_hz * t + spec.phase_rad),
                    sample_rate, t0)


def am_interference(spec: InterferenceSpec, sample_rate, duration,
                    r_ref=DEFAULT_R_REF, t0=0.0) -> Waveform:
    """
    Tone-modulated AM carrier

    A_c * (1 + m*cos(2*pi*f_m*t)) * sin(2*pi*f_c*t + phi). The carrier
    amplitude is scaled by 1/sqrt(1 + m^2/2) so that carrier plus sidebands
    carry power_dbm in total.

    Args:
        spec (InterferenceSpec): AM interferer description
        sample_rate (float): Sample rate in Hz
        duration (float): Length in seconds
        r_ref (float): Reference impedance for the dBm conversion
        t0 (float): Time of the first sample

    Returns:
        Waveform: The interference waveform
    """
    spec.check_nyquist(sample_rate)
    t = _time_axis(sample_rate, duration, t0)
    m = spec.mod_index
    a_c = dbm_to_peak_amplitude(spec.power_dbm, r_ref) / np.sqrt(1.0 + m * m / 2.0)
    envelope = 1.0 + m * np.cos(2.0 * np.pi * spec.mod_hz * t)
    carrier = np.sin(2.0 * np.pi * spec.carrier_hz * t + spec.phase_rad)
    return Waveform(a_c * envelope * carrier, sample_rate, t0)


def multitone_frequencies(spec: InterferenceSpec):
    """Tone grid of a multitone interferer: uniform over the band, or its centre for one tone."""
    if spec.n_tones == 1:
        return np.array([(spec.band_lo_hz + spec.band_hi_hz) / 2.0])
    return np.linspace(spec.band_lo_hz, spec.band_hi_hz, spec.n_tones)


def multitone_fm_band(spec: InterferenceSpec, sample_rate, duration,
                      r_ref=DEFAULT_R_REF, t0=0.0) -> Waveform:
    """
    Equal-power tones spread over the FM band, a stand-in for measured
    broadcast interference. Phases come from ``phase_seed`` only.
    """
    spec.check_nyquist(sample_rate)
    t = _time_axis(sample_rate, duration, t0)
    freqs = multitone_frequencies(spec)
    phases = np.random.default_rng(spec.phase_seed).uniform(0.0, 2.0 * np.pi, freqs.size)
    # per-tone power P/n
    a_tone = dbm_to_peak_amplitude(spec.power_dbm, r_ref) / np.sqrt(freqs.size)
    samples = np.zeros_like(t)
    for f, ph in zip(freqs, phases):
        samples += np.sin(2.0 * np.pi * f * t + ph)
    return Waveform(a_tone * samples, sample_rate, t0)


_GENERATORS = {
    InterferenceKind.CW: cw_interference,
    InterferenceKind.AM: am_interference,
    InterferenceKind.MULTITONE: multitone_fm_band,
}


def generate_interference(spec: InterferenceSpec, sample_rate, duration,
                          r_ref=DEFAULT_R_REF, t0=0.0) -> Waveform:
    """Dispatch to the generator matching ``spec.kind``."""
    logger.debug("generating %s interferer at %.2f dBm", spec.kind.value, spec.power_dbm)
    return _GENERATORS[spec.kind](spec, sample_rate, duration, r_ref=r_ref, t0=t0)


def add_awgn(wave: Waveform, sigma: float, seed) -> Waveform:
    """
    Add white Gaussian noise of standard deviation sigma

    Args:
        wave (Waveform): Input waveform
        sigma (float): Per-sample noise std-dev in volts
        seed: Anything ``numpy.random.default_rng`` accepts

    Returns:
        Waveform: Noisy copy of the input
    """
    if sigma < 0:
        raise LinkSimError(f"noise sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return wave
    rng = np.random.default_rng(seed)
    return wave.with_samples(wave.samples + rng.normal(0.0, sigma, len(wave)))


def superpose(waves) -> Waveform:
    """Pointwise sum of waveforms that share rate, start time and length."""
    waves = list(waves)
    if not waves:
        raise WaveformError("nothing to superpose")
    first = waves[0]
    for other in waves[1:]:
        if other.sample_rate != first.sample_rate:
            raise WaveformError(f"sample rate mismatch: {other.sample_rate} vs {first.sample_rate}")
        if len(other) != len(first):
            raise WaveformError(f"length mismatch: {len(other)} vs {len(first)}")
        if not np.isclose(other.t0, first.t0, rtol=0.0, atol=1e-3 / first.sample_rate):
            raise WaveformError(f"start time mismatch: {other.t0} vs {first.t0}")
    total = np.sum([w.samples for w in waves], axis=0)
    return first.with_samples(total)
