"""
Analysis - closed-form notch math, eye diagrams, spectra, BER statistics,
body-antenna resonance and body-channel security arithmetic
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy import signal, stats

from src.errors import LinkSimError, WaveformError
from src.link.signal_core import BitSequence, Waveform

SPEED_OF_LIGHT = 2.998e8

DEFAULT_REJECTION_CAP_DB = 120.0

MIN_EYE_FOLDS = 8


# ---------------------------------------------------------------------------
# Notch / rejection
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RejectionCurve:
    """Worst-case interferer rejection over a frequency grid."""
    freqs_hz: np.ndarray
    rejection_db: np.ndarray

    @property
    def points(self):
        return list(zip(self.freqs_hz.tolist(), self.rejection_db.tolist()))

    def minimum(self):
        """(frequency, rejection) of the weakest point on the curve."""
        i = int(np.argmin(self.rejection_db))
        return float(self.freqs_hz[i]), float(self.rejection_db[i])


def integrated_interference_closed_form(a_intf, f_i, phi, t_b, k_int=1.0):
    """
    Integrated CW interferer sampled at the end of one bit window:
    K * A * [cos(phi) - cos(w*T_b + phi)] / w
    """
    if not f_i > 0:
        raise LinkSimError(f"interferer frequency must be > 0, got {f_i}")
    w = 2.0 * np.pi * f_i
    return k_int * a_intf * (np.cos(phi) - np.cos(w * t_b + phi)) / w


def worst_case_rejection_db(f_i, t_b, cap_db=DEFAULT_REJECTION_CAP_DB):
    """
    Rejection of the worst-phase CW interferer relative to a DC interferer of
    the same amplitude, -20*log10|sinc(f_i*T_b)|, capped at exact notches

    Args:
        f_i (float): Interferer frequency in Hz
        t_b (float): Bit period in seconds
        cap_db (float): Value reported at (and near) exact notches

    Returns:
        float: Rejection in dB
    """
    if not f_i > 0 or not t_b > 0:
        raise LinkSimError("interferer frequency and bit period must be > 0")
    mag = abs(float(np.sinc(f_i * t_b)))
    if mag == 0.0:
        return float(cap_db)
    return float(min(-20.0 * np.log10(mag), cap_db))


def rejection_curve(t_b, f_lo, f_hi, n_points, cap_db=DEFAULT_REJECTION_CAP_DB) -> RejectionCurve:
    """Sample worst_case_rejection_db on a uniform frequency grid."""
    if not 0 < f_lo < f_hi:
        raise LinkSimError(f"need 0 < f_lo < f_hi, got {f_lo}, {f_hi}")
    if n_points < 2:
        raise LinkSimError(f"n_points must be >= 2, got {n_points}")
    freqs = np.linspace(f_lo, f_hi, int(n_points))
    rej = np.array([worst_case_rejection_db(f, t_b, cap_db) for f in freqs])
    return RejectionCurve(freqs, rej)


def integrated_interference_trajectory(a_intf, f_i, phi, t_b, k_int=1.0, n_points=201) -> Waveform:
    """
    Running integral of a CW interferer across one bit window,
    -K*A*[cos(w*t + phi) - cos(phi)] / w, sampled at n_points on [0, T_b].
    """
    if n_points < 2:
        raise LinkSimError(f"n_points must be >= 2, got {n_points}")
    w = 2.0 * np.pi * f_i
    t = np.linspace(0.0, t_b, int(n_points))
    values = -k_int * a_intf * (np.cos(w * t + phi) - np.cos(phi)) / w
    return Waveform(values, (n_points - 1) / t_b, 0.0)


def notch_frequencies(bit_rate_hz, f_max_hz):
    """Notch comb of the integrate-and-dump receiver: n / T_b up to f_max."""
    count = int(np.floor(f_max_hz / bit_rate_hz + 1e-9))
    return bit_rate_hz * np.arange(1, count + 1)


def bit_rate_for_notch(f_interferer_hz, n=1):
    """Bit rate that puts notch number n on the given interferer."""
    if n < 1:
        raise LinkSimError(f"notch index must be >= 1, got {n}")
    return f_interferer_hz / n


# ---------------------------------------------------------------------------
# Eye diagrams
# ---------------------------------------------------------------------------

def _rail_mask(values, reference_bits, threshold):
    """Upper-rail membership: by reference bits when known, else by decided sign."""
    if reference_bits is None:
        return values > threshold
    ref = np.asarray(reference_bits.bits if isinstance(reference_bits, BitSequence) else reference_bits)
    if ref.shape[0] < values.shape[0]:
        raise LinkSimError(f"{ref.shape[0]} reference bits for {values.shape[0]} traces")
    ref = ref[:values.shape[0]] == 1
    return ref if values.ndim == 1 else np.broadcast_to(ref[:, None], values.shape)


def _rails(values, mask):
    upper_min = np.where(mask, values, np.inf).min(axis=0)
    lower_max = np.where(~mask, values, -np.inf).max(axis=0)
    return upper_min, lower_max


def _heights(values, mask):
    """min(upper rail) - max(lower rail), per column."""
    upper_min, lower_max = _rails(values, mask)
    return upper_min - lower_max


def _margins(values, mask, threshold):
    """Twice the smaller rail-to-threshold distance, per column."""
    upper_min, lower_max = _rails(values, mask)
    return 2.0 * np.minimum(upper_min - threshold, threshold - lower_max)


def _sampled(values):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise LinkSimError("no sampled values")
    return values


def eye_opening(values, reference_bits=None, threshold=0.0):
    """
    Vertical eye opening of per-bit sampled values

    Args:
        values (array): One sampled value per bit
        reference_bits (BitSequence): Known transmitted bits, aligned with values
        threshold (float): Decision level; splits the rails when no reference is given

    Returns:
        float: min(upper rail) - max(lower rail), negative for a closed eye
    """
    values = _sampled(values)
    return float(_heights(values, _rail_mask(values, reference_bits, threshold)))


def eye_margin(values, reference_bits=None, threshold=0.0):
    """
    Decision margin of per-bit sampled values: 2 * min(min(upper) - thr, thr - max(lower)).
    Equals eye_opening for an eye centred on the threshold; a DC offset shrinks it.
    """
    values = _sampled(values)
    return float(_margins(values, _rail_mask(values, reference_bits, threshold), threshold))


@dataclass(frozen=True, eq=False)
class EyeDiagram:
    fold_period: float
    traces: np.ndarray
    trace_times: np.ndarray
    sampling_instant: float
    eye_height: float
    eye_margin: float
    eye_width: float
    column_heights: np.ndarray

    @property
    def n_traces(self):
        return self.traces.shape[0]


def _longest_run(flags):
    best = run = 0
    for flag in flags:
        run = run + 1 if flag else 0
        best = max(best, run)
    return best


def eye_diagram(wave: Waveform, fold_period, offset=0.0, sampling_instant=None,
                reference_bits=None, threshold=0.0, sampled_values=None) -> EyeDiagram:
    """
    Fold a waveform modulo fold_period and measure its opening.

    Height is taken at ``sampling_instant`` (seconds into the fold, default
    mid-fold); width is the longest contiguous stretch of columns whose
    height is positive. When the receiver's own per-trace samples are given
    in ``sampled_values`` the height and margin come from them instead of
    the nearest column.
    """
    fs = wave.sample_rate
    n_fold = int(round(fold_period * fs))
    if n_fold < 1:
        raise WaveformError(f"fold period {fold_period} s is shorter than one sample")
    start = int(round(offset * fs))
    n_traces = (len(wave) - start) // n_fold
    if n_traces < MIN_EYE_FOLDS:
        raise WaveformError(f"eye diagram needs >= {MIN_EYE_FOLDS} fold periods, got {n_traces}")

    traces = wave.samples[start:start + n_traces * n_fold].reshape(n_traces, n_fold)
    if sampling_instant is None:
        sampling_instant = fold_period / 2.0
    mask = _rail_mask(traces, reference_bits, threshold)
    heights = _heights(traces, mask)
    if sampled_values is None:
        col = int(np.clip(np.floor(sampling_instant * fs + 1e-9), 0, n_fold - 1))
        height = float(heights[col])
        margin = float(_margins(traces[:, col], mask[:, col], threshold))
    else:
        picked = _sampled(sampled_values)[:n_traces]
        if picked.size < n_traces:
            raise LinkSimError(f"{picked.size} sampled values for {n_traces} traces")
        height = eye_opening(picked, reference_bits, threshold)
        margin = eye_margin(picked, reference_bits, threshold)
    return EyeDiagram(
        fold_period=fold_period,
        traces=traces,
        trace_times=np.arange(n_fold) / fs + (wave.t0 % wave.dt),
        sampling_instant=float(sampling_instant),
        eye_height=height,
        eye_margin=margin,
        eye_width=_longest_run(heights > 0) / fs,
        column_heights=heights,
    )


# ---------------------------------------------------------------------------
# Spectra and power
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    freqs_hz: np.ndarray
    density: np.ndarray

    @property
    def density_db(self):
        return 10.0 * np.log10(np.maximum(self.density, 1e-300))

    def total_power(self):
        """Integrated density, V^2."""
        df = self.freqs_hz[1] - self.freqs_hz[0]
        return float(np.sum(self.density) * df)

    def peak_frequency(self):
        return float(self.freqs_hz[int(np.argmax(self.density))])

    def rows(self):
        return list(zip(self.freqs_hz.tolist(), self.density_db.tolist()))


_WINDOWS = {"rectangular": "boxcar", "hann": "hann"}


def psd(wave: Waveform, segment_len, overlap_frac=0.5, window="hann") -> PowerSpectrum:
    """
    Averaged windowed periodogram (Welch), one-sided, V^2/Hz

    Args:
        wave (Waveform): Input waveform
        segment_len (int): Samples per segment
        overlap_frac (float): Segment overlap in [0, 0.9]
        window (str): "rectangular" or "hann"

    Returns:
        PowerSpectrum: Frequencies and density
    """
    if window not in _WINDOWS:
        raise LinkSimError(f"window must be one of {sorted(_WINDOWS)}, got {window!r}")
    if not 2 <= segment_len <= len(wave):
        raise LinkSimError(f"segment_len must be in [2, {len(wave)}], got {segment_len}")
    if not 0.0 <= overlap_frac <= 0.9:
        raise LinkSimError(f"overlap_frac must be in [0, 0.9], got {overlap_frac}")
    freqs, density = signal.welch(
        wave.samples, fs=wave.sample_rate, window=_WINDOWS[window],
        nperseg=int(segment_len), noverlap=int(overlap_frac * segment_len),
        detrend=False, scaling="density", return_onesided=True)
    return PowerSpectrum(freqs, density)


def power_of(wave: Waveform):
    """Mean-square power, V^2."""
    return float(wave.mean_square())


def measure_sir_db(signal_wave: Waveform, interference_wave: Waveform):
    """SIR from the mean-square powers of two waveforms."""
    return float(10.0 * np.log10(power_of(signal_wave) / power_of(interference_wave)))


# ---------------------------------------------------------------------------
# Bit error rate
# ---------------------------------------------------------------------------

class BerResult(NamedTuple):
    errors: int
    rate: float
    ci95: tuple


def wilson_interval(errors, n, confidence=0.95):
    """Wilson score interval for a binomial proportion."""
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    p = errors / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2.0 * n)) / denom
    half = z / denom * np.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n))
    lo = 0.0 if errors == 0 else max(0.0, float(centre - half))
    hi = 1.0 if errors == n else min(1.0, float(centre + half))
    return lo, hi


def ber(tx: BitSequence, rx: BitSequence) -> BerResult:
    """Error count, rate and Wilson 95% interval between two equal-length sequences."""
    if len(tx) != len(rx):
        raise LinkSimError(f"bit sequence lengths differ: {len(tx)} vs {len(rx)}")
    if len(tx) == 0:
        raise LinkSimError("cannot compute BER of empty sequences")
    errors = int(np.count_nonzero(tx.bits != rx.bits))
    return BerResult(errors, errors / len(tx), wilson_interval(errors, len(tx)))


# ---------------------------------------------------------------------------
# Body antenna and security
# ---------------------------------------------------------------------------

def body_resonance(length_m, grounded=False):
    """Body-antenna pickup frequency: c/2l floating, c/4l grounded."""
    if not length_m > 0:
        raise LinkSimError(f"body length must be > 0, got {length_m}")
    return SPEED_OF_LIGHT / ((4.0 if grounded else 2.0) * length_m)


def body_resonance_band(length_m):
    """
    Broadband pickup range of a lossy body antenna: from the grounded
    resonance up to ten times it (40-400 MHz for a ~6 ft body).
    """
    lo = body_resonance(length_m, grounded=True)
    return lo, 10.0 * lo


class Medium(str, Enum):
    WBAN = "wban"
    HBC = "hbc"


def hack_probability(eq, p_touch, medium):
    """
    Probability of snooping a link: encryption quality alone for a radio
    body network, times the chance of touching the wearer for a body channel.
    """
    for name, value in (("eq", eq), ("p_touch", p_touch)):
        if not 0.0 <= value <= 1.0:
            raise LinkSimError(f"{name} must be a probability in [0, 1], got {value}")
    if Medium(medium) is Medium.WBAN:
        return float(eq)
    return float(eq * p_touch)
