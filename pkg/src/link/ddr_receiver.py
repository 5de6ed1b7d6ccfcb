"""
DDR receiver - resettable integrate-and-dump on two phase-interleaved paths,
a direct-sampling reference receiver and sampling-phase recovery
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import integrate

from src.errors import LinkSimError, NoEyeFoundError, WaveformError
from src.link.analysis import eye_opening
from src.link.signal_core import MIN_SAMPLES_PER_BIT, BitSequence, LinkParams, Waveform

logger = logging.getLogger(__name__)

PATH_PHASES = (0, 180)

INTEGRATION_RULES = ("trapezoid", "midpoint")

MIN_PHASE_SEARCH_BITS = 32


@dataclass(frozen=True)
class ReceiverConfig:
    """
    Integrating receiver settings. ``k_int`` of None follows the link's
    integrator gain (1/T_b by default). ``integration`` picks the quadrature:
    trapezoidal over the piecewise-linear signal, or one midpoint per sample.
    """
    k_int: float | None = None
    delta_frac: float = 0.0
    threshold: float = 0.0
    start_phase: int = 0
    integration: str = "trapezoid"

    def __post_init__(self):
        if self.k_int is not None and not self.k_int > 0:
            raise LinkSimError(f"k_int must be > 0, got {self.k_int}")
        if not 0.0 <= self.delta_frac < 0.25:
            raise LinkSimError(f"delta_frac must be in [0, 0.25), got {self.delta_frac}")
        if self.start_phase not in PATH_PHASES:
            raise LinkSimError(f"start_phase must be 0 or 180, got {self.start_phase}")
        if self.integration not in INTEGRATION_RULES:
            raise LinkSimError(f"integration must be one of {INTEGRATION_RULES}, got {self.integration!r}")

    @classmethod
    def from_link(cls, link: LinkParams, **overrides):
        values = {"k_int": link.k_int, "delta_frac": link.delta_frac}
        values.update(overrides)
        return cls(**values)

    def gain(self, link: LinkParams):
        return self.k_int if self.k_int is not None else link.integrator_gain


@dataclass(frozen=True, eq=False)
class DemodResult:
    """
    Receiver output.

    For the DDR receiver ``traces`` holds one integrator trace per path and
    ``paths`` the path that integrated each bit; the direct receiver returns
    the received waveform as its only trace and no paths.
    """
    bits: BitSequence
    samples: np.ndarray
    traces: tuple
    paths: np.ndarray | None = None

    def __len__(self):
        return len(self.bits)

    def path_bits(self, path):
        """Decisions made by one DDR path, in bit order."""
        if self.paths is None:
            raise LinkSimError("direct receiver results have no DDR paths")
        return BitSequence(self.bits.bits[self.paths == path])

    def integrator_trace(self):
        """Both paths combined: the output of whichever integrator is active."""
        total = np.sum([t.samples for t in self.traces], axis=0)
        return self.traces[0].with_samples(total)


class PhaseEstimate(NamedTuple):
    phase_offset: float
    eye_height: float
    bit_lag: int = 0


def _window_index(wave, window_start, window_len):
    fs = wave.sample_rate
    first = int(np.ceil((window_start - wave.t0) * fs - 1e-6))
    count = int(round(window_len * fs))
    return first, count


def _cell_edges(samples):
    """
    Signal value at every cell boundary (n + 1 of them for n samples): the
    mean of the two neighbouring samples, extrapolated linearly past both ends.
    """
    if samples.size < 2:
        raise WaveformError("need at least two samples to place cell boundaries")
    ext = np.concatenate(([2.0 * samples[0] - samples[1]], samples, [2.0 * samples[-1] - samples[-2]]))
    return 0.5 * (ext[:-1] + ext[1:])


def _running_integral(cells, edges, dt, rule):
    """
    Integral from the first boundary to every boundary (last axis), starting at 0

    Args:
        cells (ndarray): Sample values, one per cell
        edges (ndarray): Boundary values, one more than cells along the last axis
        dt (float): Cell width in seconds
        rule (str): "trapezoid" or "midpoint"
    """
    if rule == "midpoint":
        running = dt * np.cumsum(cells, axis=-1)
        return np.concatenate((np.zeros(cells.shape[:-1] + (1,)), running), axis=-1)
    # boundary, centre, boundary, ... : trapezoids on the half-cell grid
    fine = np.empty(cells.shape[:-1] + (2 * cells.shape[-1] + 1,))
    fine[..., 0::2] = edges
    fine[..., 1::2] = cells
    return integrate.cumulative_trapezoid(fine, dx=0.5 * dt, axis=-1, initial=0.0)[..., 0::2]


def _partial_cell(centre, left, right, frac, rule):
    """Integral over the first ``frac`` of one cell, in units of the cell width."""
    if rule == "midpoint":
        return frac * centre
    if frac <= 0.5:
        return left * frac + (centre - left) * frac ** 2
    rest = frac - 0.5
    return 0.25 * (left + centre) + centre * rest + (right - centre) * rest ** 2


def integrate_and_dump(wave: Waveform, window_start, window_len, k_int, rule="trapezoid"):
    """
    Reset-then-integrate one window

    The window covers whole sample cells. The trapezoidal rule integrates the
    piecewise-linear signal through the samples and the boundary values
    between them; ``rule="midpoint"`` weights every sample by its cell.

    Args:
        wave (Waveform): Received waveform
        window_start (float): Window start in seconds
        window_len (float): Window length in seconds
        k_int (float): Integrator gain in 1/s
        rule (str): "trapezoid" or "midpoint"

    Returns:
        tuple: (trace, final) where trace starts at 0 on the window start and
            steps one cell boundary per sample, and final is its last value
    """
    if rule not in INTEGRATION_RULES:
        raise LinkSimError(f"rule must be one of {INTEGRATION_RULES}, got {rule!r}")
    first, count = _window_index(wave, window_start, window_len)
    if count < MIN_SAMPLES_PER_BIT:
        raise WaveformError(f"integration window holds {count} samples, need >= {MIN_SAMPLES_PER_BIT}")
    if first < 0 or first + count > len(wave):
        raise WaveformError(
            f"window [{window_start:.6g}, {window_start + window_len:.6g}] s lies outside the waveform")
    cells = wave.samples[first:first + count]
    edges = _cell_edges(wave.samples)[first:first + count + 1]
    trace = k_int * _running_integral(cells, edges, wave.dt, rule)
    return Waveform(trace, wave.sample_rate, wave.t0 + (first - 0.5) * wave.dt), float(trace[-1])


def _bit_rows(wave, link):
    spb = link.samples_per_bit
    n_bits = len(wave) // spb
    if n_bits < 1:
        raise WaveformError(f"waveform of {len(wave)} samples is shorter than one bit ({spb})")
    return wave.samples[:n_bits * spb].reshape(n_bits, spb)


def _sample_integrals(rows, edges, cumulative, k_dt, delta_frac, rule):
    """Integrator value at T_b - delta, including the fractional last cell."""
    spb = rows.shape[1]
    stop = (1.0 - delta_frac) * spb
    whole = int(np.floor(stop + 1e-9))
    if whole >= spb:
        return cumulative[:, -1].copy()
    frac = stop - whole
    before = cumulative[:, whole]
    part = _partial_cell(rows[:, whole], edges[:, whole], edges[:, whole + 1], frac, rule)
    return before + k_dt * part


def ddr_demodulate(wave: Waveform, link: LinkParams, cfg: ReceiverConfig) -> DemodResult:
    """
    Dual-data-rate integrate-and-dump demodulation

    Bit k occupies samples [k*spb, (k+1)*spb) of the waveform. The path that
    owns bit 0 (``cfg.start_phase``) integrates the even bits and the other
    path the odd bits; each path is held at zero while it resets. Trace
    sample i holds the path's integral through the end of cell i.

    Args:
        wave (Waveform): Received waveform, aligned to bit boundaries
        link (LinkParams): Link timing
        cfg (ReceiverConfig): Receiver settings

    Returns:
        DemodResult: Decisions, sampled values and per-path traces
    """
    rows = _bit_rows(wave, link)
    n_bits, spb = rows.shape
    edges = sliding_window_view(_cell_edges(wave.samples), spb + 1)[::spb][:n_bits]
    k_int = cfg.gain(link)
    cumulative = k_int * _running_integral(rows, edges, wave.dt, cfg.integration)
    samples = _sample_integrals(rows, edges, cumulative, k_int * wave.dt, cfg.delta_frac, cfg.integration)

    owner = (np.arange(n_bits) + PATH_PHASES.index(cfg.start_phase)) % 2
    traces = tuple(
        Waveform(np.where(owner[:, None] == path, cumulative[:, 1:], 0.0).ravel(), wave.sample_rate, wave.t0)
        for path in (0, 1)
    )
    bits = BitSequence((samples > cfg.threshold).astype(np.uint8))
    return DemodResult(bits, samples, traces, owner)


def direct_demodulate(wave: Waveform, link: LinkParams, sample_phase=0.5, threshold=0.0) -> DemodResult:
    """Sample once per bit at (k + sample_phase) * T_b and slice against the threshold."""
    if not 0.0 <= sample_phase < 1.0:
        raise LinkSimError(f"sample_phase must be in [0, 1), got {sample_phase}")
    rows = _bit_rows(wave, link)
    col = int(np.floor(sample_phase * link.samples_per_bit + 1e-9))
    samples = rows[:, col].copy()
    bits = BitSequence((samples > threshold).astype(np.uint8))
    return DemodResult(bits, samples, (wave,))


def lagged_pairs(n_decisions, reference, lag):
    """
    Index ranges pairing decision k with reference bit k + lag.

    Returns:
        tuple: (decision slice, reference BitSequence)
    """
    lo = max(0, -lag)
    hi = min(n_decisions, len(reference) - lag)
    if hi <= lo:
        return slice(0, 0), BitSequence(np.zeros(0, dtype=np.uint8))
    return slice(lo, hi), reference[lo + lag:hi + lag]


def _score(result, reference_bits, threshold):
    if reference_bits is None:
        return eye_opening(result.samples, None, threshold), 0
    best = None
    for lag in (-1, 0, 1):
        picked, ref = lagged_pairs(len(result), reference_bits, lag)
        if len(ref) == 0:
            continue
        height = eye_opening(result.samples[picked], ref, threshold)
        if best is None or height > best[0]:
            best = (height, lag)
    return best


def recover_sampling_phase(wave: Waveform, link: LinkParams, cfg: ReceiverConfig,
                           n_steps=16, reference_bits=None) -> PhaseEstimate:
    """
    Grid search for the bit-boundary offset that opens the integrated eye most

    Candidate offsets step through one bit period; the DDR receiver runs on
    the waveform with the offset trimmed off. With known reference bits the
    eye rails follow the transmitted data (so a pure-noise input scores <= 0)
    and the decision/reference lag is searched over -1..+1.

    Args:
        wave (Waveform): Received waveform
        link (LinkParams): Link timing
        cfg (ReceiverConfig): Receiver settings
        n_steps (int): Number of candidate offsets over one T_b
        reference_bits (BitSequence): Optional known transmitted bits

    Returns:
        PhaseEstimate: Best offset in seconds, its eye height and bit lag
    """
    spb = link.samples_per_bit
    if len(wave) < MIN_PHASE_SEARCH_BITS * spb:
        raise WaveformError(f"phase search needs >= {MIN_PHASE_SEARCH_BITS} bit periods")
    if n_steps < 8:
        raise LinkSimError(f"n_steps must be >= 8, got {n_steps}")
    if np.ptp(wave.samples) == 0.0:
        raise NoEyeFoundError("no eye found: waveform is flat")

    best = None
    for step in range(n_steps):
        shift = int(round(step * spb / n_steps))
        result = ddr_demodulate(wave.trim_start(shift), link, cfg)
        height, lag = _score(result, reference_bits, cfg.threshold)
        logger.debug("phase step %d (shift %d samples): eye %.4g, lag %d", step, shift, height, lag)
        if best is None or height > best.eye_height:
            best = PhaseEstimate(shift / wave.sample_rate, height, lag)
    return best
