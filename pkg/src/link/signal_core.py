"""
Signal primitives - waveforms, bit sequences, NRZ modulation, PRBS data and
power/amplitude calibration arithmetic
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.errors import LinkSimError, WaveformError

# Reference impedance for dBm <-> volts conversions (ohms)
DEFAULT_R_REF = 50.0

# Fibonacci LFSR feedback taps, x^order + x^(order-1) + 1
PRBS_ORDERS = (7, 15)

MIN_SAMPLES_PER_BIT = 16


@dataclass(frozen=True, eq=False)
class Waveform:
    """
    Uniformly sampled real voltage trace.

    Sample i sits at ``t0 + i / sample_rate`` and stands for the cell of width
    ``1 / sample_rate`` centred on it.
    """
    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size < 1:
            raise WaveformError("waveform needs at least one sample")
        if not self.sample_rate > 0:
            raise WaveformError(f"sample_rate must be > 0, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise WaveformError("waveform samples must be finite")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.size

    @property
    def dt(self):
        return 1.0 / self.sample_rate

    @property
    def duration(self):
        return self.samples.size / self.sample_rate

    @property
    def nyquist(self):
        return self.sample_rate / 2.0

    def times(self):
        """Sample instants in seconds."""
        return self.t0 + np.arange(self.samples.size) / self.sample_rate

    def mean_square(self):
        """Mean-square value (V^2), i.e. power into 1 ohm."""
        return float(np.mean(self.samples ** 2))

    def with_samples(self, samples):
        """Same time grid, new sample values."""
        return Waveform(samples, self.sample_rate, self.t0)

    def trim_start(self, n_samples):
        """
        Drop the first samples, moving t0 accordingly

        Args:
            n_samples (int): Number of leading samples to drop

        Returns:
            Waveform: The shortened waveform
        """
        if n_samples <= 0:
            return self
        if n_samples >= self.samples.size:
            raise WaveformError(f"cannot drop {n_samples} of {self.samples.size} samples")
        return Waveform(self.samples[n_samples:], self.sample_rate,
                        self.t0 + n_samples / self.sample_rate)


@dataclass(frozen=True, eq=False)
class BitSequence:
    """Ordered binary payload."""
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 1:
            raise LinkSimError("bit sequence must be one-dimensional")
        if bits.size and not np.all((bits == 0) | (bits == 1)):
            raise LinkSimError("bit sequence elements must be 0 or 1")
        object.__setattr__(self, "bits", bits.astype(np.uint8))

    def __len__(self):
        return self.bits.size

    def __iter__(self):
        return iter(int(b) for b in self.bits)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return BitSequence(self.bits[index])
        return int(self.bits[index])

    def __eq__(self, other):
        if not isinstance(other, BitSequence):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def inverted(self):
        return BitSequence(1 - self.bits)

    def ones(self):
        return int(np.count_nonzero(self.bits))


@dataclass(frozen=True)
class LinkParams:
    """
    Link-level timing and amplitude parameters.

    ``k_int`` left as None means 1/T_b, so an integrated bit reaches +/-a_sig.
    """
    bit_rate_hz: float = 100e6
    samples_per_bit: int = 100
    a_sig: float = 1.0
    k_int: float | None = None
    delta_frac: float = 0.0

    def __post_init__(self):
        if not self.bit_rate_hz > 0:
            raise LinkSimError(f"bit_rate_hz must be > 0, got {self.bit_rate_hz}")
        if int(self.samples_per_bit) != self.samples_per_bit or self.samples_per_bit < MIN_SAMPLES_PER_BIT:
            raise LinkSimError(f"samples_per_bit must be an integer >= {MIN_SAMPLES_PER_BIT}, "
                               f"got {self.samples_per_bit}")
        if not self.a_sig > 0:
            raise LinkSimError(f"a_sig must be > 0, got {self.a_sig}")
        if self.k_int is not None and not self.k_int > 0:
            raise LinkSimError(f"k_int must be > 0, got {self.k_int}")
        if not 0.0 <= self.delta_frac < 0.25:
            raise LinkSimError(f"delta_frac must be in [0, 0.25), got {self.delta_frac}")

    @property
    def bit_period(self):
        return 1.0 / self.bit_rate_hz

    @property
    def sample_rate(self):
        return self.bit_rate_hz * self.samples_per_bit

    @property
    def sample_t0(self):
        """Start time that makes bit k's sample cells tile [k*T_b, (k+1)*T_b)."""
        return 0.5 / self.sample_rate

    @property
    def integrator_gain(self):
        return self.k_int if self.k_int is not None else self.bit_rate_hz


def prbs(order: int, seed: int, n: int) -> BitSequence:
    """
    First n bits of a maximal-length Fibonacci LFSR stream.

    The state holds ``order`` bits. Each step outputs the MSB, then shifts
    left feeding ``s[order-1] XOR s[order-2]`` into bit 0. For order 7 this
    is the x^7 + x^6 + 1 PRBS7 generator.

    Args:
        order (int): 7 or 15
        seed (int): Nonzero initial state that fits in ``order`` bits
        n (int): Number of bits to produce

    Returns:
        BitSequence: The generated bits
    """
    if order not in PRBS_ORDERS:
        raise LinkSimError(f"PRBS order must be one of {PRBS_ORDERS}, got {order}")
    mask = (1 << order) - 1
    if seed == 0:
        raise LinkSimError("PRBS seed must be nonzero (all-zero state locks the LFSR)")
    if seed < 0 or seed > mask:
        raise LinkSimError(f"PRBS seed {seed} does not fit in {order} bits")
    if n < 1:
        raise LinkSimError(f"PRBS length must be >= 1, got {n}")

    msb = order - 1
    state = seed
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        out[i] = (state >> msb) & 1
        feedback = ((state >> msb) ^ (state >> (msb - 1))) & 1
        state = ((state << 1) | feedback) & mask
    return BitSequence(out)


def nrz_modulate(bits: BitSequence, params: LinkParams) -> Waveform:
    """
    Bipolar NRZ: bit 1 -> +a_sig, bit 0 -> -a_sig, each held for
    samples_per_bit samples. The waveform starts at ``params.sample_t0``.
    """
    if len(bits) == 0:
        raise LinkSimError("cannot modulate an empty bit sequence")
    levels = np.where(bits.bits == 1, params.a_sig, -params.a_sig)
    samples = np.repeat(levels, params.samples_per_bit)
    return Waveform(samples, params.sample_rate, params.sample_t0)


def dbm_to_peak_amplitude(power_dbm: float, r_ref: float = DEFAULT_R_REF) -> float:
    """
    Peak amplitude of a sinusoid dissipating ``power_dbm`` on average in r_ref

    Args:
        power_dbm (float): Average power in dBm
        r_ref (float): Reference impedance in ohms

    Returns:
        float: Peak voltage
    """
    if not r_ref > 0:
        raise LinkSimError(f"reference impedance must be > 0, got {r_ref}")
    watts = 10.0 ** ((power_dbm - 30.0) / 10.0)
    return float(np.sqrt(2.0 * watts * r_ref))


def peak_amplitude_to_dbm(a_peak: float, r_ref: float = DEFAULT_R_REF) -> float:
    """Inverse of dbm_to_peak_amplitude."""
    if not a_peak > 0:
        raise LinkSimError(f"peak amplitude must be > 0, got {a_peak}")
    watts = a_peak ** 2 / (2.0 * r_ref)
    return float(10.0 * np.log10(watts) + 30.0)


def sig_amplitude_from_sir(a_intf: float, sir_db: float) -> float:
    """
    NRZ amplitude that sits ``sir_db`` above a CW interferer of peak a_intf.

    NRZ power is A_sig^2, CW power is A_intf^2 / 2.
    """
    if not a_intf > 0:
        raise LinkSimError(f"interferer amplitude must be > 0, got {a_intf}")
    if np.isneginf(sir_db):
        return 0.0
    return float(a_intf / np.sqrt(2.0) * 10.0 ** (sir_db / 20.0))


def noise_sigma_from_snr(a_sig: float, snr_db: float) -> float:
    """Per-sample noise std-dev for SNR = A_sig^2 / sigma^2 over the simulated band."""
    if not a_sig > 0:
        raise LinkSimError(f"signal amplitude must be > 0, got {a_sig}")
    return float(a_sig * 10.0 ** (-snr_db / 20.0))
