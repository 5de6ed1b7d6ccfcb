import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.errors import LinkSimError, NoEyeFoundError, WaveformError
from src.link.analysis import integrated_interference_closed_form
from src.link.channel import InterferenceSpec, add_awgn, cw_interference, superpose
from src.link.ddr_receiver import (ReceiverConfig, ddr_demodulate, direct_demodulate, integrate_and_dump,
                                   lagged_pairs, recover_sampling_phase)
from src.link.signal_core import BitSequence, LinkParams, Waveform, nrz_modulate, prbs

PHASES_20 = np.linspace(0.0, 2 * np.pi, 20, endpoint=False)


def _cw(link, f_i, phi, n_bits, a_peak=1.0):
    # 10 dBm into 50 ohm is 1 V peak
    power_dbm = 10.0 + 20 * math.log10(a_peak)
    spec = InterferenceSpec(kind="cw", power_dbm=power_dbm, freq_hz=f_i, phase_rad=phi)
    return cw_interference(spec, link.sample_rate, n_bits * link.bit_period, t0=link.sample_t0)


@pytest.mark.parametrize("cycles_per_bit", [1, 2, 3])
def test_cw_at_a_notch_integrates_to_zero(link, receiver, cycles_per_bit):
    f_i = cycles_per_bit * link.bit_rate_hz
    for phi in PHASES_20:
        result = ddr_demodulate(_cw(link, f_i, phi, 16), link, receiver)
        assert np.max(np.abs(result.samples)) <= 1e-4 * 1.0


@pytest.mark.parametrize("ratio", [0.3, 0.5, 0.88, 0.95, 1.05])
def test_sampled_interference_matches_closed_form(link, receiver, ratio):
    f_i = ratio * link.bit_rate_hz
    t_b = link.bit_period
    for phi in np.linspace(0.0, 2 * np.pi, 8, endpoint=False):
        # inner bits only: the outermost cell edges are extrapolated
        result = ddr_demodulate(_cw(link, f_i, phi, 6), link, receiver)
        for k in range(1, 5):
            phi_k = phi + 2 * np.pi * f_i * k * t_b
            expected = integrated_interference_closed_form(1.0, f_i, phi_k, t_b, k_int=link.integrator_gain)
            assert result.samples[k] == pytest.approx(expected, rel=1e-3, abs=1e-9)


def test_noiseless_nrz_is_recovered(link, receiver, payload):
    result = ddr_demodulate(nrz_modulate(payload, link), link, receiver)
    assert result.bits == payload
    # a transition costs a quarter cell at each edge
    magnitudes = np.abs(result.samples)
    assert np.all(magnitudes <= link.a_sig * (1 + 1e-12))
    assert np.all(magnitudes >= link.a_sig * (1 - 0.5 / link.samples_per_bit) - 1e-12)
    assert magnitudes.max() == pytest.approx(link.a_sig, rel=1e-12)


def test_midpoint_rule_recovers_nrz_levels_exactly(link, payload):
    result = ddr_demodulate(nrz_modulate(payload, link), link, ReceiverConfig(integration="midpoint"))
    assert result.bits == payload
    assert np.allclose(np.abs(result.samples), link.a_sig, rtol=1e-12)


def test_trapezoid_and_midpoint_agree_on_smooth_input(link):
    wave = _cw(link, 0.37 * link.bit_rate_hz, 0.4, 8)
    trapezoid = ddr_demodulate(wave, link, ReceiverConfig())
    midpoint = ddr_demodulate(wave, link, ReceiverConfig(integration="midpoint"))
    assert np.allclose(trapezoid.samples[1:-1], midpoint.samples[1:-1], rtol=1e-3, atol=1e-6)


def test_notch_interferer_leaves_decisions_and_samples_unchanged(link, receiver, payload):
    clean = nrz_modulate(payload, link)
    hit = superpose([clean, _cw(link, link.bit_rate_hz, 0.3, len(payload), a_peak=20.0)])
    a = ddr_demodulate(clean, link, receiver)
    b = ddr_demodulate(hit, link, receiver)
    assert b.bits == payload
    assert np.allclose(a.samples[1:-1], b.samples[1:-1], atol=1e-9)
    assert np.allclose(a.samples, b.samples, atol=2e-4)


@pytest.mark.parametrize("delta_frac, level", [(0.1, 0.9), (0.105, 0.895), (0.0, 1.0)])
def test_sampling_early_by_delta_shortens_the_integral(link, payload, delta_frac, level):
    exact = ddr_demodulate(nrz_modulate(payload, link), link,
                           ReceiverConfig(delta_frac=delta_frac, integration="midpoint"))
    assert np.allclose(np.abs(exact.samples), level, rtol=1e-12)

    result = ddr_demodulate(nrz_modulate(payload, link), link, ReceiverConfig(delta_frac=delta_frac))
    magnitudes = np.abs(result.samples)
    assert np.all(magnitudes <= level + 1e-12)
    assert np.all(magnitudes >= level - 0.5 / link.samples_per_bit - 1e-12)


@pytest.mark.parametrize("delta_frac", [0.01, 0.05, 0.1, 0.2])
def test_residual_at_the_notch_is_bounded_by_the_skipped_tail(link, delta_frac):
    cfg = ReceiverConfig(delta_frac=delta_frac)
    k_int = cfg.gain(link)
    bound = k_int * 1.0 * delta_frac * link.bit_period
    worst = 0.0
    for phi in PHASES_20:
        result = ddr_demodulate(_cw(link, link.bit_rate_hz, phi, 6), link, cfg)
        worst = max(worst, float(np.max(np.abs(result.samples[1:-1]))))
    assert 0.0 < worst <= bound


def test_paths_alternate_and_reset(link, payload):
    wave = nrz_modulate(payload, link)
    result = ddr_demodulate(wave, link, ReceiverConfig(start_phase=0))
    assert result.path_bits(0) == payload[0::2]
    assert result.path_bits(1) == payload[1::2]

    spb = link.samples_per_bit
    path0, path1 = (t.samples.reshape(len(payload), spb) for t in result.traces)
    assert np.all(path0[1::2] == 0.0)
    assert np.all(path1[0::2] == 0.0)
    assert np.allclose(result.integrator_trace().samples.reshape(len(payload), spb)[:, -1], result.samples)

    swapped = ddr_demodulate(wave, link, ReceiverConfig(start_phase=180))
    assert swapped.path_bits(1) == payload[0::2]
    assert swapped.bits == result.bits


def test_direct_receiver_samples_mid_bit(link, payload):
    result = direct_demodulate(nrz_modulate(payload, link), link)
    assert result.bits == payload
    assert set(np.abs(result.samples).tolist()) == {1.0}
    with pytest.raises(LinkSimError):
        result.path_bits(0)
    with pytest.raises(LinkSimError):
        direct_demodulate(nrz_modulate(payload, link), link, sample_phase=1.0)


def test_integrated_eye_beats_direct_eye_in_noise(link, receiver, payload):
    noisy = add_awgn(nrz_modulate(payload, link), 0.1, seed=11)
    ddr = ddr_demodulate(noisy, link, receiver)
    direct = direct_demodulate(noisy, link)
    assert np.min(np.abs(ddr.samples)) > np.min(np.abs(direct.samples))


def test_integrate_and_dump_one_window(link):
    wave = Waveform(np.ones(300), link.sample_rate, link.sample_t0)
    trace, final = integrate_and_dump(wave, link.bit_period, link.bit_period, link.integrator_gain)
    assert final == pytest.approx(1.0)
    assert trace.samples[0] == 0.0
    assert trace.samples[1] == pytest.approx(0.01)
    assert len(trace) == 101
    assert trace.t0 == pytest.approx(link.bit_period)
    assert trace.samples[-1] == final


def test_integrate_and_dump_starts_from_zero_at_the_window_start():
    fs = 10e9
    wave = Waveform(np.ones(200), fs, 0.5 / fs)
    trace, final = integrate_and_dump(wave, 0.0, 100 / fs, 1.0)
    assert trace.samples[0] == 0.0
    assert trace.t0 == pytest.approx(0.0)
    assert np.all(np.diff(trace.samples) > 0)
    assert final == pytest.approx(100 / fs)


def test_integrate_and_dump_of_half_a_sine_period():
    fs = 10e9
    t = (np.arange(100) + 0.5) / fs
    wave = Waveform(np.sin(2 * np.pi * 50e6 * t), fs, 0.5 / fs)
    _, final = integrate_and_dump(wave, 0.0, 10e-9, 1.0)
    assert final == pytest.approx(2 / (2 * np.pi * 50e6), rel=1e-3)


def test_integrate_and_dump_rejects_bad_windows(link):
    wave = Waveform(np.ones(300), link.sample_rate, link.sample_t0)
    with pytest.raises(WaveformError):
        integrate_and_dump(wave, 2.5 * link.bit_period, link.bit_period, 1.0)
    with pytest.raises(WaveformError):
        integrate_and_dump(wave, 0.0, 10 / link.sample_rate, 1.0)
    with pytest.raises(LinkSimError):
        integrate_and_dump(wave, 0.0, link.bit_period, 1.0, rule="simpson")


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5))
def test_integrate_and_dump_is_linear(a, b):
    rng = np.random.default_rng(3)
    fs = 1e9
    x = rng.normal(size=200)
    y = rng.normal(size=200)
    window = 100 / fs

    def final(samples):
        return integrate_and_dump(Waveform(samples, fs, 0.5 / fs), 0.0, window, 1.0 / window)[1]

    assert final(a * x + b * y) == pytest.approx(a * final(x) + b * final(y), abs=1e-9)


def test_lagged_pairs():
    ref = BitSequence(np.array([0, 1, 1, 0, 1], dtype=np.uint8))
    picked, paired = lagged_pairs(5, ref, 1)
    assert picked == slice(0, 4)
    assert paired == ref[1:]
    picked, paired = lagged_pairs(4, ref, -1)
    assert picked == slice(1, 4)
    assert paired == ref[0:3]


def test_phase_recovery_finds_a_quarter_bit_shift(link, receiver, payload):
    nrz = nrz_modulate(payload, link)
    shifted = nrz.with_samples(np.roll(nrz.samples, link.samples_per_bit // 4))
    for reference in (None, payload):
        estimate = recover_sampling_phase(shifted, link, receiver, n_steps=16, reference_bits=reference)
        assert estimate.phase_offset == pytest.approx(link.bit_period / 4)
        assert estimate.eye_height == pytest.approx(2 * link.a_sig, rel=1e-2)
        assert estimate.bit_lag == 0


def test_phase_recovery_on_pure_noise_finds_no_open_eye(link, receiver, payload, rng):
    noise = Waveform(rng.normal(size=len(payload) * link.samples_per_bit), link.sample_rate, link.sample_t0)
    estimate = recover_sampling_phase(noise, link, receiver, reference_bits=payload)
    assert estimate.eye_height <= 0.0


def test_phase_recovery_preconditions(link, receiver):
    flat = Waveform(np.zeros(64 * link.samples_per_bit), link.sample_rate)
    with pytest.raises(NoEyeFoundError):
        recover_sampling_phase(flat, link, receiver)
    short = Waveform(np.ones(10 * link.samples_per_bit), link.sample_rate)
    with pytest.raises(WaveformError):
        recover_sampling_phase(short, link, receiver)
    with pytest.raises(LinkSimError):
        recover_sampling_phase(Waveform(np.arange(6400.0), link.sample_rate), link, receiver, n_steps=4)


def test_receiver_config_validation(link):
    with pytest.raises(LinkSimError):
        ReceiverConfig(start_phase=90)
    with pytest.raises(LinkSimError):
        ReceiverConfig(delta_frac=0.5)
    with pytest.raises(LinkSimError):
        ReceiverConfig(integration="simpson")
    assert ReceiverConfig.from_link(LinkParams(k_int=2e8)).gain(link) == pytest.approx(2e8)
    assert ReceiverConfig().gain(link) == pytest.approx(link.bit_rate_hz)


def test_prbs_payload_decodes_through_the_full_receiver(link, receiver):
    bits = prbs(15, 0x1ACE, 200)
    noisy = add_awgn(nrz_modulate(bits, link), 0.3, seed=2)
    assert ddr_demodulate(noisy, link, receiver).bits == bits
