import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.errors import LinkSimError, WaveformError
from src.link import analysis
from src.link.signal_core import BitSequence, Waveform, nrz_modulate

T_B = 10e-9


def _brute_force_rejection_db(f_i, t_b, n_phases=1000):
    """Worst residual over a phase grid against a DC interferer of the same amplitude."""
    phases = np.linspace(0.0, 2 * np.pi, n_phases, endpoint=False)
    residual = np.abs(analysis.integrated_interference_closed_form(1.0, f_i, phases, t_b)).max()
    return -20 * math.log10(residual / t_b)


def test_rejection_at_95_mhz():
    assert analysis.worst_case_rejection_db(95e6, T_B) == pytest.approx(25.61, abs=0.01)


@pytest.mark.parametrize("f_i, expected", [(50e6, 3.92), (88e6, 17.5)])
def test_rejection_off_notch(f_i, expected):
    assert analysis.worst_case_rejection_db(f_i, T_B) == pytest.approx(expected, abs=0.05)


def test_rejection_is_capped_at_notches():
    assert analysis.worst_case_rejection_db(100e6, T_B) == 120.0
    assert analysis.worst_case_rejection_db(200e6, T_B, cap_db=80.0) == 80.0


def test_minimum_rejection_over_the_upper_fm_band():
    curve = analysis.rejection_curve(T_B, 91e6, 108e6, 171)
    f_min, r_min = curve.minimum()
    assert r_min >= 20.1
    assert f_min == pytest.approx(91e6)
    # the 20 dB crossing sits just above 90 MHz
    assert analysis.worst_case_rejection_db(90e6, T_B) == pytest.approx(19.23, abs=0.01)


def test_rejection_matches_phase_grid_oracle():
    for f_i in np.linspace(20e6, 290e6, 50):
        if abs(f_i * T_B - round(f_i * T_B)) < 1e-3:
            continue
        assert analysis.worst_case_rejection_db(f_i, T_B) == pytest.approx(
            _brute_force_rejection_db(f_i, T_B), abs=0.1)


def test_rejection_curve_shape():
    curve = analysis.rejection_curve(T_B, 88e6, 108e6, 201)
    assert len(curve.points) == 201
    assert curve.freqs_hz[0] == 88e6 and curve.freqs_hz[-1] == 108e6
    with pytest.raises(LinkSimError):
        analysis.rejection_curve(T_B, 108e6, 88e6, 10)
    with pytest.raises(LinkSimError):
        analysis.rejection_curve(T_B, 88e6, 108e6, 1)


@settings(max_examples=50)
@given(st.floats(min_value=1e6, max_value=99e6))
def test_rejection_grows_towards_the_first_notch(f_i):
    # on (0, 1/T_b) the sinc magnitude falls monotonically
    assert analysis.worst_case_rejection_db(f_i, T_B) <= analysis.worst_case_rejection_db(f_i * 1.005, T_B) + 1e-9


def test_closed_form_values():
    assert analysis.integrated_interference_closed_form(1.0, 50e6, 0.0, T_B) == pytest.approx(6.366e-9, rel=1e-3)
    assert abs(analysis.integrated_interference_closed_form(1.0, 95e6, 0.0, T_B)) == pytest.approx(
        (1 - math.cos(1.9 * math.pi)) / (2 * math.pi * 95e6), rel=1e-12)
    assert analysis.integrated_interference_closed_form(1.0, 100e6, 0.7, T_B) == pytest.approx(0.0, abs=1e-20)


def test_trajectory_ends_at_the_closed_form():
    traj = analysis.integrated_interference_trajectory(2.0, 95e6, 0.3, T_B, k_int=1.0 / T_B)
    assert traj.samples[0] == 0.0
    assert traj.samples[-1] == pytest.approx(
        analysis.integrated_interference_closed_form(2.0, 95e6, 0.3, T_B, k_int=1.0 / T_B))


def test_notch_comb_and_bit_rate_for_notch():
    assert np.allclose(analysis.notch_frequencies(100e6, 350e6), [100e6, 200e6, 300e6])
    assert analysis.bit_rate_for_notch(95e6) == 95e6
    assert analysis.bit_rate_for_notch(190e6, n=2) == 95e6
    assert analysis.worst_case_rejection_db(95e6, 1 / analysis.bit_rate_for_notch(95e6)) == 120.0


def test_eye_opening_is_the_gap_between_the_rails():
    values = np.array([1.0, -1.0, 0.8, -0.9])
    assert analysis.eye_opening(values) == pytest.approx(1.7)
    assert analysis.eye_margin(values) == pytest.approx(1.6)

    offset = values + 1.2
    ref = BitSequence(np.array([1, 0, 1, 0], dtype=np.uint8))
    assert analysis.eye_opening(offset, ref) == pytest.approx(1.7)
    assert analysis.eye_margin(offset, ref) == pytest.approx(-0.6)
    assert analysis.eye_opening(np.array([0.3, -0.2]), BitSequence(np.array([0, 1], dtype=np.uint8))) == \
        pytest.approx(-0.5)
    with pytest.raises(LinkSimError):
        analysis.eye_opening(np.array([]))


def test_dc_offset_moves_the_margin_but_not_the_height(link, payload):
    shifted = nrz_modulate(payload, link)
    shifted = shifted.with_samples(shifted.samples + 0.5)
    eye = analysis.eye_diagram(shifted, link.bit_period)
    assert eye.eye_height == pytest.approx(2.0)
    assert eye.eye_margin == pytest.approx(1.0)
    with_reference = analysis.eye_diagram(shifted, link.bit_period, reference_bits=payload)
    assert with_reference.eye_height == pytest.approx(2.0)


def test_eye_height_from_the_receiver_samples(link, payload):
    wave = nrz_modulate(payload, link)
    sampled = np.where(payload.bits == 1, 0.9, -0.7)
    eye = analysis.eye_diagram(wave, link.bit_period, sampled_values=sampled)
    assert eye.eye_height == pytest.approx(1.6)
    assert eye.eye_margin == pytest.approx(1.4)
    with pytest.raises(LinkSimError):
        analysis.eye_diagram(wave, link.bit_period, sampled_values=sampled[:10])


def test_eye_diagram_of_noiseless_nrz(link, payload):
    eye = analysis.eye_diagram(nrz_modulate(payload, link), link.bit_period)
    assert eye.n_traces == len(payload)
    assert set(np.unique(eye.traces).tolist()) == {-1.0, 1.0}
    assert eye.eye_height == pytest.approx(2.0)
    assert eye.eye_width == pytest.approx(link.bit_period)


def test_eye_diagram_needs_enough_folds(link):
    with pytest.raises(WaveformError):
        analysis.eye_diagram(Waveform(np.ones(300), link.sample_rate), link.bit_period)


def test_psd_of_a_tone_parseval_and_peak():
    fs = 1e9
    t = np.arange(200_000) / fs
    wave = Waveform(np.sqrt(2) * np.sin(2 * np.pi * 125e6 * t), fs)
    spectrum = analysis.psd(wave, 1024)
    assert spectrum.peak_frequency() == pytest.approx(125e6, abs=fs / 1024)
    assert spectrum.total_power() == pytest.approx(wave.mean_square(), rel=0.05)


def test_psd_of_white_noise_is_flat(rng):
    wave = Waveform(rng.normal(0.0, 1.0, 400_000), 1e9)
    spectrum = analysis.psd(wave, 2048, window="rectangular")
    inner = spectrum.density[10:-10]
    assert np.mean(inner) == pytest.approx(2.0 / 1e9, rel=0.05)
    assert spectrum.total_power() == pytest.approx(1.0, rel=0.05)


def test_psd_nulls_at_multiples_of_the_bit_rate(link):
    bits = BitSequence(np.random.default_rng(2).integers(0, 2, 4000).astype(np.uint8))
    spectrum = analysis.psd(nrz_modulate(bits, link), 4000)
    df = spectrum.freqs_hz[1]
    null = spectrum.density[int(round(100e6 / df))]
    lobe = spectrum.density[int(round(50e6 / df))]
    assert 10 * math.log10(lobe / null) > 25.0


def test_psd_validation():
    wave = Waveform(np.ones(100), 1e9)
    with pytest.raises(LinkSimError):
        analysis.psd(wave, 200)
    with pytest.raises(LinkSimError):
        analysis.psd(wave, 64, window="kaiser")


def test_measure_sir_db():
    fs = 1e9
    t = np.arange(1000) / fs
    sig = Waveform(np.ones(1000), fs)
    intf = Waveform(2 * np.sin(2 * np.pi * 10e6 * t), fs)
    assert analysis.power_of(intf) == pytest.approx(2.0)
    assert analysis.measure_sir_db(sig, intf) == pytest.approx(-3.0103, abs=1e-3)


def test_ber_and_wilson_interval():
    tx = BitSequence(np.zeros(1000, dtype=np.uint8))
    rx = BitSequence(np.r_[np.ones(10), np.zeros(990)].astype(np.uint8))
    result = analysis.ber(tx, rx)
    assert result.errors == 10 and result.rate == pytest.approx(0.01)
    lo, hi = result.ci95
    assert lo < 0.01 < hi
    assert analysis.ber(tx, tx).ci95[0] == 0.0
    assert analysis.ber(tx.inverted(), tx).ci95[1] == 1.0
    assert analysis.ber(tx, tx).ci95[1] == pytest.approx(0.00383, rel=0.01)
    with pytest.raises(LinkSimError):
        analysis.ber(tx, rx[:10])


@settings(max_examples=40)
@given(st.integers(min_value=0, max_value=500), st.integers(min_value=500, max_value=5000))
def test_wilson_interval_brackets_the_estimate(errors, n):
    lo, hi = analysis.wilson_interval(errors, n)
    assert 0.0 <= lo <= errors / n <= hi <= 1.0


def test_body_resonance_for_the_reference_length():
    length = analysis.SPEED_OF_LIGHT / 1.6e8
    assert analysis.body_resonance(length) == pytest.approx(80e6, rel=1e-12)
    assert analysis.body_resonance(length, grounded=True) == pytest.approx(40e6, rel=1e-12)
    lo, hi = analysis.body_resonance_band(length)
    assert (lo, hi) == pytest.approx((40e6, 400e6))
    with pytest.raises(LinkSimError):
        analysis.body_resonance(0.0)


@given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
def test_hack_probability(eq, p_touch):
    wban = analysis.hack_probability(eq, p_touch, "wban")
    hbc = analysis.hack_probability(eq, p_touch, analysis.Medium.HBC)
    assert wban == eq
    assert hbc == eq * p_touch
    assert hbc <= wban


def test_hack_probability_rejects_non_probabilities():
    with pytest.raises(LinkSimError):
        analysis.hack_probability(1.2, 0.5, "hbc")
