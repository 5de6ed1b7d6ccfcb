import json
import math

import numpy as np
import pytest

from src.config_manager import ConfigManager, PRESET_DIRECTORY
from src.link.channel import InterferenceSpec
from src.link.ddr_receiver import ReceiverConfig
from src.link.signal_core import LinkParams, prbs

# fixtures

@pytest.fixture
def link():
    yield LinkParams(bit_rate_hz=100e6, samples_per_bit=100, a_sig=1.0)


@pytest.fixture
def receiver():
    yield ReceiverConfig()


@pytest.fixture
def payload():
    yield prbs(7, 0x7F, 254)


@pytest.fixture
def notch_cw():
    yield InterferenceSpec(kind="cw", power_dbm=-17.0, freq_hz=100e6, phase_rad=math.pi / 4)


@pytest.fixture
def rng():
    yield np.random.default_rng(1234)


@pytest.fixture
def config_manager(tmp_path):
    """ConfigManager on a scratch defaults file and the shipped presets."""
    manager = ConfigManager()
    manager.initialize(str(tmp_path / "config.json"), PRESET_DIRECTORY)
    yield manager


@pytest.fixture
def small_scenario_file(tmp_path):
    """Short fig8k-like scenario written to disk, for CLI runs."""
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({
        "name": "small",
        "data": {"n_bits": 400},
        "interferers": [{"kind": "cw", "power_dbm": -17.0, "freq_hz": 100e6, "phase_rad": math.pi / 4}],
        "noise": {"snr_db": 20.0, "seed": 7},
        "calibration": {"sir_db": -23.0},
        "eye_max_traces": 50,
    }))
    yield str(path)
