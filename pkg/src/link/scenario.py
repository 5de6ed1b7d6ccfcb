"""
Scenario - parameter container describing one TX -> channel -> RX experiment
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from src.errors import ConfigError, LinkSimError
from src.link.channel import ChannelParams, InterferenceKind, InterferenceSpec
from src.link.ddr_receiver import INTEGRATION_RULES, ReceiverConfig
from src.link.signal_core import (DEFAULT_R_REF, PRBS_ORDERS, LinkParams, dbm_to_peak_amplitude,
                                  noise_sigma_from_snr, sig_amplitude_from_sir)

SIR_CONVENTIONS = ("power", "peak")

OUTPUT_KINDS = ("report", "config", "decisions", "waveform", "eye_direct", "eye_integrated", "spectrum")


@dataclass(frozen=True)
class DataSpec:
    prbs_order: int = 7
    prbs_seed: int = 0x7F
    n_bits: int = 10_000


@dataclass(frozen=True)
class NoiseSpec:
    """White receiver noise; snr_db of None disables it."""
    snr_db: float | None = None
    seed: int = 1


@dataclass(frozen=True)
class Calibration:
    """
    How the received NRZ amplitude is fixed: either explicitly (a_sig_v) or
    from an SIR against a reference interferer power.
    """
    a_sig_v: float | None = 1e-3
    sir_db: float | None = None
    power_dbm: float | None = None
    r_ref_ohm: float = DEFAULT_R_REF
    sir_convention: str = "power"


@dataclass(frozen=True)
class Scenario:
    """
    Everything needed to run one link experiment. All seeds are explicit.
    """
    name: str = "default"
    bit_rate_hz: float = 100e6
    samples_per_bit: int = 100
    data: DataSpec = field(default_factory=DataSpec)
    interferers: tuple = ()
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    channel: ChannelParams = field(default_factory=ChannelParams)
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)
    calibration: Calibration = field(default_factory=Calibration)
    outputs: tuple = ("report", "config", "decisions", "eye_direct", "eye_integrated", "spectrum")
    phase_search_steps: int = 16
    eye_max_traces: int = 1000
    max_workers: int = 1

    def clone(self, **changes):
        """
        Create a copy of this scenario with some fields replaced

        Returns:
            Scenario: A new scenario object
        """
        return dataclasses.replace(self, **changes)

    def reference_power_dbm(self):
        if self.calibration.power_dbm is not None:
            return self.calibration.power_dbm
        if self.interferers:
            return self.interferers[0].power_dbm
        raise ConfigError("calibration.power_dbm", "sir_db needs a reference interferer power")

    def received_amplitude(self):
        """NRZ amplitude at the receiver input."""
        cal = self.calibration
        if cal.a_sig_v is not None:
            return cal.a_sig_v
        a_intf = dbm_to_peak_amplitude(self.reference_power_dbm(), cal.r_ref_ohm)
        a_sig = sig_amplitude_from_sir(a_intf, cal.sir_db)
        if cal.sir_convention == "peak":
            a_sig *= math.sqrt(2.0)
        return a_sig

    def link_params(self):
        """Link parameters with the transmit amplitude that survives the channel's flat loss."""
        return LinkParams(
            bit_rate_hz=self.bit_rate_hz,
            samples_per_bit=self.samples_per_bit,
            a_sig=self.received_amplitude() / self.channel.gain,
            k_int=self.receiver.k_int,
            delta_frac=self.receiver.delta_frac,
        )

    def noise_sigma(self):
        if self.noise.snr_db is None:
            return 0.0
        return noise_sigma_from_snr(self.received_amplitude(), self.noise.snr_db)

    def to_dict(self):
        """Effective configuration with every default spelled out."""
        return {
            "name": self.name,
            "link": {"bit_rate_hz": self.bit_rate_hz, "samples_per_bit": self.samples_per_bit},
            "data": dataclasses.asdict(self.data),
            "interferers": [_interferer_dict(spec) for spec in self.interferers],
            "noise": dataclasses.asdict(self.noise),
            "channel": dataclasses.asdict(self.channel),
            "receiver": {
                "k_int_per_s": self.receiver.k_int,
                "delta_frac": self.receiver.delta_frac,
                "threshold": self.receiver.threshold,
                "start_phase": self.receiver.start_phase,
                "integration": self.receiver.integration,
            },
            "calibration": dataclasses.asdict(self.calibration),
            "outputs": list(self.outputs),
            "phase_search_steps": self.phase_search_steps,
            "eye_max_traces": self.eye_max_traces,
            "max_workers": self.max_workers,
        }

    @classmethod
    def from_dict(cls, settings):
        """
        Build and validate a scenario from a configuration dictionary

        Args:
            settings (dict): Nested configuration, as produced by to_dict

        Returns:
            Scenario: The validated scenario

        Raises:
            ConfigError: naming the first offending key
        """
        _check_keys(settings, "", ("name", "link", "data", "interferers", "noise", "channel", "receiver",
                                   "calibration", "outputs", "phase_search_steps", "eye_max_traces",
                                   "max_workers"))
        default = cls()

        link = _section(settings, "link", ("bit_rate_hz", "samples_per_bit"))
        data = _section(settings, "data", ("prbs_order", "prbs_seed", "n_bits"))
        noise = _section(settings, "noise", ("snr_db", "seed"))
        channel = _section(settings, "channel", ("coupling_corner_hz", "attenuation_db"))
        receiver = _section(settings, "receiver",
                            ("k_int_per_s", "delta_frac", "threshold", "start_phase", "integration"))
        calibration = _section(settings, "calibration",
                               ("a_sig_v", "sir_db", "power_dbm", "r_ref_ohm", "sir_convention"))

        data_spec = DataSpec(
            prbs_order=_integer(data, "data.prbs_order", default.data.prbs_order),
            prbs_seed=_integer(data, "data.prbs_seed", default.data.prbs_seed),
            n_bits=_integer(data, "data.n_bits", default.data.n_bits),
        )
        if data_spec.prbs_order not in PRBS_ORDERS:
            raise ConfigError("data.prbs_order", f"must be one of {PRBS_ORDERS}")
        if not 0 < data_spec.prbs_seed < (1 << data_spec.prbs_order):
            raise ConfigError("data.prbs_seed", f"must be nonzero and fit in {data_spec.prbs_order} bits")
        if data_spec.n_bits < 1:
            raise ConfigError("data.n_bits", "must be >= 1")

        # an SIR given without an explicit amplitude replaces the default amplitude
        a_sig_default = None if calibration.get("sir_db") is not None else default.calibration.a_sig_v
        cal = Calibration(
            a_sig_v=_number(calibration, "calibration.a_sig_v", a_sig_default, optional=True),
            sir_db=_number(calibration, "calibration.sir_db", default.calibration.sir_db, optional=True),
            power_dbm=_number(calibration, "calibration.power_dbm", default.calibration.power_dbm, optional=True),
            r_ref_ohm=_number(calibration, "calibration.r_ref_ohm", default.calibration.r_ref_ohm),
            sir_convention=calibration.get("sir_convention", default.calibration.sir_convention),
        )
        if (cal.a_sig_v is None) == (cal.sir_db is None):
            raise ConfigError("calibration", "set exactly one of a_sig_v or sir_db")
        if cal.a_sig_v is not None and not cal.a_sig_v > 0:
            raise ConfigError("calibration.a_sig_v", "must be > 0")
        if not cal.r_ref_ohm > 0:
            raise ConfigError("calibration.r_ref_ohm", "must be > 0")
        if cal.sir_convention not in SIR_CONVENTIONS:
            raise ConfigError("calibration.sir_convention", f"must be one of {SIR_CONVENTIONS}")
        if receiver.get("integration", default.receiver.integration) not in INTEGRATION_RULES:
            raise ConfigError("receiver.integration", f"must be one of {INTEGRATION_RULES}")

        interferers = settings.get("interferers", [])
        if not isinstance(interferers, list):
            raise ConfigError("interferers", "must be a list")

        outputs = settings.get("outputs", list(default.outputs))
        if not isinstance(outputs, list):
            raise ConfigError("outputs", "must be a list")
        for i, kind in enumerate(outputs):
            if kind not in OUTPUT_KINDS:
                raise ConfigError(f"outputs[{i}]", f"unknown output {kind!r}, expected one of {OUTPUT_KINDS}")

        scenario = _built("", lambda: cls(
            name=str(settings.get("name", default.name)),
            bit_rate_hz=_number(link, "link.bit_rate_hz", default.bit_rate_hz),
            samples_per_bit=_integer(link, "link.samples_per_bit", default.samples_per_bit),
            data=data_spec,
            interferers=tuple(_interferer(spec, f"interferers[{i}]") for i, spec in enumerate(interferers)),
            noise=NoiseSpec(
                snr_db=_number(noise, "noise.snr_db", default.noise.snr_db, optional=True),
                seed=_integer(noise, "noise.seed", default.noise.seed),
            ),
            channel=_built("channel", lambda: ChannelParams(
                coupling_corner_hz=_number(channel, "channel.coupling_corner_hz",
                                           default.channel.coupling_corner_hz),
                attenuation_db=_number(channel, "channel.attenuation_db", default.channel.attenuation_db),
            )),
            receiver=_built("receiver", lambda: ReceiverConfig(
                k_int=_number(receiver, "receiver.k_int_per_s", default.receiver.k_int, optional=True),
                delta_frac=_number(receiver, "receiver.delta_frac", default.receiver.delta_frac),
                threshold=_number(receiver, "receiver.threshold", default.receiver.threshold),
                start_phase=_integer(receiver, "receiver.start_phase", default.receiver.start_phase),
                integration=receiver.get("integration", default.receiver.integration),
            )),
            calibration=cal,
            outputs=tuple(outputs),
            phase_search_steps=_integer(settings, "phase_search_steps", default.phase_search_steps),
            eye_max_traces=_integer(settings, "eye_max_traces", default.eye_max_traces),
            max_workers=_integer(settings, "max_workers", default.max_workers),
        ))
        scenario.validate()
        return scenario

    def validate(self):
        """Checks that need the whole scenario, run before any waveform is generated."""
        link = _built("link", self.link_params)
        for i, spec in enumerate(self.interferers):
            _built(f"interferers[{i}]", lambda: spec.check_nyquist(link.sample_rate))
        if self.channel.coupling_corner_hz >= link.sample_rate / 2.0:
            raise ConfigError("channel.coupling_corner_hz", "must be below Nyquist")
        if self.phase_search_steps < 8:
            raise ConfigError("phase_search_steps", "must be >= 8")
        if self.eye_max_traces < 1:
            raise ConfigError("eye_max_traces", "must be >= 1")
        if self.max_workers < 1:
            raise ConfigError("max_workers", "must be >= 1")


_INTERFERER_KEYS = ("kind", "power_dbm", "freq_hz", "phase_rad", "carrier_hz", "mod_hz", "mod_index",
                    "band_lo_hz", "band_hi_hz", "n_tones", "phase_seed")

_INTEGER_INTERFERER_KEYS = ("n_tones", "phase_seed")


def _interferer_dict(spec):
    values = dataclasses.asdict(spec)
    values["kind"] = spec.kind.value
    return values


def _interferer(settings, path):
    if not isinstance(settings, dict):
        raise ConfigError(path, "must be an object")
    _check_keys(settings, path, _INTERFERER_KEYS)
    kinds = [k.value for k in InterferenceKind]
    if settings.get("kind", "cw") not in kinds:
        raise ConfigError(f"{path}.kind", f"must be one of {kinds}")
    values = {}
    for key, value in settings.items():
        if key == "kind":
            values[key] = value
        elif key in _INTEGER_INTERFERER_KEYS:
            values[key] = _integer(settings, f"{path}.{key}", None)
        else:
            values[key] = _number(settings, f"{path}.{key}", None)
    return _built(path, lambda: InterferenceSpec(**values))


def _built(path, factory):
    """Run a constructor, reporting invariant violations against a config key."""
    try:
        return factory()
    except ConfigError:
        raise
    except LinkSimError as err:
        raise ConfigError(path or "scenario", str(err)) from err


def _check_keys(settings, path, allowed):
    for key in settings:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown key")


def _section(settings, name, allowed):
    section = settings.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(name, "must be an object")
    _check_keys(section, name, allowed)
    return section


def _number(section, path, default, optional=False):
    value = section.get(path.rsplit(".", 1)[-1], default)
    if value is None:
        if optional:
            return None
        raise ConfigError(path, "is required")
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(path, f"must be a finite number, got {value!r}")
    return float(value)


def _integer(section, path, default):
    value = section.get(path.rsplit(".", 1)[-1], default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"must be an integer, got {value!r}")
    return value
